//! Command-line driver. Exit codes: 0 success, 1 verification failure, 2 usage or dataset error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::analysis::{prime_graph_g, AnalysisError, Analyzer, Budget};
use crate::chartab::CharacterTable;
use crate::expected;
use crate::report::{self, Format, VerifyEntry, VerifyJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "torsion-help", version, about = "HeLP constraints for torsion units of integral group rings")]
pub struct RunConfig {
    /// Character-table dataset (JSON); the bundled M22 table if omitted.
    #[arg(long, env = "HELP_DATASET", global = true)]
    pub dataset: Option<PathBuf>,
    #[arg(long, env = "HELP_FORMAT", value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Worker threads for case splits [default: available cores].
    #[arg(long, env = "HELP_WORKERS", value_parser = clap::value_parser!(u64).range(1..), global = true)]
    pub workers: Option<u64>,
    /// Maximum cases to process for budget-gated orders.
    #[arg(long, env = "HELP_BUDGET_CASES", global = true)]
    pub budget_cases: Option<u64>,
    /// Maximum wall time in seconds for budget-gated orders.
    #[arg(long, env = "HELP_BUDGET_SECS", global = true)]
    pub budget_secs: Option<f64>,
    /// Checkpoint file for budget-gated orders; resumed from when present.
    #[arg(long, env = "HELP_CHECKPOINT", global = true)]
    pub checkpoint: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Admissible partial augmentations of units of order K.
    CheckOrder { k: u64 },
    /// Status of every divisor of the exponent.
    Spectrum,
    /// Compare the prime graphs of G and V(ZG).
    Kimmerle,
    /// Print the constraint system of order K for one case assignment.
    DumpConstraints {
        k: u64,
        #[arg(long, default_value_t = 0)]
        case: u64,
    },
    /// Diff computed sets against expected-tuple files.
    Verify {
        #[arg(long)]
        order: Option<u64>,
        /// Expected-tuple file; needs --order unless its header names the order.
        #[arg(long)]
        expected: Option<PathBuf>,
    },
}

impl RunConfig {
    fn budget(&self) -> Budget {
        Budget {
            max_cases: self.budget_cases,
            max_secs: self.budget_secs,
            checkpoint: self.checkpoint.clone(),
            chunk: None,
        }
    }

    fn workers(&self) -> usize {
        self.workers
            .map(|w| w as usize)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> CliError {
        CliError::Usage(e.to_string())
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&config, out, err) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn load_table(config: &RunConfig) -> Result<CharacterTable, CliError> {
    match &config.dataset {
        None => Ok(CharacterTable::bundled_m22()),
        Some(path) => CharacterTable::load_dataset(path).map_err(|e| CliError::Usage(e.to_string())),
    }
}

fn execute(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let table = load_table(config)?;
    let mut an = Analyzer::new(table, config.workers())?;
    let format = config.format;
    let text = match &config.command {
        Command::CheckOrder { k } => check_order(&mut an, *k, config, err)?,
        Command::Spectrum => {
            let s = an.spectrum(Some(&config.budget()))?;
            report::render_spectrum(an.table(), &s, format)
        }
        Command::Kimmerle => {
            let g = prime_graph_g(an.table());
            let u = an.prime_graph_vzg()?;
            let text = report::render_kimmerle(&g, &u, format);
            let _ = out.write_all(text.as_bytes());
            return Ok(if g == u { EXIT_OK } else { EXIT_FAIL });
        }
        Command::DumpConstraints { k, case } => {
            let count = an.case_count(*k)?;
            let assignment = an.case(*k, *case)?;
            let sys = crate::help_core::build_system(*k, &assignment, an.table())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            report::render_constraints(an.table(), &assignment, *case, count, &sys, format)
        }
        Command::Verify { order, expected } => {
            let (v, classes) = verify(&mut an, *order, expected.as_ref())?;
            let text = report::render_verify(&v, an.table(), &classes, format);
            let _ = out.write_all(text.as_bytes());
            return Ok(if v.pass { EXIT_OK } else { EXIT_FAIL });
        }
    };
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}

fn check_order(an: &mut Analyzer, k: u64, config: &RunConfig, err: &mut dyn Write) -> Result<String, CliError> {
    an.check_divides(k)?;
    if an.needs_budget(k)? {
        let budget = config.budget();
        if !budget.is_set() {
            return Err(AnalysisError::BudgetRequired { k }.into());
        }
        let names: Vec<String> = an.table().classes_of_order_dividing(k).iter().map(|&c| an.table().class_name(c).to_string()).collect();
        let run = an.run_budgeted(k, &budget, &mut |p| {
            for t in p.new_tuples {
                let cells: Vec<String> = t.iter().map(i64::to_string).collect();
                let _ = writeln!(err, "found ({}): {}", names.join(","), cells.join(","));
            }
            let _ = writeln!(err, "progress: {}/{} cases", p.cases_done, p.total_cases);
        })?;
        return Ok(report::render_budgeted(an.table(), &run, config.format));
    }
    let r = an.report(k)?;
    let _ = writeln!(err, "order {k}: {:.3}s", r.wall_time.as_secs_f64());
    Ok(report::render_order(an.table(), &r, config.format))
}

fn verify(
    an: &mut Analyzer,
    order: Option<u64>,
    path: Option<&PathBuf>,
) -> Result<(VerifyJson, BTreeMap<u64, Vec<usize>>), CliError> {
    let mut checksum_errors = Vec::new();
    let files: Vec<(u64, String)> = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            let header = expected::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            let k = order
                .or(header.order)
                .ok_or_else(|| CliError::Usage(format!("{}: no order in header; pass --order", p.display())))?;
            vec![(k, text)]
        }
        None => {
            checksum_errors = expected::checksum_mismatches();
            match order {
                Some(k) => {
                    let text = expected::bundled(k)
                        .ok_or_else(|| CliError::Usage(format!("no bundled expected file for order {k}")))?;
                    vec![(k, text.to_string())]
                }
                None => expected::BUNDLED.iter().map(|(k, t)| (*k, t.to_string())).collect(),
            }
        }
    };
    let mut entries = Vec::new();
    let mut classes = BTreeMap::new();
    for (k, text) in files {
        let file = expected::parse(&text).map_err(|e| CliError::Usage(format!("order {k}: {e}")))?;
        let a = an.admissible(k)?;
        let names: Vec<String> = a.solutions.classes.iter().map(|&c| an.table().class_name(c).to_string()).collect();
        let note = file
            .classes
            .as_ref()
            .filter(|c| **c != names)
            .map(|c| format!("class header {} differs from computed {}", c.join(","), names.join(",")));
        let d = expected::diff(&file, &a.solutions);
        entries.push(VerifyEntry::new(k, file.tuples.len(), a.solutions.len(), d, note));
        classes.insert(k, a.solutions.classes.clone());
    }
    let pass = checksum_errors.is_empty() && entries.iter().all(|e| e.pass);
    Ok((VerifyJson { pass, checksum_errors, orders: entries }, classes))
}
