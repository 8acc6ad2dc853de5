//! Output renderings. Comparable output carries no timings; JSON is pretty-printed
//! with a trailing newline so that parse-and-reserialize is byte-identical.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::{BudgetedRun, EliminationReport, OrderStatus, PrimeGraph, Spectrum, StopReason};
use crate::chartab::CharacterTable;
use crate::expected::Diff;
use crate::help_core::{CaseAssignment, ConstraintSystem};
use crate::solver::SolutionSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderJson {
    pub group: String,
    pub order: u64,
    pub case_count: u64,
    pub systems_built: u64,
    pub eliminated: bool,
    pub all_trivial: bool,
    pub classes: Vec<String>,
    pub solutions: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub order: u64,
    #[serde(flatten)]
    pub status: OrderStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub group: String,
    pub exponent: u64,
    pub element_orders: Vec<u64>,
    pub open: Vec<u64>,
    pub orders: Vec<SpectrumEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KimmerleJson {
    pub pass: bool,
    pub group_graph: PrimeGraph,
    pub unit_graph: PrimeGraph,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerChoice {
    pub power: u64,
    pub order: u64,
    pub classes: Vec<String>,
    pub values: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintsJson {
    pub order: u64,
    pub case: u64,
    pub case_count: u64,
    pub variables: Vec<String>,
    pub choices: Vec<PowerChoice>,
    pub infeasible: Option<String>,
    pub constraints: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub order: u64,
    pub expected: usize,
    pub computed: usize,
    pub pass: bool,
    pub missing: Vec<Vec<i64>>,
    pub extra: Vec<Vec<i64>>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyJson {
    pub pass: bool,
    pub checksum_errors: Vec<String>,
    pub orders: Vec<VerifyEntry>,
}

impl VerifyEntry {
    pub fn new(order: u64, expected: usize, computed: usize, diff: Diff, note: Option<String>) -> VerifyEntry {
        VerifyEntry {
            order,
            expected,
            computed,
            pass: diff.is_clean() && note.is_none(),
            missing: diff.missing,
            extra: diff.extra,
            note,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetedJson {
    pub group: String,
    pub order: u64,
    pub total_cases: u64,
    pub resumed_from: u64,
    pub cases_done: u64,
    pub systems_built: u64,
    pub complete: bool,
    pub stop: String,
    pub all_trivial: bool,
    pub classes: Vec<String>,
    pub solutions: Vec<Vec<i64>>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize") + "\n"
}

fn class_names(t: &CharacterTable, classes: &[usize]) -> Vec<String> {
    classes.iter().map(|&c| t.class_name(c).to_string()).collect()
}

fn plural(n: u64, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

/// Right-aligned columns separated by two spaces.
pub fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let width: Vec<usize> = (0..cols)
        .map(|j| rows.iter().map(|r| r[j].len()).chain([header[j].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| -> String {
        let s: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect();
        format!("  {}\n", s.join("  "))
    };
    let mut out = line(header);
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

fn tuple_rows(set: &SolutionSet) -> Vec<Vec<String>> {
    set.tuples.iter().map(|t| t.iter().map(i64::to_string).collect()).collect()
}

fn csv_tuples(t: &CharacterTable, set: &SolutionSet) -> String {
    let mut out = class_names(t, &set.classes).join(",") + "\n";
    for tuple in &set.tuples {
        let cells: Vec<String> = tuple.iter().map(i64::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn order_json(t: &CharacterTable, r: &EliminationReport) -> OrderJson {
    OrderJson {
        group: t.group_name.clone(),
        order: r.order,
        case_count: r.case_count,
        systems_built: r.systems_built,
        eliminated: r.eliminated,
        all_trivial: r.all_trivial,
        classes: class_names(t, &r.solutions.classes),
        solutions: r.solutions.tuples.clone(),
    }
}

/// One-line summary, e.g. `order 77: eliminated (0 solutions over 40 cases)`.
pub fn order_summary(r: &EliminationReport) -> String {
    if r.eliminated {
        let mut s = format!("order {}: eliminated (0 solutions over {}", r.order, plural(r.case_count, "case"));
        if let Some(d) = r.short_circuit {
            s += &format!("; u^{d} has order {}, which is eliminated", r.order / d);
        }
        s + ")"
    } else {
        format!(
            "order {}: {} over {}",
            r.order,
            plural(r.solutions.len() as u64, "solution"),
            plural(r.case_count, "case")
        )
    }
}

pub fn render_order(t: &CharacterTable, r: &EliminationReport, format: Format) -> String {
    match format {
        Format::Json => to_json(&order_json(t, r)),
        Format::Csv => csv_tuples(t, &r.solutions),
        Format::Text => {
            let mut out = order_summary(r) + "\n";
            if !r.eliminated {
                out += &format!("all trivial: {}\n", if r.all_trivial { "yes" } else { "no" });
                out += &aligned(&class_names(t, &r.solutions.classes), &tuple_rows(&r.solutions));
            }
            out
        }
    }
}

fn status_text(s: &OrderStatus) -> String {
    match s {
        OrderStatus::ElementOrder => "element order".into(),
        OrderStatus::Eliminated { by } => format!("eliminated (by {by})"),
        OrderStatus::Open { computed: true } => "open".into(),
        OrderStatus::Open { computed: false } => "open (not computed)".into(),
    }
}

fn braces(v: &[u64]) -> String {
    let s: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("{{{}}}", s.join(","))
}

pub fn spectrum_json(t: &CharacterTable, s: &Spectrum) -> SpectrumJson {
    let pick = |f: fn(&OrderStatus) -> bool| s.iter().filter(|(_, v)| f(v)).map(|(k, _)| *k).collect::<Vec<_>>();
    SpectrumJson {
        group: t.group_name.clone(),
        exponent: t.exponent,
        element_orders: pick(|v| matches!(v, OrderStatus::ElementOrder)),
        open: pick(|v| matches!(v, OrderStatus::Open { .. })),
        orders: s.iter().map(|(&order, &status)| SpectrumEntry { order, status }).collect(),
    }
}

pub fn render_spectrum(t: &CharacterTable, s: &Spectrum, format: Format) -> String {
    let j = spectrum_json(t, s);
    match format {
        Format::Json => to_json(&j),
        Format::Csv => {
            let mut out = String::from("order,status,by\n");
            for e in &j.orders {
                let (status, by) = match e.status {
                    OrderStatus::ElementOrder => ("element-order", String::new()),
                    OrderStatus::Eliminated { by } => ("eliminated", by.to_string()),
                    OrderStatus::Open { computed: true } => ("open", String::new()),
                    OrderStatus::Open { computed: false } => ("open-not-computed", String::new()),
                };
                out += &format!("{},{status},{by}\n", e.order);
            }
            out
        }
        Format::Text => {
            let rows: Vec<Vec<String>> =
                j.orders.iter().map(|e| vec![e.order.to_string(), status_text(&e.status)]).collect();
            let mut out = aligned(&["order".into(), "status".into()], &rows);
            let eliminated = j.orders.len() - j.element_orders.len() - j.open.len();
            out += &format!("element orders: {}\n", braces(&j.element_orders));
            out += &format!("eliminated: {eliminated} of {} divisors of {}\n", j.orders.len(), j.exponent);
            out += &format!("open: {}\n", braces(&j.open));
            out
        }
    }
}

pub fn render_kimmerle(g: &PrimeGraph, u: &PrimeGraph, format: Format) -> String {
    let pass = g == u;
    match format {
        Format::Json => to_json(&KimmerleJson { pass, group_graph: g.clone(), unit_graph: u.clone() }),
        Format::Csv => {
            let mut out = String::from("graph,p,q\n");
            for (name, graph) in [("G", g), ("V(ZG)", u)] {
                for (p, q) in &graph.edges {
                    out += &format!("{name},{p},{q}\n");
                }
            }
            out
        }
        Format::Text if pass => format!(
            "PASS: vertices {}, edges {} on both sides\n",
            g.render_vertices(),
            g.render_edges()
        ),
        Format::Text => format!(
            "FAIL: G has vertices {}, edges {}; V(ZG) has vertices {}, edges {}\n",
            g.render_vertices(),
            g.render_edges(),
            u.render_vertices(),
            u.render_edges()
        ),
    }
}

pub fn constraints_json(
    t: &CharacterTable,
    case: &CaseAssignment,
    index: u64,
    count: u64,
    sys: &ConstraintSystem,
) -> ConstraintsJson {
    ConstraintsJson {
        order: sys.order,
        case: index,
        case_count: count,
        variables: sys.variable_names.clone(),
        choices: case
            .choices
            .iter()
            .map(|(&d, a)| PowerChoice {
                power: d,
                order: a.order,
                classes: class_names(t, &a.classes),
                values: a.values.clone(),
            })
            .collect(),
        infeasible: sys.infeasible.clone(),
        constraints: sys.render(),
    }
}

pub fn render_constraints(
    t: &CharacterTable,
    case: &CaseAssignment,
    index: u64,
    count: u64,
    sys: &ConstraintSystem,
    format: Format,
) -> String {
    match format {
        Format::Json => to_json(&constraints_json(t, case, index, count, sys)),
        Format::Csv => {
            let mut out = format!("tag,modulus,lower,upper,constant,{}\n", sys.variable_names.join(","));
            for c in &sys.constraints {
                let coeffs: Vec<String> = c.form.coeffs.iter().map(i64::to_string).collect();
                out += &format!(
                    "\"{}\",{},{},{},{},{}\n",
                    c.tag,
                    c.modulus,
                    if c.nonnegative { "0" } else { "" },
                    c.upper.map(|u| u.to_string()).unwrap_or_default(),
                    c.form.constant,
                    coeffs.join(",")
                );
            }
            out
        }
        Format::Text => {
            let mut out = format!("# order {}, case {index} of {count}\n", sys.order);
            for (d, a) in &case.choices {
                let cells: Vec<String> = a
                    .classes
                    .iter()
                    .zip(&a.values)
                    .map(|(&c, v)| format!("{}={v}", t.class_name(c)))
                    .collect();
                out += &format!("# u^{d} (order {}): {}\n", a.order, cells.join(", "));
            }
            if let Some(reason) = &sys.infeasible {
                out += &format!("# infeasible: {reason}\n");
            }
            for line in sys.render() {
                out += &line;
                out.push('\n');
            }
            out
        }
    }
}

pub fn render_verify(v: &VerifyJson, t: &CharacterTable, classes: &BTreeMap<u64, Vec<usize>>, format: Format) -> String {
    match format {
        Format::Json => to_json(v),
        Format::Csv => {
            let mut out = String::from("order,expected,computed,missing,extra,pass\n");
            for e in &v.orders {
                out += &format!(
                    "{},{},{},{},{},{}\n",
                    e.order,
                    e.expected,
                    e.computed,
                    e.missing.len(),
                    e.extra.len(),
                    if e.pass { "PASS" } else { "FAIL" }
                );
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for err in &v.checksum_errors {
                out += &format!("checksum: {err}\n");
            }
            for e in &v.orders {
                if e.pass {
                    out += &format!("order {}: PASS ({})\n", e.order, plural(e.expected as u64, "tuple"));
                    continue;
                }
                out += &format!(
                    "order {}: FAIL (expected {}, computed {}; {} missing, {} extra)\n",
                    e.order,
                    e.expected,
                    e.computed,
                    e.missing.len(),
                    e.extra.len()
                );
                if let Some(note) = &e.note {
                    out += &format!("  {note}\n");
                }
                let names = classes.get(&e.order).map(|c| class_names(t, c).join(",")).unwrap_or_default();
                for (label, list) in [("missing", &e.missing), ("extra", &e.extra)] {
                    for tuple in list {
                        let cells: Vec<String> = tuple.iter().map(i64::to_string).collect();
                        out += &format!("  {label} ({names}): {}\n", cells.join(","));
                    }
                }
            }
            out += if v.pass { "PASS\n" } else { "FAIL\n" };
            out
        }
    }
}

pub fn budgeted_json(t: &CharacterTable, r: &BudgetedRun) -> BudgetedJson {
    let stop = match r.stop {
        StopReason::Complete => "complete",
        StopReason::CaseLimit => "case-limit",
        StopReason::TimeLimit => "time-limit",
    };
    BudgetedJson {
        group: t.group_name.clone(),
        order: r.order,
        total_cases: r.total_cases,
        resumed_from: r.resumed_from,
        cases_done: r.cases_done,
        systems_built: r.systems_built,
        complete: r.stop == StopReason::Complete,
        stop: stop.into(),
        all_trivial: r.all_trivial,
        classes: class_names(t, &r.solutions.classes),
        solutions: r.solutions.tuples.clone(),
    }
}

pub fn render_budgeted(t: &CharacterTable, r: &BudgetedRun, format: Format) -> String {
    let j = budgeted_json(t, r);
    match format {
        Format::Json => to_json(&j),
        Format::Csv => csv_tuples(t, &r.solutions),
        Format::Text => {
            let mut out = format!(
                "order {}: {} after {} of {} cases (stopped: {})\n",
                r.order,
                plural(r.solutions.len() as u64, "solution"),
                r.cases_done,
                r.total_cases,
                j.stop
            );
            if !r.solutions.is_empty() {
                out += &aligned(&j.classes, &tuple_rows(&r.solutions));
            }
            out
        }
    }
}
