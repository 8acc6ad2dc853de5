//! Per-order pipeline: admissible sets over case products, order elimination,
//! the unit-order spectrum and the prime-graph comparison.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{divisors, primes_dividing, proper_divisors};
use crate::chartab::CharacterTable;
use crate::help_core::{AugTuple, CaseAssignment, HelpError, SystemTemplate};
use crate::solver::{classify_trivial, solve, SolutionSet, SolverError};

/// Orders at or above this need an explicit budget when their case product is large.
pub const BUDGET_THRESHOLD: u64 = 24;

/// Largest case product run without a budget.
pub const UNBUDGETED_CASE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{k} does not divide exp(G) = {exponent}")]
    NotDivisor { k: u64, exponent: u64 },
    #[error("case index {index} out of range: order {k} has {count} cases")]
    CaseOutOfRange { k: u64, index: u64, count: u64 },
    #[error("order {k} requires a budget (--budget-cases or --budget-secs)")]
    BudgetRequired { k: u64 },
    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Help(#[from] HelpError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Memoized admissible set of one order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Admissible {
    pub solutions: SolutionSet,
    pub case_count: u64,
    pub systems_built: u64,
    /// Every solution, completed by the case that produced it, is trivial.
    pub all_trivial: bool,
    /// Proper divisor `d` whose set for `u^d` was empty, if that ended the computation.
    pub short_circuit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationReport {
    pub order: u64,
    pub case_count: u64,
    pub systems_built: u64,
    pub solutions: SolutionSet,
    pub eliminated: bool,
    pub all_trivial: bool,
    pub short_circuit: Option<u64>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum OrderStatus {
    ElementOrder,
    /// Eliminated by its own empty set (`by == order`) or by an eliminated divisor.
    Eliminated { by: u64 },
    Open { computed: bool },
}

pub type Spectrum = BTreeMap<u64, OrderStatus>;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PrimeGraph {
    pub vertices: BTreeSet<u64>,
    pub edges: BTreeSet<(u64, u64)>,
}

impl PrimeGraph {
    pub fn render_vertices(&self) -> String {
        let v: Vec<String> = self.vertices.iter().map(u64::to_string).collect();
        format!("{{{}}}", v.join(","))
    }

    pub fn render_edges(&self) -> String {
        let e: Vec<String> = self.edges.iter().map(|(p, q)| format!("({p},{q})")).collect();
        format!("{{{}}}", e.join(","))
    }
}

/// Gruenberg–Kegel graph of the group itself.
pub fn prime_graph_g(t: &CharacterTable) -> PrimeGraph {
    let vertices: BTreeSet<u64> = primes_dividing(t.group_order).into_iter().collect();
    let orders = t.element_orders();
    let mut edges = BTreeSet::new();
    for &p in &vertices {
        for &q in vertices.range(p + 1..) {
            if orders.iter().any(|o| o % (p * q) == 0) {
                edges.insert((p, q));
            }
        }
    }
    PrimeGraph { vertices, edges }
}

/// Limits for gated orders. A run stops at whichever limit is reached first.
#[derive(Debug, Clone, Default)]
pub struct Budget {
    /// Cases to process in this invocation.
    pub max_cases: Option<u64>,
    pub max_secs: Option<f64>,
    pub checkpoint: Option<PathBuf>,
    /// Cases per parallel batch; also the checkpoint interval.
    pub chunk: Option<u64>,
}

impl Budget {
    pub fn is_set(&self) -> bool {
        self.max_cases.is_some() || self.max_secs.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub order: u64,
    pub total_cases: u64,
    pub next_case: u64,
    pub systems_built: u64,
    pub all_trivial: bool,
    pub classes: Vec<String>,
    pub solutions: Vec<Vec<i64>>,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Checkpoint, AnalysisError> {
        let err = |reason: String| AnalysisError::Checkpoint { path: path.to_path_buf(), reason };
        let text = fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| err(e.to_string()))
    }

    /// Writes through a temporary file and a rename, so a reader never sees a partial file.
    pub fn store(&self, path: &Path) -> Result<(), AnalysisError> {
        let err = |reason: String| AnalysisError::Checkpoint { path: path.to_path_buf(), reason };
        let tmp = path.with_extension("tmp");
        let text = serde_json::to_string_pretty(self).map_err(|e| err(e.to_string()))?;
        fs::write(&tmp, text + "\n").map_err(|e| err(e.to_string()))?;
        fs::rename(&tmp, path).map_err(|e| err(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Complete,
    CaseLimit,
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetedRun {
    pub order: u64,
    pub total_cases: u64,
    pub resumed_from: u64,
    pub cases_done: u64,
    pub systems_built: u64,
    pub all_trivial: bool,
    pub solutions: SolutionSet,
    pub stop: StopReason,
}

/// Progress notification after each batch of a budgeted run.
#[derive(Debug)]
pub struct Progress<'a> {
    pub cases_done: u64,
    pub total_cases: u64,
    pub new_tuples: &'a [Vec<i64>],
}

struct CaseOutcome {
    tuples: Vec<Vec<i64>>,
    built: bool,
    trivial: bool,
}

pub struct Analyzer {
    table: CharacterTable,
    cache: BTreeMap<u64, Arc<Admissible>>,
    pool: rayon::ThreadPool,
}

impl Analyzer {
    pub fn new(table: CharacterTable, workers: usize) -> Result<Analyzer, AnalysisError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| AnalysisError::Pool(e.to_string()))?;
        Ok(Analyzer { table, cache: BTreeMap::new(), pool })
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    pub fn check_divides(&self, k: u64) -> Result<(), AnalysisError> {
        let exponent = self.table.exponent;
        if k == 0 || exponent % k != 0 {
            return Err(AnalysisError::NotDivisor { k, exponent });
        }
        Ok(())
    }

    /// Admissible partial-augmentation tuples of units of order `k`.
    pub fn admissible(&mut self, k: u64) -> Result<Arc<Admissible>, AnalysisError> {
        self.check_divides(k)?;
        if let Some(a) = self.cache.get(&k) {
            return Ok(a.clone());
        }
        if k == 1 {
            let id = self.table.identity_class();
            let a = Arc::new(Admissible {
                solutions: SolutionSet::new(1, vec![id], vec![vec![1]]),
                case_count: 1,
                systems_built: 0,
                all_trivial: true,
                short_circuit: None,
            });
            self.cache.insert(1, a.clone());
            return Ok(a);
        }
        let ds = proper_divisors(k);
        // Smallest orders first, so an empty one stops the recursion before larger ones are built.
        let mut lower = vec![None; ds.len()];
        let mut empty = None;
        for (i, &d) in ds.iter().enumerate().rev() {
            let a = self.admissible(k / d)?;
            if a.solutions.is_empty() {
                empty = Some(d);
                break;
            }
            lower[i] = Some(a);
        }
        let result = if let Some(d) = empty {
            Admissible {
                solutions: SolutionSet::new(k, self.table.classes_of_order_dividing(k), Vec::new()),
                case_count: 0,
                systems_built: 0,
                all_trivial: true,
                short_circuit: Some(d),
            }
        } else {
            let lower: Vec<Arc<Admissible>> = lower.into_iter().flatten().collect();
            let count = case_count(&lower);
            if k >= BUDGET_THRESHOLD && count > UNBUDGETED_CASE_LIMIT {
                return Err(AnalysisError::BudgetRequired { k });
            }
            let template = SystemTemplate::new(&self.table, k)?;
            let outcomes = self.run_cases(&template, &ds, &lower, 0, count)?;
            let mut set = BTreeSet::new();
            let mut built = 0;
            let mut trivial = true;
            for o in outcomes {
                built += o.built as u64;
                trivial &= o.trivial;
                set.extend(o.tuples);
            }
            Admissible {
                solutions: SolutionSet::new(k, template.variables().to_vec(), set.into_iter().collect()),
                case_count: count,
                systems_built: built,
                all_trivial: trivial,
                short_circuit: None,
            }
        };
        let a = Arc::new(result);
        self.cache.insert(k, a.clone());
        Ok(a)
    }

    /// Admissible sets of u^d for every proper divisor d of `k`, or `None`
    /// once one of them is empty.
    fn lower_sets(&mut self, k: u64) -> Result<Option<Vec<Arc<Admissible>>>, AnalysisError> {
        let ds = proper_divisors(k);
        let mut lower = vec![None; ds.len()];
        for (i, &d) in ds.iter().enumerate().rev() {
            let a = self.admissible(k / d)?;
            if a.solutions.is_empty() {
                return Ok(None);
            }
            lower[i] = Some(a);
        }
        Ok(Some(lower.into_iter().flatten().collect()))
    }

    /// Number of case assignments for order `k`.
    pub fn case_count(&mut self, k: u64) -> Result<u64, AnalysisError> {
        self.check_divides(k)?;
        Ok(self.lower_sets(k)?.map_or(0, |lower| case_count(&lower)))
    }

    /// The `index`-th case of order `k`, in lexicographic order of (divisor, tuple index).
    pub fn case(&mut self, k: u64, index: u64) -> Result<CaseAssignment, AnalysisError> {
        self.check_divides(k)?;
        let ds = proper_divisors(k);
        let lower = self.lower_sets(k)?;
        let count = lower.as_deref().map_or(0, case_count);
        if index >= count {
            return Err(AnalysisError::CaseOutOfRange { k, index, count });
        }
        Ok(decode_case(k, &ds, &lower.unwrap_or_default(), index))
    }

    /// Orders from [`BUDGET_THRESHOLD`] on whose case product exceeds
    /// [`UNBUDGETED_CASE_LIMIT`]; for M22 this is order 24 alone.
    pub fn needs_budget(&mut self, k: u64) -> Result<bool, AnalysisError> {
        Ok(k >= BUDGET_THRESHOLD && self.case_count(k)? > UNBUDGETED_CASE_LIMIT)
    }

    pub fn report(&mut self, k: u64) -> Result<EliminationReport, AnalysisError> {
        let start = Instant::now();
        let a = self.admissible(k)?;
        Ok(EliminationReport {
            order: k,
            case_count: a.case_count,
            systems_built: a.systems_built,
            eliminated: a.solutions.is_empty(),
            all_trivial: a.all_trivial,
            short_circuit: a.short_circuit,
            solutions: a.solutions.clone(),
            wall_time: start.elapsed(),
        })
    }

    /// Status of every divisor of the exponent. Orders that survive divisor
    /// closure and [`needs_budget`](Self::needs_budget) are computed only when a budget is given.
    pub fn spectrum(&mut self, budget: Option<&Budget>) -> Result<Spectrum, AnalysisError> {
        let element_orders: BTreeSet<u64> = self.table.element_orders().into_iter().collect();
        let mut out = Spectrum::new();
        for k in divisors(self.table.exponent) {
            let by_divisor = proper_divisors(k)
                .into_iter()
                .find(|d| matches!(out.get(d), Some(OrderStatus::Eliminated { .. })));
            let status = if let Some(d) = by_divisor {
                OrderStatus::Eliminated { by: d }
            } else if self.needs_budget(k)? && !budget.is_some_and(Budget::is_set) {
                OrderStatus::Open { computed: false }
            } else {
                let (empty, complete) = if self.needs_budget(k)? {
                    let run = self.run_budgeted(k, budget.unwrap(), &mut |_| {})?;
                    (run.solutions.is_empty(), run.stop == StopReason::Complete)
                } else {
                    (self.admissible(k)?.solutions.is_empty(), true)
                };
                if !empty || !complete {
                    if element_orders.contains(&k) {
                        OrderStatus::ElementOrder
                    } else {
                        OrderStatus::Open { computed: complete }
                    }
                } else {
                    OrderStatus::Eliminated { by: k }
                }
            };
            out.insert(k, status);
        }
        Ok(out)
    }

    /// Prime graph of V(ZG): edge {p,q} iff units of order pq survive.
    pub fn prime_graph_vzg(&mut self) -> Result<PrimeGraph, AnalysisError> {
        let vertices: BTreeSet<u64> = primes_dividing(self.table.group_order).into_iter().collect();
        let mut edges = BTreeSet::new();
        for &p in &vertices {
            for &q in vertices.range(p + 1..) {
                if self.table.exponent % (p * q) == 0 && !self.admissible(p * q)?.solutions.is_empty() {
                    edges.insert((p, q));
                }
            }
        }
        Ok(PrimeGraph { vertices, edges })
    }

    /// Streams the case product of `k` in batches, checkpointing after each one.
    /// A checkpoint for the same order is resumed from.
    pub fn run_budgeted(
        &mut self,
        k: u64,
        budget: &Budget,
        on_progress: &mut dyn FnMut(&Progress),
    ) -> Result<BudgetedRun, AnalysisError> {
        self.check_divides(k)?;
        let start = Instant::now();
        let ds = proper_divisors(k);
        let lower = self.lower_sets(k)?;
        let total = lower.as_deref().map_or(0, case_count);
        let lower = lower.unwrap_or_default();
        let template = SystemTemplate::new(&self.table, k)?;
        let names: Vec<String> = template.variables().iter().map(|&c| self.table.class_name(c).to_string()).collect();

        let mut set = BTreeSet::new();
        let mut next = 0;
        let mut built = 0;
        let mut trivial = true;
        if let Some(path) = budget.checkpoint.as_deref().filter(|p| p.exists()) {
            let cp = Checkpoint::load(path)?;
            if cp.order != k || cp.total_cases != total || cp.classes != names {
                return Err(AnalysisError::Checkpoint {
                    path: path.to_path_buf(),
                    reason: format!("belongs to a different run (order {}, {} cases)", cp.order, cp.total_cases),
                });
            }
            next = cp.next_case;
            built = cp.systems_built;
            trivial = cp.all_trivial;
            set.extend(cp.solutions);
        }
        let resumed_from = next;
        let chunk = budget.chunk.unwrap_or(4096).max(1);
        let stop = loop {
            if next >= total {
                break StopReason::Complete;
            }
            if budget.max_cases.is_some_and(|m| next - resumed_from >= m) {
                break StopReason::CaseLimit;
            }
            if budget.max_secs.is_some_and(|s| start.elapsed().as_secs_f64() >= s) {
                break StopReason::TimeLimit;
            }
            let mut end = (next + chunk).min(total);
            if let Some(m) = budget.max_cases {
                end = end.min(resumed_from + m);
            }
            let outcomes = self.run_cases(&template, &ds, &lower, next, end)?;
            let mut fresh = Vec::new();
            for o in outcomes {
                built += o.built as u64;
                trivial &= o.trivial;
                for t in o.tuples {
                    if set.insert(t.clone()) {
                        fresh.push(t);
                    }
                }
            }
            fresh.sort();
            next = end;
            if let Some(path) = &budget.checkpoint {
                Checkpoint {
                    order: k,
                    total_cases: total,
                    next_case: next,
                    systems_built: built,
                    all_trivial: trivial,
                    classes: names.clone(),
                    solutions: set.iter().cloned().collect(),
                }
                .store(path)?;
            }
            on_progress(&Progress { cases_done: next, total_cases: total, new_tuples: &fresh });
        };
        let solutions = SolutionSet::new(k, template.variables().to_vec(), set.into_iter().collect());
        if stop == StopReason::Complete {
            self.cache.entry(k).or_insert_with(|| {
                Arc::new(Admissible {
                    solutions: solutions.clone(),
                    case_count: total,
                    systems_built: built,
                    all_trivial: trivial,
                    short_circuit: None,
                })
            });
        }
        Ok(BudgetedRun {
            order: k,
            total_cases: total,
            resumed_from,
            cases_done: next,
            systems_built: built,
            all_trivial: trivial,
            solutions,
            stop,
        })
    }

    fn run_cases(
        &self,
        template: &SystemTemplate,
        ds: &[u64],
        lower: &[Arc<Admissible>],
        from: u64,
        to: u64,
    ) -> Result<Vec<CaseOutcome>, AnalysisError> {
        let k = template.order();
        self.pool.install(|| {
            (from..to)
                .into_par_iter()
                .map(|i| {
                    let case = decode_case(k, ds, lower, i);
                    let sys = template.instantiate(&case)?;
                    let solutions = solve(&sys)?;
                    let trivial = solutions.aug_tuples().all(|u| {
                        let mut chain = case.choices.clone();
                        chain.insert(1, u);
                        classify_trivial(&chain)
                    });
                    Ok(CaseOutcome { tuples: solutions.tuples, built: true, trivial })
                })
                .collect()
        })
    }
}

fn case_count(lower: &[Arc<Admissible>]) -> u64 {
    lower.iter().map(|a| a.solutions.len() as u64).product()
}

// Mixed-radix decoding; the smallest divisor is the most significant digit.
fn decode_case(k: u64, ds: &[u64], lower: &[Arc<Admissible>], mut index: u64) -> CaseAssignment {
    let mut picks = vec![0usize; ds.len()];
    for i in (0..ds.len()).rev() {
        let radix = lower[i].solutions.len() as u64;
        picks[i] = (index % radix) as usize;
        index /= radix;
    }
    ds.iter().zip(lower).zip(picks).fold(CaseAssignment::new(k), |case, ((&d, a), j)| {
        let s = &a.solutions;
        case.with(d, AugTuple::new(s.order, s.classes.clone(), s.tuples[j].clone()))
    })
}
