//! HeLP constraint generation.
//!
//! For a unit `u` of order `k` with partial augmentations `ν_c` (one per
//! non-identity class whose order divides `k`), every ordinary character and
//! every p-Brauer character with `p ∤ k` yields, for each residue `l`, the
//! integer
//!
//! ```text
//! k·μ_l = Σ_c ν_c·Tr_{Q(ζ_k)/Q}(χ(c)·ζ_k^{-l}) + Σ_{d | k, d > 1} Tr_{Q(ζ_{k/d})/Q}(χ(u^d)·ζ_{k/d}^{-l})
//! ```
//!
//! which must be non-negative and divisible by `k`. The values `χ(u^d)` come
//! from a [`CaseAssignment`]: an assumed partial-augmentation tuple for each
//! proper power of `u`. Since the `μ_l` of one character sum to `χ(1)`, each
//! numerator is also bounded above by `k·χ(1)`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::arith::{prime_power, proper_divisors, rem_euclid};
use crate::chartab::{CharKind, Character, CharacterTable};
use crate::cyclotomic::{CycNum, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HelpError {
    #[error("no case choice for u^{d} (order {k})")]
    MissingCase { k: u64, d: u64 },
    #[error("case choice for u^{d} has order {found}, expected {expected}")]
    CaseOrderMismatch { d: u64, expected: u64, found: u64 },
    #[error("{d} is not a divisor of {k} with 1 < d <= k")]
    BadDivisor { k: u64, d: u64 },
    #[error("non-integral trace {value} for {character} (l = {l}); dataset is corrupt")]
    NonIntegralTrace { character: String, l: u64, value: String },
    #[error("{character} is a {p}-Brauer character but {p} divides the unit order {k}")]
    PrimeDividesOrder { character: String, p: u64, k: u64 },
    #[error("{character} is undefined on class {class}")]
    Undefined { character: String, class: String },
    #[error("{k} is not a prime power")]
    NotPrimePower { k: u64 },
    #[error("unit order must be positive")]
    ZeroOrder,
}

/// Partial augmentations of a unit of order `order`, over the classes whose
/// element order divides `order` (dataset order). All other classes are zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AugTuple {
    pub order: u64,
    pub classes: Vec<usize>,
    pub values: Vec<i64>,
}

impl AugTuple {
    pub fn new(order: u64, classes: Vec<usize>, values: Vec<i64>) -> AugTuple {
        assert_eq!(classes.len(), values.len(), "one value per class");
        AugTuple {
            order,
            classes,
            values,
        }
    }

    /// The tuple of a group element from class `class`, as a unit of order `order`.
    pub fn indicator(t: &CharacterTable, order: u64, class: usize) -> AugTuple {
        let classes = t.classes_of_order_dividing(order);
        let values = classes.iter().map(|&c| i64::from(c == class)).collect();
        AugTuple::new(order, classes, values)
    }

    pub fn get(&self, class: usize) -> i64 {
        self.classes
            .iter()
            .position(|&c| c == class)
            .map_or(0, |i| self.values[i])
    }

    pub fn sum(&self) -> i64 {
        self.values.iter().sum()
    }

    /// Exactly one nonzero entry, equal to 1.
    pub fn is_trivial(&self) -> bool {
        let nonzero: Vec<_> = self.values.iter().filter(|&&v| v != 0).collect();
        nonzero == [&1]
    }
}

/// Assumed partial augmentations of the proper powers `u^d`, `1 < d < k`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CaseAssignment {
    pub order: u64,
    pub choices: BTreeMap<u64, AugTuple>,
}

impl CaseAssignment {
    pub fn new(order: u64) -> CaseAssignment {
        CaseAssignment {
            order,
            choices: BTreeMap::new(),
        }
    }

    pub fn with(mut self, d: u64, tuple: AugTuple) -> CaseAssignment {
        self.choices.insert(d, tuple);
        self
    }

    /// Case in which every power `u^d` behaves like the matching power of a group element of class `class`.
    pub fn from_class_powers(t: &CharacterTable, order: u64, class: usize) -> CaseAssignment {
        proper_divisors(order)
            .into_iter()
            .fold(CaseAssignment::new(order), |case, d| {
                let img = t.power_class(class, d);
                case.with(d, AugTuple::indicator(t, order / d, img))
            })
    }
}

/// `Σ coeffs[i]·ν_i + constant`, with `coeffs` aligned to the system's variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    pub coeffs: Vec<i64>,
    pub constant: i64,
}

impl LinearForm {
    pub fn eval(&self, values: &[i64]) -> i64 {
        self.coeffs
            .iter()
            .zip(values)
            .map(|(a, v)| a * v)
            .sum::<i64>()
            + self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|&a| a == 0)
    }

    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (a, name) in self.coeffs.iter().zip(names).filter(|(a, _)| **a != 0) {
            let mag = a.unsigned_abs();
            let term = if mag == 1 { format!("v{name}") } else { format!("{mag}*v{name}") };
            match (out.is_empty(), *a < 0) {
                (true, true) => out.push_str(&format!("-{term}")),
                (true, false) => out.push_str(&term),
                (false, true) => out.push_str(&format!(" - {term}")),
                (false, false) => out.push_str(&format!(" + {term}")),
            }
        }
        match (out.is_empty(), self.constant) {
            (true, c) => out.push_str(&c.to_string()),
            (false, 0) => {}
            (false, c) if c < 0 => out.push_str(&format!(" - {}", c.unsigned_abs())),
            (false, c) => out.push_str(&format!(" + {c}")),
        }
        out
    }
}

/// `form(ν) ≡ 0 (mod modulus)`, plus `form(ν) ≥ 0` when `nonnegative` and
/// `form(ν) ≤ upper` when an upper bound is known.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub form: LinearForm,
    pub modulus: u64,
    pub nonnegative: bool,
    pub upper: Option<i64>,
    pub tag: String,
}

impl Constraint {
    pub fn holds(&self, values: &[i64]) -> bool {
        self.holds_value(self.form.eval(values))
    }

    pub fn holds_value(&self, v: i64) -> bool {
        rem_euclid(v, self.modulus) == 0
            && (!self.nonnegative || v >= 0)
            && self.upper.map_or(true, |u| v <= u)
    }

    // Dedup key: everything but the tag.
    fn key(&self) -> (LinearForm, u64, bool, Option<i64>) {
        (self.form.clone(), self.modulus, self.nonnegative, self.upper)
    }

    pub fn render(&self, names: &[String]) -> String {
        let body = format!("(1/{})({})", self.modulus, self.form.render(names));
        let cond = if self.nonnegative { " >= 0 in Z" } else { " in Z" };
        format!("{body}{cond}    [{}]", self.tag)
    }
}

/// All HeLP constraints for one order and one case assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub order: u64,
    /// Class positions of the unknowns, in dataset order.
    pub variables: Vec<usize>,
    pub variable_names: Vec<String>,
    pub constraints: Vec<Constraint>,
    /// Tag of a constant constraint that already fails; the system then has no solutions.
    pub infeasible: Option<String>,
}

impl ConstraintSystem {
    /// Independent check of a candidate point: Σν = 1 and every constraint.
    pub fn is_satisfied(&self, values: &[i64]) -> bool {
        self.infeasible.is_none()
            && values.len() == self.variables.len()
            && values.iter().sum::<i64>() == 1
            && self.constraints.iter().all(|c| c.holds(values))
    }

    pub fn render(&self) -> Vec<String> {
        let mut lines = vec![format!(
            "{} = 1    [augmentation]",
            LinearForm {
                coeffs: vec![1; self.variables.len()],
                constant: 0
            }
            .render(&self.variable_names)
        )];
        if let Some(tag) = &self.infeasible {
            lines.push(format!("infeasible constant constraint    [{tag}]"));
        }
        lines.extend(self.constraints.iter().map(|c| c.render(&self.variable_names)));
        lines
    }
}

fn mu_tag(l: u64, chi: &Character) -> String {
    match chi.kind {
        CharKind::Ordinary => format!("mu(l={l}, {}, p=*)", chi.id),
        CharKind::Brauer(p) => format!("mu(l={l}, {}, p={p})", chi.id),
    }
}

fn trace_to_i64(x: &CycNum, chi: &Character, l: u64) -> Result<i64, HelpError> {
    let tr = x.trace_to_q();
    if tr.is_integer() {
        if let Some(v) = tr.to_integer().to_i64() {
            return Ok(v);
        }
    }
    Err(HelpError::NonIntegralTrace {
        character: chi.label(),
        l,
        value: tr.to_string(),
    })
}

fn value_at<'a>(t: &CharacterTable, chi: &'a Character, c: usize) -> Result<&'a CycNum, HelpError> {
    chi.value(c).ok_or_else(|| HelpError::Undefined {
        character: chi.label(),
        class: t.class_name(c).to_string(),
    })
}

fn check_coprime(chi: &Character, k: u64) -> Result<(), HelpError> {
    match chi.kind {
        CharKind::Brauer(p) if k % p == 0 => Err(HelpError::PrimeDividesOrder {
            character: chi.label(),
            p,
            k,
        }),
        _ => Ok(()),
    }
}

fn check_case(k: u64, case: &CaseAssignment, d: u64) -> Result<&AugTuple, HelpError> {
    let tuple = case.choices.get(&d).ok_or(HelpError::MissingCase { k, d })?;
    if tuple.order != k / d {
        return Err(HelpError::CaseOrderMismatch {
            d,
            expected: k / d,
            found: tuple.order,
        });
    }
    Ok(tuple)
}

/// χ(u^d) = Σ_c ν_c(u^d)·χ(c) under the given case; χ(1) when `d = k`.
pub fn chi_at_power(
    t: &CharacterTable,
    chi: &Character,
    k: u64,
    d: u64,
    case: &CaseAssignment,
) -> Result<CycNum, HelpError> {
    if d <= 1 || k % d != 0 {
        return Err(HelpError::BadDivisor { k, d });
    }
    if d == k {
        return Ok(CycNum::from_integer(chi.degree));
    }
    let tuple = check_case(k, case, d)?;
    let mut acc = CycNum::zero(k / d);
    for (&c, &nu) in tuple.classes.iter().zip(&tuple.values) {
        if nu != 0 {
            let v = value_at(t, chi, c)?;
            acc = &acc + &v.scale(&Rational::from_integer(nu.into()));
        }
    }
    Ok(acc)
}

/// The numerator `k·μ_l(u, χ, p)` as a constraint with modulus `k`, computed directly in Q(ζ_k).
pub fn mu_form(
    t: &CharacterTable,
    k: u64,
    l: u64,
    chi: &Character,
    case: &CaseAssignment,
) -> Result<Constraint, HelpError> {
    if k == 0 {
        return Err(HelpError::ZeroOrder);
    }
    check_coprime(chi, k)?;
    let variables = t.classes_of_order_dividing(k);
    let root_k = CycNum::from_root(k, -(l as i64));
    let coeffs = variables
        .iter()
        .map(|&c| {
            let v = value_at(t, chi, c)?.embed(k).expect("class order divides k");
            trace_to_i64(&(&v * &root_k), chi, l)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut constant = 0i64;
    for d in crate::arith::divisors(k).into_iter().filter(|&d| d > 1) {
        let m = k / d;
        let x = chi_at_power(t, chi, k, d, case)?
            .embed(m)
            .expect("χ(u^d) lies in Q(ζ_{k/d})");
        let term = &x * &CycNum::from_root(m, -(l as i64));
        constant += trace_to_i64(&term, chi, l)?;
    }
    Ok(Constraint {
        form: LinearForm { coeffs, constant },
        modulus: k,
        nonnegative: true,
        upper: Some(k as i64 * chi.degree),
        tag: mu_tag(l, chi),
    })
}

/// Divisibility conditions on sums of partial augmentations for units of prime-power order p^n:
/// for 0 < m < n the classes of element order p^m have ν-sum ≡ 0 (mod p).
pub fn cl_congruences(k: u64, t: &CharacterTable) -> Result<Vec<Constraint>, HelpError> {
    let (p, n) = prime_power(k).ok_or(HelpError::NotPrimePower { k })?;
    let variables = t.classes_of_order_dividing(k);
    let mut out = Vec::new();
    let mut pm = 1u64;
    for m in 1..n {
        pm *= p;
        let coeffs: Vec<i64> = variables
            .iter()
            .map(|&c| i64::from(t.element_order(c) == pm))
            .collect();
        if coeffs.iter().all(|&a| a == 0) {
            continue;
        }
        out.push(Constraint {
            form: LinearForm { coeffs, constant: 0 },
            modulus: p,
            nonnegative: false,
            upper: None,
            tag: format!("CL(p={p},m={m})"),
        });
    }
    Ok(out)
}

// One character/residue pair with every trace precomputed as an integer.
#[derive(Debug, Clone)]
struct MuRow {
    tag: String,
    coeffs: Vec<i64>,
    degree: i64,
    upper: i64,
    // power_terms[i][c]: Tr(χ(c)·ζ_{k/d}^{-l}) for d = divisors[i], indexed by class position.
    power_terms: Vec<Vec<i64>>,
}

/// Case-independent part of every μ-form for one order, so that a case costs
/// only integer dot products.
#[derive(Debug, Clone)]
pub struct SystemTemplate {
    order: u64,
    variables: Vec<usize>,
    variable_names: Vec<String>,
    divisors: Vec<u64>,
    rows: Vec<MuRow>,
    congruences: Vec<Constraint>,
}

impl SystemTemplate {
    pub fn new(t: &CharacterTable, k: u64) -> Result<SystemTemplate, HelpError> {
        if k == 0 {
            return Err(HelpError::ZeroOrder);
        }
        let variables = t.classes_of_order_dividing(k);
        let variable_names = variables.iter().map(|&c| t.class_name(c).to_string()).collect();
        let divisors = proper_divisors(k);
        let mut rows = Vec::new();
        for (p, chars) in t.character_sets() {
            if p != 0 && k % p == 0 {
                continue;
            }
            for chi in chars {
                for l in 0..k {
                    rows.push(SystemTemplate::row(t, k, l, chi, &variables, &divisors)?);
                }
            }
        }
        let congruences = match prime_power(k) {
            Some(_) => cl_congruences(k, t)?,
            None => Vec::new(),
        };
        Ok(SystemTemplate {
            order: k,
            variables,
            variable_names,
            divisors,
            rows,
            congruences,
        })
    }

    fn row(
        t: &CharacterTable,
        k: u64,
        l: u64,
        chi: &Character,
        variables: &[usize],
        divisors: &[u64],
    ) -> Result<MuRow, HelpError> {
        let root_k = CycNum::from_root(k, -(l as i64));
        let coeffs = variables
            .iter()
            .map(|&c| {
                let v = value_at(t, chi, c)?.embed(k).expect("class order divides k");
                trace_to_i64(&(&v * &root_k), chi, l)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut power_terms = Vec::with_capacity(divisors.len());
        for &d in divisors {
            let m = k / d;
            let root_m = CycNum::from_root(m, -(l as i64));
            let mut terms = vec![0i64; t.classes.len()];
            for c in t.classes_of_order_dividing(m) {
                let v = value_at(t, chi, c)?.embed(m).expect("class order divides k/d");
                terms[c] = trace_to_i64(&(&v * &root_m), chi, l)?;
            }
            power_terms.push(terms);
        }
        Ok(MuRow {
            tag: mu_tag(l, chi),
            coeffs,
            degree: chi.degree,
            upper: k as i64 * chi.degree,
            power_terms,
        })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    /// Proper divisors `d` (1 < d < k) that a case must cover.
    pub fn case_divisors(&self) -> &[u64] {
        &self.divisors
    }

    /// Every μ-form for the case, one per (character, l), without dedup or constant checks.
    pub fn raw_forms(&self, case: &CaseAssignment) -> Result<Vec<Constraint>, HelpError> {
        let tuples = self.case_tuples(case)?;
        Ok(self
            .rows
            .iter()
            .map(|row| Constraint {
                form: LinearForm {
                    coeffs: row.coeffs.clone(),
                    constant: SystemTemplate::constant(row, &tuples),
                },
                modulus: self.order,
                nonnegative: true,
                upper: Some(row.upper),
                tag: row.tag.clone(),
            })
            .collect())
    }

    fn case_tuples<'c>(&self, case: &'c CaseAssignment) -> Result<Vec<&'c AugTuple>, HelpError> {
        self.divisors
            .iter()
            .map(|&d| check_case(self.order, case, d))
            .collect()
    }

    fn constant(row: &MuRow, tuples: &[&AugTuple]) -> i64 {
        row.degree
            + row
                .power_terms
                .iter()
                .zip(tuples)
                .map(|(terms, tuple)| {
                    tuple
                        .classes
                        .iter()
                        .zip(&tuple.values)
                        .map(|(&c, &nu)| nu * terms[c])
                        .sum::<i64>()
                })
                .sum::<i64>()
    }

    /// The deduplicated system for one case. Constant forms are decided on the
    /// spot; the first failing one marks the whole system infeasible.
    pub fn instantiate(&self, case: &CaseAssignment) -> Result<ConstraintSystem, HelpError> {
        let tuples = self.case_tuples(case)?;
        let mut system = ConstraintSystem {
            order: self.order,
            variables: self.variables.clone(),
            variable_names: self.variable_names.clone(),
            constraints: Vec::new(),
            infeasible: None,
        };
        if self.variables.is_empty() {
            system.infeasible = Some("augmentation".to_string());
            return Ok(system);
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for row in &self.rows {
            let c = Constraint {
                form: LinearForm {
                    coeffs: row.coeffs.clone(),
                    constant: SystemTemplate::constant(row, &tuples),
                },
                modulus: self.order,
                nonnegative: true,
                upper: Some(row.upper),
                tag: row.tag.clone(),
            };
            if c.form.is_constant() {
                if !c.holds_value(c.form.constant) {
                    system.infeasible = Some(c.tag);
                    return Ok(system);
                }
                continue;
            }
            kept.push(c);
        }
        kept.extend(self.congruences.iter().cloned());
        for c in kept {
            if seen.insert(c.key()) {
                system.constraints.push(c);
            }
        }
        Ok(system)
    }
}

/// Builds the full HeLP system for order `k` under `case`: every ordinary
/// character, every Brauer table with p ∤ k, every l in 0..k, plus the
/// prime-power congruences when k is a prime power.
pub fn build_system(
    k: u64,
    case: &CaseAssignment,
    t: &CharacterTable,
) -> Result<ConstraintSystem, HelpError> {
    SystemTemplate::new(t, k)?.instantiate(case)
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.render() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Σ_l numerator_l for one character; equals `k·χ(1)` identically in ν.
pub fn mu_sum(forms: &[Constraint]) -> LinearForm {
    let n = forms.first().map_or(0, |f| f.form.coeffs.len());
    forms.iter().fold(
        LinearForm {
            coeffs: vec![0; n],
            constant: 0,
        },
        |mut acc, c| {
            for (a, b) in acc.coeffs.iter_mut().zip(&c.form.coeffs) {
                *a += b;
            }
            acc.constant += c.form.constant;
            acc
        },
    )
}
