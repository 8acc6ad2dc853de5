//! Integer points of a [`ConstraintSystem`].
//!
//! The equality `Σν = 1` eliminates the last variable. Bounds come from an
//! exact basis step (n−1 independent two-sided forms, inverted over Q) followed
//! by an interval fixpoint. Enumeration is a depth-first search in dataset
//! variable order that recomputes the feasible range of each variable from the
//! fixed prefix, checks congruences as soon as the prefix decides them, and
//! re-verifies every leaf against the raw system.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::help_core::{AugTuple, ConstraintSystem};

/// Largest box `brute_force` will scan.
pub const BRUTE_FORCE_LIMIT: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("variable {variable} has no finite bound for order {order}")]
    Unbounded { order: u64, variable: String },
    #[error("box has {points} points, more than the brute-force limit {limit}")]
    BoxTooLarge { points: u128, limit: u128 },
    #[error("box has {found} intervals but the system has {expected} variables")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Closed integer interval per variable, or the explicit empty box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntBox {
    Empty,
    Bounded(Vec<(i64, i64)>),
}

impl IntBox {
    pub fn new(intervals: Vec<(i64, i64)>) -> IntBox {
        if intervals.iter().any(|(lo, hi)| lo > hi) {
            IntBox::Empty
        } else {
            IntBox::Bounded(intervals)
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, IntBox::Empty)
    }

    pub fn intervals(&self) -> Option<&[(i64, i64)]> {
        match self {
            IntBox::Empty => None,
            IntBox::Bounded(v) => Some(v),
        }
    }

    pub fn contains(&self, point: &[i64]) -> bool {
        match self {
            IntBox::Empty => false,
            IntBox::Bounded(v) => {
                v.len() == point.len() && v.iter().zip(point).all(|(&(lo, hi), &x)| lo <= x && x <= hi)
            }
        }
    }

    pub fn points(&self) -> u128 {
        match self {
            IntBox::Empty => 0,
            IntBox::Bounded(v) => v.iter().map(|(lo, hi)| (hi - lo + 1) as u128).product(),
        }
    }

    /// Widens every interval by `margin` on both sides.
    pub fn widened(&self, margin: i64) -> IntBox {
        match self {
            IntBox::Empty => IntBox::Empty,
            IntBox::Bounded(v) => IntBox::Bounded(v.iter().map(|(lo, hi)| (lo - margin, hi + margin)).collect()),
        }
    }
}

/// Sorted, duplicate-free solutions of one order, entries in dataset class order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolutionSet {
    pub order: u64,
    pub classes: Vec<usize>,
    pub tuples: Vec<Vec<i64>>,
}

impl SolutionSet {
    pub fn new(order: u64, classes: Vec<usize>, mut tuples: Vec<Vec<i64>>) -> SolutionSet {
        tuples.sort();
        tuples.dedup();
        SolutionSet { order, classes, tuples }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, values: &[i64]) -> bool {
        self.tuples.binary_search_by(|t| t.as_slice().cmp(values)).is_ok()
    }

    pub fn aug_tuples(&self) -> impl Iterator<Item = AugTuple> + '_ {
        self.tuples
            .iter()
            .map(|v| AugTuple::new(self.order, self.classes.clone(), v.clone()))
    }

    /// Sorted-set union; associative and commutative.
    pub fn union(&self, other: &SolutionSet) -> SolutionSet {
        let mut all = self.tuples.clone();
        all.extend(other.tuples.iter().cloned());
        SolutionSet::new(self.order, self.classes.clone(), all)
    }
}

// Reduced constraint over the first n−1 variables: lo ≤ coeffs·x + constant ≤ hi, ≡ 0 mod modulus.
#[derive(Debug, Clone)]
struct Reduced {
    coeffs: Vec<i64>,
    constant: i64,
    modulus: i64,
    lo: Option<i64>,
    hi: Option<i64>,
}

type Bound = (Option<i64>, Option<i64>);

fn reduce(sys: &ConstraintSystem) -> Vec<Reduced> {
    let n = sys.variables.len();
    sys.constraints
        .iter()
        .map(|c| {
            let last = c.form.coeffs[n - 1];
            let m = c.modulus as i64;
            // The form takes values in mZ, so its bounds round inwards to multiples of m.
            Reduced {
                coeffs: c.form.coeffs[..n - 1].iter().map(|a| a - last).collect(),
                constant: c.form.constant + last,
                modulus: m,
                lo: c.nonnegative.then_some(0),
                hi: c.upper.map(|h| h.div_euclid(m) * m),
            }
        })
        .collect()
}

// The eliminated variable, 1 − Σx, constrained to [lo, hi].
fn last_variable(r: usize, lo: Option<i64>, hi: Option<i64>) -> Reduced {
    Reduced {
        coeffs: vec![-1; r],
        constant: 1,
        modulus: 1,
        lo,
        hi,
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

fn clamp_i64(v: i128) -> i64 {
    v.clamp(i64::MIN as i128 / 4, i64::MAX as i128 / 4) as i64
}

fn tighten(bound: &mut Bound, lo: Option<i64>, hi: Option<i64>) -> bool {
    let mut changed = false;
    if let Some(l) = lo {
        if bound.0.map_or(true, |b| l > b) {
            bound.0 = Some(l);
            changed = true;
        }
    }
    if let Some(h) = hi {
        if bound.1.map_or(true, |b| h < b) {
            bound.1 = Some(h);
            changed = true;
        }
    }
    changed
}

fn is_empty(bounds: &[Bound]) -> bool {
    bounds.iter().any(|b| matches!(b, (Some(l), Some(h)) if l > h))
}

// Range of a·x over the interval, as (min, max), None meaning infinite.
fn term_range(a: i64, b: &Bound) -> (Option<i128>, Option<i128>) {
    let a = a as i128;
    let lo = b.0.map(|v| a * v as i128);
    let hi = b.1.map(|v| a * v as i128);
    if a >= 0 {
        (lo, hi)
    } else {
        (hi, lo)
    }
}

// Range for x_j implied by one constraint given the other variables' bounds.
fn implied(c: &Reduced, j: usize, bounds: &[Bound]) -> Bound {
    let a = c.coeffs[j] as i128;
    if a == 0 {
        return (None, None);
    }
    let mut rest_min: Option<i128> = Some(c.constant as i128);
    let mut rest_max: Option<i128> = Some(c.constant as i128);
    for (i, (&ai, b)) in c.coeffs.iter().zip(bounds).enumerate() {
        if i == j || ai == 0 {
            continue;
        }
        let (mn, mx) = term_range(ai, b);
        rest_min = rest_min.zip(mn).map(|(x, y)| x + y);
        rest_max = rest_max.zip(mx).map(|(x, y)| x + y);
    }
    // lo ≤ a·x + rest ≤ hi
    let ax_lo = c.lo.map(|l| l as i128).zip(rest_max).map(|(l, r)| l - r);
    let ax_hi = c.hi.map(|h| h as i128).zip(rest_min).map(|(h, r)| h - r);
    if a > 0 {
        (
            ax_lo.map(|v| clamp_i64(div_ceil(v, a))),
            ax_hi.map(|v| clamp_i64(div_floor(v, a))),
        )
    } else {
        (
            ax_hi.map(|v| clamp_i64(div_ceil(v, a))),
            ax_lo.map(|v| clamp_i64(div_floor(v, a))),
        )
    }
}

const MAX_ROUNDS: usize = 10_000;

// For a congruence a·x_j + c ≡ 0 (mod m) in one variable: x_j ≡ r (mod m'),
// as Some((r, m')), or None when no residue works.
fn residue_class(a: i64, c: i64, m: i64) -> Option<(i64, i64)> {
    let e = a.rem_euclid(m).extended_gcd(&m);
    if (-c).rem_euclid(e.gcd) != 0 {
        return None;
    }
    let m1 = m / e.gcd;
    let r = ((-c / e.gcd) as i128 * e.x as i128).rem_euclid(m1 as i128) as i64;
    Some((r, m1))
}

// Moves each finite end of `b` inwards onto the residue class r mod m.
fn snap(b: &mut Bound, r: i64, m: i64) -> bool {
    let lo = b.0.map(|l| l + (r - l).rem_euclid(m));
    let hi = b.1.map(|h| h - (h - r).rem_euclid(m));
    tighten(b, lo, hi)
}

// Interval fixpoint; false when the box becomes empty.
fn fixpoint(constraints: &[Reduced], bounds: &mut [Bound]) -> bool {
    for _ in 0..MAX_ROUNDS {
        let mut changed = false;
        for c in constraints {
            for j in 0..bounds.len() {
                let (lo, hi) = implied(c, j, bounds);
                changed |= tighten(&mut bounds[j], lo, hi);
            }
            let mut nonzero = c.coeffs.iter().enumerate().filter(|(_, a)| **a % c.modulus != 0);
            if let (Some((j, &a)), None) = (nonzero.next(), nonzero.next()) {
                match residue_class(a, c.constant, c.modulus) {
                    Some((r, m)) => changed |= snap(&mut bounds[j], r, m),
                    None => return false,
                }
            }
            if is_empty(bounds) {
                return false;
            }
        }
        if !changed {
            break;
        }
    }
    !is_empty(bounds)
}

type Q = num_rational::Ratio<i128>;

/// Largest number of bases tried exhaustively; above it a single greedy basis is used.
const MAX_BASES: u128 = 20_000;

// A two-sided constraint lo ≤ coeffs·x ≤ hi.
type Direction = (Vec<i64>, i64, i64);

// Two-sided constraints with primitive coefficient vectors (first nonzero entry
// positive), parallel ones merged by intersecting their intervals.
fn directions(constraints: &[Reduced]) -> Vec<Direction> {
    let mut map: BTreeMap<Vec<i64>, (i64, i64)> = BTreeMap::new();
    for c in constraints {
        let (Some(lo), Some(hi)) = (c.lo, c.hi) else {
            continue;
        };
        let Some(&lead) = c.coeffs.iter().find(|&&a| a != 0) else {
            continue;
        };
        let g = c.coeffs.iter().fold(0i64, |g, a| g.gcd(a)) * lead.signum();
        let coeffs: Vec<i64> = c.coeffs.iter().map(|a| a / g).collect();
        // g·(coeffs·x) ∈ [lo − constant, hi − constant]
        let (a, b) = ((lo - c.constant) as i128, (hi - c.constant) as i128);
        let g = g as i128;
        let (l, h) = if g > 0 {
            (div_ceil(a, g), div_floor(b, g))
        } else {
            (div_ceil(b, g), div_floor(a, g))
        };
        let e = map.entry(coeffs).or_insert((i64::MIN, i64::MAX));
        e.0 = e.0.max(clamp_i64(l));
        e.1 = e.1.min(clamp_i64(h));
    }
    map.into_iter().map(|(k, (l, h))| (k, l, h)).collect()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn inverse(rows: &[&Direction]) -> Option<Vec<Vec<Q>>> {
    let r = rows.len();
    let mut m: Vec<Vec<Q>> = rows
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut row: Vec<Q> = d.0.iter().map(|&a| Q::from_integer(a as i128)).collect();
            row.extend((0..r).map(|j| Q::from_integer((i == j) as i128)));
            row
        })
        .collect();
    for col in 0..r {
        let p = (col..r).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, p);
        let inv = m[col][col].recip();
        for x in m[col].iter_mut() {
            *x *= inv;
        }
        for i in 0..r {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col];
                for j in 0..2 * r {
                    let v = m[col][j];
                    m[i][j] -= f * v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[r..].to_vec()).collect())
}

// Range of Σ w_i·y_i + offset for y_i ∈ [lo_i, hi_i], rounded inwards to integers.
fn combine(w: &[Q], rows: &[&Direction], offset: i128) -> Bound {
    let (mut lo, mut hi) = (Q::from_integer(offset), Q::from_integer(offset));
    for (wi, d) in w.iter().zip(rows) {
        let a = *wi * Q::from_integer(d.1 as i128);
        let b = *wi * Q::from_integer(d.2 as i128);
        lo += a.min(b);
        hi += a.max(b);
    }
    (Some(clamp_i64(lo.ceil().to_integer())), Some(clamp_i64(hi.floor().to_integer())))
}

// Tightens `bounds` and `last` with the parallelepiped spanned by one basis:
// x = A⁻¹y with y in the box of the chosen directions.
fn apply_basis(rows: &[&Direction], bounds: &mut [Bound], last: &mut Bound) -> bool {
    let Some(inv) = inverse(rows) else {
        return false;
    };
    for (j, w) in inv.iter().enumerate() {
        let (lo, hi) = combine(w, rows, 0);
        tighten(&mut bounds[j], lo, hi);
    }
    // eliminated variable: 1 − Σ_j x_j
    let w: Vec<Q> = (0..rows.len()).map(|i| -inv.iter().map(|row| row[i]).sum::<Q>()).collect();
    let (lo, hi) = combine(&w, rows, 1);
    tighten(last, lo, hi);
    true
}

// Bounds for the r free variables and the eliminated one from bases of
// two-sided directions: every r-subset when there are few, else one greedy basis.
fn basis_bounds(constraints: &[Reduced], r: usize) -> (Vec<Bound>, Bound) {
    let mut bounds = vec![(None, None); r];
    let mut last = (None, None);
    let mut dirs = directions(constraints);
    if dirs.iter().any(|d| d.1 > d.2) {
        bounds[0] = (Some(1), Some(0));
        return (bounds, last);
    }
    if binomial(dirs.len(), r) <= MAX_BASES {
        let mut idx: Vec<usize> = (0..r).collect();
        if dirs.len() < r {
            return (bounds, last);
        }
        loop {
            let rows: Vec<&Direction> = idx.iter().map(|&i| &dirs[i]).collect();
            apply_basis(&rows, &mut bounds, &mut last);
            // next combination in lexicographic order
            let Some(i) = (0..r).rev().find(|&i| idx[i] < dirs.len() - r + i) else {
                break;
            };
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
        }
    } else {
        dirs.sort_by_key(|d| (d.2 - d.1, d.0.clone()));
        let mut chosen: Vec<&Direction> = Vec::new();
        for d in &dirs {
            chosen.push(d);
            if inverse_rank(&chosen) < chosen.len() {
                chosen.pop();
            }
            if chosen.len() == r {
                apply_basis(&chosen, &mut bounds, &mut last);
                break;
            }
        }
    }
    (bounds, last)
}

fn inverse_rank(rows: &[&Direction]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.iter().map(|d| d.0.iter().map(|&a| Q::from_integer(a as i128)).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            let f = m[i][col] / m[rank][col];
            for j in col..cols {
                let v = m[rank][j];
                m[i][j] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

fn full_box(bounds: &[Bound], last: Bound) -> Option<Vec<(i64, i64)>> {
    bounds
        .iter()
        .chain(std::iter::once(&last))
        .map(|b| b.0.zip(b.1))
        .collect()
}

// Bounds for the eliminated variable from the reduced box.
fn last_bound(bounds: &[Bound]) -> Bound {
    let lo = bounds.iter().try_fold(1i64, |acc, b| b.1.map(|h| acc - h));
    let hi = bounds.iter().try_fold(1i64, |acc, b| b.0.map(|l| acc - l));
    (lo, hi)
}

/// Box containing every integer solution, or [`IntBox::Empty`] when infeasibility is detected.
pub fn propagate_bounds(sys: &ConstraintSystem) -> Result<IntBox, SolverError> {
    let n = sys.variables.len();
    if sys.infeasible.is_some() || n == 0 {
        return Ok(IntBox::Empty);
    }
    if n == 1 {
        return Ok(if sys.is_satisfied(&[1]) { IntBox::new(vec![(1, 1)]) } else { IntBox::Empty });
    }
    let r = n - 1;
    let reduced = reduce(sys);
    let (mut bounds, last) = basis_bounds(&reduced, r);
    let mut all = reduced;
    all.push(last_variable(r, last.0, last.1));
    if !fixpoint(&all, &mut bounds) {
        return Ok(IntBox::Empty);
    }
    let last = last_bound(&bounds);
    match full_box(&bounds, last) {
        Some(b) => Ok(IntBox::new(b)),
        None => {
            let j = bounds
                .iter()
                .chain(std::iter::once(&last))
                .position(|b| b.0.is_none() || b.1.is_none())
                .unwrap();
            Err(SolverError::Unbounded {
                order: sys.order,
                variable: sys.variable_names[j].clone(),
            })
        }
    }
}

/// All integer points of `bx` satisfying `sys`, sorted.
pub fn enumerate(sys: &ConstraintSystem, bx: &IntBox) -> Result<SolutionSet, SolverError> {
    let n = sys.variables.len();
    let empty = || SolutionSet::new(sys.order, sys.variables.clone(), Vec::new());
    let Some(intervals) = bx.intervals() else {
        return Ok(empty());
    };
    if intervals.len() != n {
        return Err(SolverError::DimensionMismatch { expected: n, found: intervals.len() });
    }
    if sys.infeasible.is_some() || n == 0 {
        return Ok(empty());
    }
    if n == 1 {
        let ok = bx.contains(&[1]) && sys.is_satisfied(&[1]);
        return Ok(SolutionSet::new(sys.order, sys.variables.clone(), if ok { vec![vec![1]] } else { vec![] }));
    }
    let r = n - 1;
    let mut constraints = reduce(sys);
    let (last_lo, last_hi) = intervals[r];
    constraints.push(last_variable(r, Some(last_lo), Some(last_hi)));
    let mut bounds: Vec<Bound> = intervals[..r].iter().map(|&(l, h)| (Some(l), Some(h))).collect();
    if !fixpoint(&constraints, &mut bounds) {
        return Ok(empty());
    }
    let bounds: Vec<(i64, i64)> = bounds.iter().map(|b| (b.0.unwrap(), b.1.unwrap())).collect();

    // decided[j]: congruences whose residue is fixed once x_0..=x_j are.
    let mut decided: Vec<Vec<usize>> = vec![Vec::new(); r];
    for (ci, c) in constraints.iter().enumerate() {
        if c.modulus <= 1 {
            continue;
        }
        let depth = c.coeffs.iter().rposition(|a| a % c.modulus != 0).unwrap_or(0);
        decided[depth].push(ci);
    }

    let mut search = Search {
        constraints: &constraints,
        decided: &decided,
        bounds: &bounds,
        prefix: vec![0; r],
        partial: constraints.iter().map(|c| c.constant).collect(),
        found: Vec::new(),
    };
    search.descend(0);

    let mut tuples = Vec::with_capacity(search.found.len());
    for mut x in search.found {
        x.push(1 - x.iter().sum::<i64>());
        debug_assert!(bx.contains(&x));
        if sys.is_satisfied(&x) {
            tuples.push(x);
        }
    }
    Ok(SolutionSet::new(sys.order, sys.variables.clone(), tuples))
}

struct Search<'a> {
    constraints: &'a [Reduced],
    decided: &'a [Vec<usize>],
    bounds: &'a [(i64, i64)],
    prefix: Vec<i64>,
    // partial[c]: constant + Σ_{i < depth} coeffs[i]·x_i
    partial: Vec<i64>,
    found: Vec<Vec<i64>>,
}

impl Search<'_> {
    // Feasible range of x_j given the fixed prefix and the static box for the suffix.
    fn range(&self, j: usize) -> Option<(i64, i64)> {
        let (mut lo, mut hi) = self.bounds[j];
        for (c, &base) in self.constraints.iter().zip(&self.partial) {
            let a = c.coeffs[j] as i128;
            let mut rest_min = base as i128;
            let mut rest_max = base as i128;
            for i in j + 1..self.bounds.len() {
                let ai = c.coeffs[i] as i128;
                let (l, h) = self.bounds[i];
                if ai >= 0 {
                    rest_min += ai * l as i128;
                    rest_max += ai * h as i128;
                } else {
                    rest_min += ai * h as i128;
                    rest_max += ai * l as i128;
                }
            }
            if a == 0 {
                let below = c.hi.is_some_and(|h| rest_min > h as i128);
                let above = c.lo.is_some_and(|l| rest_max < l as i128);
                if below || above {
                    return None;
                }
                continue;
            }
            let ax_lo = c.lo.map(|l| l as i128 - rest_max);
            let ax_hi = c.hi.map(|h| h as i128 - rest_min);
            let (xl, xh) = if a > 0 {
                (ax_lo.map(|v| div_ceil(v, a)), ax_hi.map(|v| div_floor(v, a)))
            } else {
                (ax_hi.map(|v| div_ceil(v, a)), ax_lo.map(|v| div_floor(v, a)))
            };
            if let Some(v) = xl {
                lo = lo.max(clamp_i64(v));
            }
            if let Some(v) = xh {
                hi = hi.min(clamp_i64(v));
            }
            if lo > hi {
                return None;
            }
        }
        Some((lo, hi))
    }

    fn descend(&mut self, j: usize) {
        let r = self.bounds.len();
        let Some((lo, hi)) = self.range(j) else {
            return;
        };
        let saved = self.partial.clone();
        for v in lo..=hi {
            self.prefix[j] = v;
            for ((p, c), &s) in self.partial.iter_mut().zip(self.constraints).zip(&saved) {
                *p = s + c.coeffs[j] * v;
            }
            let consistent = self.decided[j]
                .iter()
                .all(|&ci| self.partial[ci].rem_euclid(self.constraints[ci].modulus) == 0);
            if consistent {
                if j + 1 == r {
                    if self.leaf_ok() {
                        self.found.push(self.prefix.clone());
                    }
                } else {
                    self.descend(j + 1);
                }
            }
        }
        self.partial = saved;
    }

    fn leaf_ok(&self) -> bool {
        self.constraints.iter().zip(&self.partial).all(|(c, &v)| {
            v.rem_euclid(c.modulus) == 0 && c.lo.map_or(true, |l| v >= l) && c.hi.map_or(true, |h| v <= h)
        })
    }
}

/// Full scan of `bx` with no propagation; an oracle for [`enumerate`]. Points off
/// the hyperplane `Σν = 1` are skipped: the first n−1 coordinates are scanned and
/// the last is solved from the equality. Every candidate is checked with
/// [`ConstraintSystem::is_satisfied`].
pub fn brute_force(sys: &ConstraintSystem, bx: &IntBox) -> Result<SolutionSet, SolverError> {
    let n = sys.variables.len();
    let Some(intervals) = bx.intervals() else {
        return Ok(SolutionSet::new(sys.order, sys.variables.clone(), Vec::new()));
    };
    if intervals.len() != n {
        return Err(SolverError::DimensionMismatch { expected: n, found: intervals.len() });
    }
    let points = bx.points();
    if points > BRUTE_FORCE_LIMIT {
        return Err(SolverError::BoxTooLarge { points, limit: BRUTE_FORCE_LIMIT });
    }
    let mut found = Vec::new();
    if n > 0 {
        let free = &intervals[..n - 1];
        let mut x: Vec<i64> = free.iter().map(|i| i.0).collect();
        'scan: loop {
            let last = 1 - x.iter().sum::<i64>();
            if intervals[n - 1].0 <= last && last <= intervals[n - 1].1 {
                let mut point = x.clone();
                point.push(last);
                if sys.is_satisfied(&point) {
                    found.push(point);
                }
            }
            for i in (0..n - 1).rev() {
                if x[i] < free[i].1 {
                    x[i] += 1;
                    continue 'scan;
                }
                x[i] = free[i].0;
            }
            break;
        }
    }
    Ok(SolutionSet::new(sys.order, sys.variables.clone(), found))
}

/// Bounds then enumeration.
pub fn solve(sys: &ConstraintSystem) -> Result<SolutionSet, SolverError> {
    let bx = propagate_bounds(sys)?;
    enumerate(sys, &bx)
}

/// A unit is rationally conjugate to a group element iff every power `u^d`
/// (d | k, d < k) has exactly one nonzero partial augmentation. The chain
/// maps each such `d` (including 1) to the tuple of `u^d`.
pub fn classify_trivial(chain: &BTreeMap<u64, AugTuple>) -> bool {
    chain.values().all(AugTuple::is_trivial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartab::CharacterTable;
    use crate::help_core::{build_system, CaseAssignment};

    fn system(k: u64, case: &CaseAssignment) -> ConstraintSystem {
        let t = CharacterTable::bundled_m22();
        build_system(k, case, &t).unwrap()
    }

    #[test]
    fn order_two_has_the_single_trivial_tuple() {
        let sys = system(2, &CaseAssignment::new(2));
        assert_eq!(solve(&sys).unwrap().tuples, vec![vec![1]]);
    }

    #[test]
    fn order_seven_has_four_tuples() {
        let sys = system(7, &CaseAssignment::new(7));
        let s = solve(&sys).unwrap();
        assert_eq!(s.tuples, vec![vec![-1, 2], vec![0, 1], vec![1, 0], vec![2, -1]]);
    }

    #[test]
    fn order_eleven_matches_brute_force_on_a_fixed_box() {
        let sys = system(11, &CaseAssignment::new(11));
        let bx = IntBox::new(vec![(-10, 10), (-10, 10)]);
        let brute = brute_force(&sys, &bx).unwrap();
        assert_eq!(brute.len(), 10);
        assert_eq!(enumerate(&sys, &bx).unwrap(), brute);
        assert_eq!(solve(&sys).unwrap(), brute);
    }

    #[test]
    fn order_four_box_contains_all_solutions() {
        let t = CharacterTable::bundled_m22();
        let c4 = t.class_index("4a").unwrap();
        let case = CaseAssignment::from_class_powers(&t, 4, c4);
        let sys = build_system(4, &case, &t).unwrap();
        let bx = propagate_bounds(&sys).unwrap();
        let s = enumerate(&sys, &bx).unwrap();
        assert_eq!(s.len(), 34);
        assert!(s.tuples.iter().all(|x| bx.contains(x)));
        assert_eq!(enumerate(&sys, &bx.widened(3)).unwrap(), s);
    }

    #[test]
    fn empty_box_yields_nothing() {
        let sys = system(7, &CaseAssignment::new(7));
        assert!(enumerate(&sys, &IntBox::Empty).unwrap().is_empty());
        assert!(IntBox::new(vec![(1, 0), (0, 0)]).is_empty());
    }

    #[test]
    fn trivial_chain() {
        let mut chain = BTreeMap::new();
        chain.insert(1, AugTuple::new(7, vec![9, 10], vec![1, 0]));
        assert!(classify_trivial(&chain));
        chain.insert(1, AugTuple::new(7, vec![9, 10], vec![2, -1]));
        assert!(!classify_trivial(&chain));
    }
}
