//! Exact arithmetic in cyclotomic fields Q(ζ_n).
//!
//! An element of Q(ζ_n) is stored in the power basis `1, ζ_n, …, ζ_n^{φ(n)-1}`
//! obtained by reducing modulo the n-th cyclotomic polynomial Φ_n. The
//! representation inside a fixed conductor is unique, so equality and zero
//! tests are coefficientwise. Operands with different conductors are embedded
//! into the lcm conductor first.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{divisors, gcd, lcm, mobius, totient};

/// Exact rational scalar, always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclotomicError {
    #[error("galois exponent {j} is not coprime to conductor {conductor}")]
    NotCoprime { j: i64, conductor: u64 },
    #[error("cannot embed conductor {from} into conductor {to}: {from} does not divide {to}")]
    BadEmbedding { from: u64, to: u64 },
}

fn phi_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (constant term first) of the n-th cyclotomic polynomial.
///
/// Computed as `(x^n - 1) / ∏_{d | n, d < n} Φ_d` by exact division.
pub fn cyclotomic_polynomial(n: u64) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "conductor must be positive");
    if let Some(p) = phi_cache().lock().unwrap().get(&n) {
        return Arc::clone(p);
    }
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in divisors(n).into_iter().filter(|&d| d < n) {
        let den = cyclotomic_polynomial(d);
        num = exact_divide(&num, &den);
    }
    let poly = Arc::new(num);
    phi_cache().lock().unwrap().insert(n, Arc::clone(&poly));
    poly
}

// Division by a monic integer polynomial with zero remainder.
fn exact_divide(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// An exact element of the cyclotomic field Q(ζ_n).
#[derive(Clone)]
pub struct CycNum {
    conductor: u64,
    coeffs: Vec<Rational>,
}

impl CycNum {
    pub fn zero(n: u64) -> CycNum {
        assert!(n >= 1, "conductor must be positive");
        CycNum {
            conductor: n,
            coeffs: vec![Rational::zero(); totient(n) as usize],
        }
    }

    pub fn from_rational(r: Rational) -> CycNum {
        CycNum {
            conductor: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_integer(v: i64) -> CycNum {
        CycNum::from_rational(Rational::from_integer(v.into()))
    }

    /// ζ_n^e in canonical form.
    pub fn from_root(n: u64, e: i64) -> CycNum {
        CycNum::from_sparse(n, [(e, Rational::one())])
    }

    /// `Σ c_e ζ_n^e` for arbitrary (possibly negative or ≥ n) exponents.
    pub fn from_sparse<I>(n: u64, terms: I) -> CycNum
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        assert!(n >= 1, "conductor must be positive");
        let mut full = vec![Rational::zero(); n as usize];
        for (e, c) in terms {
            full[e.rem_euclid(n as i64) as usize] += c;
        }
        CycNum::reduce(n, full)
    }

    // Reduces a polynomial in ζ_n (any length) modulo Φ_n.
    fn reduce(n: u64, mut poly: Vec<Rational>) -> CycNum {
        let phi = cyclotomic_polynomial(n);
        let deg = phi.len() - 1;
        for i in (deg..poly.len()).rev() {
            if poly[i].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut poly[i], Rational::zero());
            for (j, pj) in phi.iter().enumerate().take(deg) {
                if !pj.is_zero() {
                    poly[i - deg + j] -= &c * Rational::from_integer(pj.clone());
                }
            }
        }
        poly.resize(deg, Rational::zero());
        CycNum {
            conductor: n,
            coeffs: poly,
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Coefficients over `1, ζ_n, …, ζ_n^{φ(n)-1}`.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
    }

    /// Same complex value viewed in Q(ζ_m).
    pub fn embed(&self, m: u64) -> Result<CycNum, CyclotomicError> {
        let n = self.conductor;
        if m == 0 || m % n != 0 {
            return Err(CyclotomicError::BadEmbedding { from: n, to: m });
        }
        if m == n {
            return Ok(self.clone());
        }
        let step = (m / n) as i64;
        Ok(CycNum::from_sparse(
            m,
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i64 * step, c.clone())),
        ))
    }

    fn lift_pair(a: &CycNum, b: &CycNum) -> (CycNum, CycNum) {
        if a.conductor == b.conductor {
            return (a.clone(), b.clone());
        }
        let m = lcm(a.conductor, b.conductor);
        (a.embed(m).unwrap(), b.embed(m).unwrap())
    }

    pub fn add(&self, other: &CycNum) -> CycNum {
        let (a, b) = CycNum::lift_pair(self, other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        CycNum {
            conductor: a.conductor,
            coeffs,
        }
    }

    pub fn sub(&self, other: &CycNum) -> CycNum {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CycNum {
        CycNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &CycNum) -> CycNum {
        let (a, b) = CycNum::lift_pair(self, other);
        let len = a.coeffs.len();
        let mut prod = vec![Rational::zero(); 2 * len - 1];
        for (i, x) in a.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.coeffs.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                prod[i + j] += x * y;
            }
        }
        CycNum::reduce(a.conductor, prod)
    }

    pub fn scale(&self, r: &Rational) -> CycNum {
        CycNum {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// σ_j: ζ_n ↦ ζ_n^j.
    pub fn galois(&self, j: i64) -> Result<CycNum, CyclotomicError> {
        let n = self.conductor;
        if gcd(j.unsigned_abs() % n, n) != 1 && n != 1 {
            return Err(CyclotomicError::NotCoprime { j, conductor: n });
        }
        Ok(CycNum::from_sparse(
            n,
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i64 * j, c.clone())),
        ))
    }

    /// Complex conjugate, σ_{-1}.
    pub fn conj(&self) -> CycNum {
        self.galois(-1).expect("-1 is a unit modulo every n")
    }

    /// Tr_{Q(ζ_n)/Q}, evaluated through Ramanujan sums: Tr(ζ_n^i) = μ(n/g)·φ(n)/φ(n/g), g = gcd(n, i).
    pub fn trace_to_q(&self) -> Rational {
        let n = self.conductor;
        let phi_n = totient(n) as i64;
        let mut acc = Rational::zero();
        for (i, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let q = n / gcd(n, i as u64);
            let ram = mobius(q) * phi_n / totient(q) as i64;
            acc += c * Rational::from_integer(ram.into());
        }
        acc
    }

    /// True when the value lies in the subfield Q(ζ_m).
    pub fn lies_in(&self, m: u64) -> bool {
        let n = self.conductor;
        let g = gcd(n, m);
        if m % n == 0 {
            return true;
        }
        // Q(ζ_n) ∩ Q(ζ_m) = Q(ζ_g); fixed field of {σ_j : j ≡ 1 mod g}.
        (1..n as i64)
            .filter(|&j| gcd(j as u64, n) == 1 && (j as u64) % g == 1 % g)
            .all(|j| self.galois(j).map(|x| x == *self).unwrap_or(false))
    }

    /// Σ coeffs_j · e^{2πij/n}; floating point, for tests and diagnostics only.
    pub fn eval_complex(&self) -> Complex64 {
        let n = self.conductor as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / n;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), theta)
            })
            .sum()
    }
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = CycNum::lift_pair(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycNum {}

impl From<i64> for CycNum {
    fn from(v: i64) -> Self {
        CycNum::from_integer(v)
    }
}

impl Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        CycNum::add(self, rhs)
    }
}

impl Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        CycNum::sub(self, rhs)
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        CycNum::mul(self, rhs)
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum::neg(self)
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum({}; {})", self.conductor, self)
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "z{}^{i}", self.conductor)?,
                (_, false) => write!(f, "{mag}*z{}^{i}", self.conductor)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    fn b7() -> CycNum {
        CycNum::from_sparse(7, [(1, int(1)), (2, int(1)), (4, int(1))])
    }

    #[test]
    fn phi_polynomials() {
        let as_i64 = |n| {
            cyclotomic_polynomial(n)
                .iter()
                .map(|c| c.to_i64().unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(105).len() - 1, 48);
        // Φ_105 is the first with a coefficient of absolute value 2.
        assert!(cyclotomic_polynomial(105).iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn roots() {
        assert_eq!(CycNum::from_root(1, 0), CycNum::from_integer(1));
        assert_eq!(CycNum::from_root(4, 2), CycNum::from_integer(-1));
        let z73 = CycNum::from_root(7, 3);
        assert_eq!(z73.coeffs()[3], int(1));
        assert_eq!(z73.coeffs().iter().filter(|c| !c.is_zero()).count(), 1);
        // ζ_7^6 = -(1 + ζ + … + ζ^5)
        assert!(CycNum::from_root(7, 6).coeffs().iter().all(|c| *c == int(-1)));
    }

    #[test]
    fn ring_examples() {
        let i = CycNum::from_root(4, 1);
        assert!((&i + &CycNum::from_root(4, 3)).is_zero());
        assert_eq!(&CycNum::from_root(7, 1) * &CycNum::from_root(7, 6), CycNum::from_integer(1));
        assert_eq!(&b7() * &b7().conj(), CycNum::from_integer(2));
    }

    #[test]
    fn galois_examples() {
        let i = CycNum::from_root(4, 1);
        assert_eq!(i.galois(3).unwrap(), i.neg());
        assert_eq!(CycNum::from_integer(5).galois(7).unwrap(), CycNum::from_integer(5));
        let z7 = CycNum::from_root(7, 1);
        assert_eq!(z7.galois(2).unwrap().galois(4).unwrap(), z7);
        assert!(matches!(z7.galois(14), Err(CyclotomicError::NotCoprime { .. })));
    }

    #[test]
    fn trace_examples() {
        let five = CycNum::from_integer(5).embed(4).unwrap();
        assert_eq!(five.trace_to_q(), int(10));
        assert_eq!(CycNum::from_root(7, 1).trace_to_q(), int(-1));
        assert_eq!(b7().trace_to_q(), int(-3));
        assert_eq!(b7().embed(42).unwrap().trace_to_q(), int(-6));
    }

    #[test]
    fn embed_examples() {
        assert_eq!(CycNum::from_integer(1).embed(12).unwrap(), CycNum::from_integer(1));
        assert_eq!(CycNum::from_root(2, 1).embed(4).unwrap(), CycNum::from_root(4, 2));
        assert!(matches!(b7().embed(12), Err(CyclotomicError::BadEmbedding { .. })));
    }

    #[test]
    fn subfield_membership() {
        assert!(b7().lies_in(7));
        assert!(!b7().lies_in(1));
        assert!(b7().embed(21).unwrap().lies_in(7));
        assert!(CycNum::from_integer(3).embed(12).unwrap().lies_in(1));
        assert!(!CycNum::from_root(12, 1).lies_in(4));
        assert!(CycNum::from_root(12, 3).lies_in(4));
    }

    #[test]
    fn complex_values() {
        assert_eq!(CycNum::zero(5).eval_complex(), Complex64::new(0.0, 0.0));
        let i = CycNum::from_root(4, 1).eval_complex();
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let b11 = CycNum::from_sparse(11, [1, 3, 4, 5, 9].map(|e| (e, int(1))));
        let want = Complex64::new(-0.5, 11f64.sqrt() / 2.0);
        assert!((b11.eval_complex() - want).norm() < 1e-9);
    }

    #[test]
    fn display() {
        assert_eq!(b7().to_string(), "z7^1 + z7^2 + z7^4");
        assert_eq!(CycNum::from_integer(-3).to_string(), "-3");
    }
}
