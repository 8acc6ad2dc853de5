//! Ring, Galois and trace laws for exact cyclotomic arithmetic on random
//! conductors up to 24, checked against a floating-point embedding and an
//! explicit sum over Galois conjugates.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use torsion_help::arith::{divisors, gcd, lcm, totient};
use torsion_help::{CycNum, Rational};

const TOL: f64 = 1e-9;

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn cyc_in(n: u64) -> impl Strategy<Value = CycNum> {
    prop::collection::vec((-(n as i64) * 2..(n as i64) * 2, rational()), 0..6)
        .prop_map(move |terms| CycNum::from_sparse(n, terms))
}

/// Values whose conductors divide a common n ≤ 24, so mixed operands lift to at most n.
fn cyc_triple() -> impl Strategy<Value = (CycNum, CycNum, CycNum)> {
    (1u64..=24).prop_flat_map(|n| {
        let ds = divisors(n);
        let pick = move || prop::sample::select(ds.clone()).prop_flat_map(cyc_in);
        (pick(), pick(), pick())
    })
}

fn unit_mod(n: u64) -> impl Strategy<Value = i64> {
    (1i64..=n.max(2) as i64 * 3).prop_filter("coprime to n", move |j| gcd(*j as u64, n) == 1)
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= TOL * (1.0 + a.norm().max(b.norm()))
}

/// Σ_i c_i Σ_{j ∈ (Z/n)^×} cos(2π i j / n), independent of the library's trace.
fn float_trace(x: &CycNum) -> f64 {
    let n = x.conductor();
    let mut acc = 0.0;
    for (i, c) in x.coeffs().iter().enumerate() {
        let c = c.to_f64().unwrap();
        for j in (0..n).filter(|&j| gcd(j, n) == 1) {
            acc += c * (2.0 * std::f64::consts::PI * (i as u64 * j % n) as f64 / n as f64).cos();
        }
    }
    acc
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn ring_laws((a, b, c) in cyc_triple()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &CycNum::from_integer(1), a.clone());
        prop_assert_eq!(&a + &(-&a), CycNum::zero(1));
    }

    #[test]
    fn complex_embedding_is_a_ring_map((a, b, _) in cyc_triple()) {
        prop_assert!(close((&a + &b).eval_complex(), a.eval_complex() + b.eval_complex()));
        prop_assert!(close((&a * &b).eval_complex(), a.eval_complex() * b.eval_complex()));
        prop_assert!(close(a.conj().eval_complex(), a.eval_complex().conj()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn galois_is_an_automorphism((n, a, b, j, k) in (1u64..=24).prop_flat_map(|n| (Just(n), cyc_in(n), cyc_in(n), unit_mod(n), unit_mod(n)))) {
        let s = |x: &CycNum, e: i64| x.galois(e).unwrap();
        prop_assert_eq!(s(&(&a * &b), j), &s(&a, j) * &s(&b, j));
        prop_assert_eq!(s(&(&a + &b), j), &s(&a, j) + &s(&b, j));
        prop_assert_eq!(s(&s(&a, j), k), s(&a, j * k));
        prop_assert_eq!(s(&a, j + n as i64), s(&a, j));
        prop_assert_eq!(s(&a, 1), a.clone());
        prop_assert_eq!(a.conj(), s(&a, -1));
    }

    #[test]
    fn non_units_are_rejected(n in 2u64..=24, j in 0i64..48) {
        let x = CycNum::from_root(n, 1);
        prop_assert_eq!(x.galois(j).is_ok(), gcd(j as u64 % n, n) == 1);
    }

    #[test]
    fn trace_matches_galois_sum_and_float_oracle((n, a) in (1u64..=24).prop_flat_map(|n| (Just(n), cyc_in(n)))) {
        let tr = a.trace_to_q();
        let galois_sum = (0..n as i64)
            .filter(|&j| gcd(j as u64, n) == 1)
            .fold(CycNum::zero(n), |acc, j| &acc + &a.galois(j).unwrap());
        prop_assert_eq!(galois_sum.as_rational(), Some(tr.clone()));
        prop_assert!((tr.to_f64().unwrap() - float_trace(&a)).abs() <= TOL * (1.0 + tr.to_f64().unwrap().abs()));
    }

    #[test]
    fn trace_is_linear_and_scales_rationals((n, a, b, r) in (1u64..=24).prop_flat_map(|n| (Just(n), cyc_in(n), cyc_in(n), rational()))) {
        prop_assert_eq!((&a + &b).trace_to_q(), a.trace_to_q() + b.trace_to_q());
        prop_assert_eq!(a.scale(&r).trace_to_q(), a.trace_to_q() * &r);
        let q = CycNum::from_sparse(n, [(0, r.clone())]);
        prop_assert_eq!(q.trace_to_q(), r * Rational::from_integer(totient(n).into()));
    }

    #[test]
    fn embedding_preserves_value((n, a) in (1u64..=12).prop_flat_map(|n| (Just(n), cyc_in(n))), f in 1u64..=4) {
        let m = n * f;
        let e = a.embed(m).unwrap();
        prop_assert_eq!(e.conductor(), m);
        prop_assert_eq!(&e, &a);
        prop_assert!(close(e.eval_complex(), a.eval_complex()));
        prop_assert!(e.lies_in(n));
    }

    #[test]
    fn mixed_conductors_lift_to_lcm((a, b, _) in cyc_triple()) {
        let s = &a * &b;
        prop_assert_eq!(s.conductor(), lcm(a.conductor(), b.conductor()));
    }

    #[test]
    fn exponents_reduce_mod_n(n in 1u64..=24, e in -48i64..48, r in rational()) {
        let x = CycNum::from_sparse(n, [(e, r.clone())]);
        let y = CycNum::from_sparse(n, [(e + n as i64, r)]);
        prop_assert_eq!(x, y);
    }
}

#[test]
fn sum_of_primitive_roots_is_mobius() {
    for n in 1u64..=24 {
        let s = (0..n as i64)
            .filter(|&j| gcd(j as u64, n) == 1)
            .fold(CycNum::zero(n), |acc, j| &acc + &CycNum::from_root(n, j));
        let mu = torsion_help::arith::mobius(n);
        assert_eq!(s.as_rational(), Some(Rational::from_integer(mu.into())), "n = {n}");
    }
}
