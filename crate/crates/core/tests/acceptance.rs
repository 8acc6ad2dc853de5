//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use torsion_help::analysis::{prime_graph_g, Analyzer, Budget, Checkpoint, OrderStatus, StopReason};
use torsion_help::arith::{divisors, gcd};
use torsion_help::chartab::CharacterTable;
use torsion_help::expected;
use torsion_help::help_core::{mu_sum, AugTuple, SystemTemplate};
use torsion_help::solver::{brute_force, classify_trivial, enumerate, propagate_bounds};
use torsion_help::{CycNum, Rational};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_secs: f64, what: &str) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_secs, || format!("{what} took {elapsed:.2?}, limit {limit_secs} s"))
}

fn analyzer(workers: usize) -> Analyzer {
    Analyzer::new(CharacterTable::bundled_m22(), workers).unwrap()
}

/// Computes order `k` on a fresh analyzer and diffs it against the bundled transcription.
fn matches_listing(k: u64, size: usize, cases: u64, workers: usize, limit_secs: f64) -> Outcome {
    let listing = expected::parse(expected::bundled(k).ok_or(format!("no listing for order {k}"))?).map_err(|e| e.to_string())?;
    ensure(listing.tuples.len() == size, || format!("order {k} listing has {} tuples, expected {size}", listing.tuples.len()))?;
    let mut an = analyzer(workers);
    let start = Instant::now();
    let a = an.admissible(k).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let d = expected::diff(&listing, &a.solutions);
    ensure(d.is_clean(), || format!("order {k}: missing {:?}, extra {:?}", d.missing, d.extra))?;
    ensure(a.case_count == cases, || format!("order {k}: {} cases, expected {cases}", a.case_count))?;
    within(elapsed, limit_secs, &format!("order {k}"))?;
    Ok(format!("order {k}: {size} tuples over {cases} case(s) in {elapsed:.2?}"))
}

fn criterion_1() -> Outcome {
    let mut an = analyzer(1);
    let t = an.table().clone();
    let start = Instant::now();
    for (k, class) in [(2, "2a"), (3, "3a"), (5, "5a")] {
        let a = an.admissible(k).map_err(|e| e.to_string())?;
        let ind = AugTuple::indicator(&t, k, t.class_index(class).unwrap());
        ensure(a.solutions.tuples == [ind.values.clone()], || format!("order {k}: {:?}", a.solutions.tuples))?;
        ensure(a.all_trivial && classify_trivial(&BTreeMap::from([(1, ind)])), || format!("order {k} not trivial"))?;
    }
    within(start.elapsed(), 1.0, "orders 2, 3, 5")?;
    Ok(format!("orders 2, 3, 5 are the class indicators, trivial, in {:.2?}", start.elapsed()))
}

fn criterion_4() -> Outcome {
    let seven = matches_listing(7, 4, 1, 1, 5.0)?;
    let eleven = matches_listing(11, 10, 1, 1, 5.0)?;
    Ok(format!("{seven}; {eleven}"))
}

fn criterion_5() -> Outcome {
    let mut an = analyzer(1);
    let start = Instant::now();
    for (k, cases) in [(10, 1), (14, 4), (15, 1), (21, 4), (22, 10), (33, 10), (35, 4), (55, 10), (77, 40)] {
        let a = an.admissible(k).map_err(|e| e.to_string())?;
        ensure(a.solutions.is_empty(), || format!("order {k} has {} solutions", a.solutions.len()))?;
        ensure(a.case_count == cases, || format!("order {k}: {} cases, expected {cases}", a.case_count))?;
        ensure(a.systems_built == cases, || format!("order {k}: {} systems built", a.systems_built))?;
    }
    within(start.elapsed(), 30.0, "eliminated orders")?;
    Ok(format!("nine orders eliminated in every case split, {:.2?} total", start.elapsed()))
}

fn criterion_7() -> Outcome {
    let listing = expected::parse(expected::bundled(12).unwrap()).map_err(|e| e.to_string())?;
    let counted = listing.tuples.len();
    ensure(counted == 1166, || format!("transcription has {counted} tuples"))?;
    matches_listing(12, counted, 510, 4, 600.0)
}

fn criterion_8() -> Outcome {
    let mut an = analyzer(2);
    let s = an.spectrum(None).map_err(|e| e.to_string())?;
    let divs = divisors(an.table().exponent);
    ensure(s.keys().copied().eq(divs.iter().copied()), || "spectrum does not cover every divisor".into())?;
    let open: Vec<u64> = s.iter().filter(|(_, v)| matches!(v, OrderStatus::Open { .. })).map(|(k, _)| *k).collect();
    ensure(open == [12, 24], || format!("open = {open:?}"))?;
    let elements: Vec<u64> = s.iter().filter(|(_, v)| matches!(v, OrderStatus::ElementOrder)).map(|(k, _)| *k).collect();
    ensure(elements == an.table().element_orders(), || format!("element orders {elements:?}"))?;
    let eliminated = s.values().filter(|v| matches!(v, OrderStatus::Eliminated { .. })).count();
    ensure(elements.len() + eliminated + 2 == divs.len(), || "unclassified divisors".into())?;
    Ok(format!("{} element orders, {eliminated} eliminated, open {{12,24}}", elements.len()))
}

fn criterion_9() -> Outcome {
    let mut an = analyzer(2);
    let g = prime_graph_g(an.table());
    let u = an.prime_graph_vzg().map_err(|e| e.to_string())?;
    ensure(g == u, || format!("G {g:?} vs V(ZG) {u:?}"))?;
    ensure(g.vertices == BTreeSet::from([2, 3, 5, 7, 11]), || format!("vertices {:?}", g.vertices))?;
    ensure(g.edges == BTreeSet::from([(2, 3)]), || format!("edges {:?}", g.edges))?;
    Ok(format!("vertices {}, edges {} on both graphs", g.render_vertices(), g.render_edges()))
}

fn criterion_10() -> Outcome {
    let t = common::m22();
    let forms = common::reference_forms();
    let failures: Vec<String> = forms.iter().filter_map(|f| f.check(&t).err()).collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    let orders: BTreeSet<u64> = forms.iter().map(|f| f.k).collect();
    Ok(format!("{} reference forms over orders {orders:?} reproduced exactly", forms.len()))
}

fn cyc_in(n: u64) -> impl Strategy<Value = CycNum> {
    let coeff = (-9i64..=9, 1i64..=4).prop_map(|(a, b)| Rational::new(a.into(), b.into()));
    prop::collection::vec((-(n as i64) * 2..(n as i64) * 2, coeff), 0..6).prop_map(move |terms| CycNum::from_sparse(n, terms))
}

fn cyclotomic_laws() -> Result<(), String> {
    let cases = 10_000;
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    let strategy = (1u64..=24).prop_flat_map(|n| {
        let units: Vec<i64> = (1..=n as i64).filter(|&j| gcd(j as u64, n) == 1).collect();
        let pick = prop::sample::select(divisors(n)).prop_flat_map(cyc_in);
        (Just(n), pick.clone(), pick.clone(), pick, prop::sample::select(units))
    });
    runner
        .run(&strategy, |(n, a, b, c, j)| {
            let fail = |what: &str| TestCaseError::fail(format!("{what} at n = {n}"));
            if &(&a * &b) * &c != &a * &(&b * &c) || &a * &(&b + &c) != &(&a * &b) + &(&a * &c) || &a * &b != &b * &a {
                return Err(fail("ring law"));
            }
            let s = |x: &CycNum| x.embed(n).unwrap().galois(j).unwrap();
            if s(&(&a * &b)) != &s(&a) * &s(&b) || s(&(&a + &b)) != &s(&a) + &s(&b) {
                return Err(fail("Galois automorphism"));
            }
            let lifted = a.embed(n).unwrap();
            let galois_sum = (1..=n as i64)
                .filter(|&i| gcd(i as u64, n) == 1)
                .fold(CycNum::zero(n), |acc, i| &acc + &lifted.galois(i).unwrap());
            if galois_sum.as_rational() != Some(lifted.trace_to_q()) {
                return Err(fail("trace"));
            }
            Ok(())
        })
        .map_err(|e| format!("cyclotomic laws: {e}"))
}

fn criterion_11() -> Outcome {
    cyclotomic_laws()?;

    let t = CharacterTable::bundled_m22();
    let mut an = Analyzer::new(t.clone(), 1).unwrap();
    let (mut sums, mut systems) = (0, 0);
    for k in [2u64, 3, 4, 5, 6, 7, 8, 10, 11, 12, 14, 15, 21, 22, 33, 35, 55, 77] {
        let template = SystemTemplate::new(&t, k).map_err(|e| e.to_string())?;
        for i in 0..an.case_count(k).map_err(|e| e.to_string())? {
            let case = an.case(k, i).map_err(|e| e.to_string())?;
            let mut by_char: BTreeMap<String, Vec<_>> = BTreeMap::new();
            for f in template.raw_forms(&case).map_err(|e| e.to_string())?.into_iter().filter(|f| f.tag.starts_with("mu(")) {
                by_char.entry(f.tag.split_once(", ").unwrap().1.to_string()).or_default().push(f);
            }
            for (key, forms) in by_char {
                let s = mu_sum(&forms);
                ensure(s.coeffs.iter().all(|&c| c == 0) && Some(s.constant) == forms[0].upper, || {
                    format!("mu-sum identity fails: order {k} case {i} {key}")
                })?;
                sums += 1;
            }
            if k <= 12 {
                let sys = template.instantiate(&case).map_err(|e| e.to_string())?;
                let bx = propagate_bounds(&sys).map_err(|e| e.to_string())?;
                let fast = enumerate(&sys, &bx).map_err(|e| e.to_string())?;
                let slow = brute_force(&sys, &bx).map_err(|e| e.to_string())?;
                ensure(fast == slow, || format!("enumerate != brute_force: order {k} case {i}"))?;
                systems += 1;
            }
        }
    }

    ensure(t.classes.iter().map(|c| c.size).sum::<u64>() == 443_520, || "class sizes".into())?;
    ensure(t.ordinary.iter().map(|c| (c.degree * c.degree) as u64).sum::<u64>() == 443_520, || "degrees".into())?;
    let orth = t.validate_orthogonality();
    ensure(orth.passed(), || format!("orthogonality: {:?}", orth.failure))?;
    for pm in &t.power_maps {
        for (c, &img) in pm.images.iter().enumerate() {
            let o = t.element_order(c);
            ensure(t.element_order(img) == o / gcd(o, pm.prime), || format!("power map {} at {}", pm.prime, t.class_name(c)))?;
        }
    }
    Ok(format!(
        "10000 cyclotomic cases, {sums} mu-sum identities, {systems} systems with enumerate = brute_force, dataset valid"
    ))
}

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("order24.json");
    let mut an = analyzer(2);
    let first = Budget { max_cases: Some(200), max_secs: None, checkpoint: Some(path.clone()), chunk: Some(50) };
    let mut batches = 0;
    let run = an.run_budgeted(24, &first, &mut |_| batches += 1).map_err(|e| e.to_string())?;
    ensure(run.stop == StopReason::CaseLimit && run.cases_done == 200, || format!("first run {:?} at {}", run.stop, run.cases_done))?;
    ensure(batches == 4, || format!("{batches} progress reports"))?;
    let cp = Checkpoint::load(&path).map_err(|e| e.to_string())?;
    ensure(cp.next_case == 200 && cp.solutions == run.solutions.tuples, || "checkpoint out of step".into())?;

    let second = Budget { max_cases: None, max_secs: Some(1.0), checkpoint: Some(path.clone()), chunk: Some(50) };
    let start = Instant::now();
    let resumed = an.run_budgeted(24, &second, &mut |_| {}).map_err(|e| e.to_string())?;
    within(start.elapsed(), 30.0, "time-limited resume")?;
    ensure(resumed.stop == StopReason::TimeLimit && resumed.resumed_from == 200 && resumed.cases_done > 200, || {
        format!("resume {:?} from {} to {}", resumed.stop, resumed.resumed_from, resumed.cases_done)
    })?;
    ensure(run.solutions.tuples.iter().all(|x| resumed.solutions.contains(x)), || "resume dropped tuples".into())?;
    Ok(format!(
        "stopped at case limit (200), resumed to {} of {} under a time limit",
        resumed.cases_done, resumed.total_cases
    ))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "orders 2, 3, 5", criterion_1),
        (2, "order 4", || matches_listing(4, 34, 1, 1, 5.0)),
        (3, "order 6", || matches_listing(6, 15, 1, 1, 5.0)),
        (4, "orders 7 and 11", criterion_4),
        (5, "eliminated orders", criterion_5),
        (6, "order 8", || matches_listing(8, 76, 34, 1, 60.0)),
        (7, "order 12", criterion_7),
        (8, "spectrum", criterion_8),
        (9, "prime graphs", criterion_9),
        (10, "constraint spot-checks", criterion_10),
        (11, "property suites", criterion_11),
        (12, "budgeted order 24", criterion_12),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
