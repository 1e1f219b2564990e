use sgo_core::superroots::{condition_a, SuperWeight};
use sgo_core::verify::{lie_chi_vanishes, run_closure_equiv, run_config, run_prop81, run_relevance_stab, run_roundtrip, run_roundtrip_with, run_suite, SuiteParams};
use sgo_core::Error;

fn params(m: usize, n: usize, b: i64, samples: usize) -> SuiteParams {
    SuiteParams { box_bound: b, samples, seed: 7, ..SuiteParams::new(m, n) }
}

#[test]
fn roundtrip_small_box_passes() {
    let r = run_roundtrip(&params(1, 2, 2, 10)).unwrap();
    assert!(r.pass, "{:?}", r.failures);
    assert_eq!(r.trials, 75 * 10);
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn roundtrip_degenerate_box() {
    let r = run_roundtrip(&params(2, 3, 0, 3)).unwrap();
    assert!(r.pass);
    assert_eq!(r.trials, 3);
}

#[test]
fn roundtrip_detects_a_broken_classifier() {
    let broken = |a: &sgo_core::LoopMatrix, m: usize, n: usize| {
        sgo_core::classify(a, m, n).map(|mut w| {
            w.theta[0] -= 1;
            w
        })
    };
    let mut p = params(1, 3, 1, 2);
    p.failure_cap = 5;
    let r = run_roundtrip_with(&p, &broken).unwrap();
    assert!(!r.pass);
    assert_eq!(r.violations, r.trials);
    assert_eq!(r.failures.len(), 5);
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn precision_exhaustion_is_reported_separately() {
    let starved = |_: &sgo_core::LoopMatrix, _: usize, _: usize| -> sgo_core::Result<SuperWeight> { Err(Error::InsufficientPrecision) };
    let r = run_roundtrip_with(&params(1, 2, 0, 2), &starved).unwrap();
    assert_eq!((r.violations, r.precision_failures, r.exit_code()), (0, 2, 3));
    assert!(!r.pass);
}

#[test]
fn semi_infinite_suite_passes_and_includes_canonical_points() {
    let r = run_prop81(&params(1, 3, 2, 100)).unwrap();
    assert!(r.pass, "{:?}", r.failures);
    // 20 canonical checks plus two checks per sampled point.
    assert_eq!(r.trials, 20 + 2 * 100);
}

#[test]
fn closure_equivalence_small() {
    let r = run_closure_equiv(&params(1, 3, 1, 0)).unwrap();
    assert!(r.pass, "{:?}", r.failures);
}

#[test]
fn chi_examples() {
    assert!(lie_chi_vanishes(&SuperWeight::zero(1, 3), 4).unwrap());
    let bad = SuperWeight::from_parts(vec![0], vec![0, 2], vec![1]).unwrap();
    assert!(!condition_a(&bad));
    assert!(!lie_chi_vanishes(&bad, 4).unwrap());
    let tail = SuperWeight::from_parts(vec![0], vec![0, 0], vec![2, 1]).unwrap();
    assert!(!lie_chi_vanishes(&tail, 4).unwrap());
    let good = SuperWeight::from_parts(vec![-1, 1], vec![-2, 0, 1], vec![2]).unwrap();
    assert!(condition_a(&good) && lie_chi_vanishes(&good, 4).unwrap());
}

#[test]
fn relevance_agrees_small() {
    let r = run_relevance_stab(&params(1, 3, 1, 0)).unwrap();
    assert!(r.pass, "{:?}", r.failures);
    assert_eq!(r.assumptions.len(), 3);
}

#[test]
fn config_suite_passes() {
    let r = run_config(&params(2, 4, 0, 50)).unwrap();
    assert!(r.pass, "{:?}", r.failures);
}

#[test]
fn reports_are_deterministic() {
    let p = params(1, 3, 1, 3);
    let a = serde_json::to_string(&run_suite("roundtrip", &p).unwrap()).unwrap();
    let b = serde_json::to_string(&run_suite("roundtrip", &p).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(!a.contains("elapsed"));
}

#[test]
fn unknown_suite() {
    assert!(matches!(run_suite("nope", &params(1, 2, 0, 1)), Err(Error::UnknownSuite(_))));
}
