use sgo_core::laurent::{with_precision_retry, DEFAULT_PRECISION};
use sgo_core::loopmat::{d_matrix, det, in_arc_group, same_lattice, sample, GroupPattern, LoopMatrix, PatternTag};
use sgo_core::orbits::{canonical_rep_g, canonical_rep_n, classify, classify_point, classify_staged, semi_infinite_weight, stratum_b, OrbitPoint};
use sgo_core::superroots::{is_orbit_index, leq, orbit_weights, SuperWeight};
use sgo_core::{Error, TruncatedSeries, Valuation};

fn w(lambda: &[i64], theta: &[i64], theta_prime: &[i64]) -> SuperWeight {
    SuperWeight::from_parts(lambda.to_vec(), theta.to_vec(), theta_prime.to_vec()).unwrap()
}

fn t(e: i64) -> TruncatedSeries {
    TruncatedSeries::t_pow(e)
}

fn z() -> TruncatedSeries {
    TruncatedSeries::zero()
}

fn perturbed(wt: &SuperWeight, seed: u64) -> LoopMatrix {
    let (m, n) = (wt.m, wt.n);
    let h = sample(&GroupPattern::new(PatternTag::HPattern(m, n)).with_degree(6), seed);
    let k = sample(&GroupPattern::new(PatternTag::ArcGL(n)).with_degree(6), seed ^ 0x9e37_79b9);
    h.mul(&canonical_rep_n(wt)).mul(&k)
}

fn classify_truncated(a: &LoopMatrix, m: usize, n: usize) -> sgo_core::Result<SuperWeight> {
    with_precision_retry(DEFAULT_PRECISION, |p| classify(&a.truncate(p), m, n))
}

#[test]
fn canonical_rep_of_zero_has_unit_row() {
    let a = canonical_rep_n(&SuperWeight::zero(2, 4));
    let expect = LoopMatrix::new(4, vec![t(0), z(), z(), z(), z(), t(0), z(), z(), t(0), t(0), t(0), z(), z(), z(), z(), t(0)]);
    assert_eq!(a, expect);
}

#[test]
fn canonical_rep_small_case() {
    let a = canonical_rep_n(&w(&[1], &[0, 1], &[]));
    assert_eq!(a, LoopMatrix::new(2, vec![t(1), z(), t(0), t(1)]));
}

#[test]
fn canonical_rep_determinant_valuation() {
    for wt in orbit_weights(2, 4, 1).unwrap().iter().step_by(7) {
        let expect = wt.lambda.iter().zip(&wt.theta).map(|(a, b)| a + b).sum::<i64>() + wt.theta[2] + wt.theta_prime.iter().sum::<i64>();
        assert_eq!(det(&canonical_rep_n(wt)).val(), Valuation::Finite(expect));
    }
}

#[test]
fn canonical_rep_g_of_zero_is_identity_and_d() {
    let p = canonical_rep_g(&SuperWeight::zero(1, 3));
    assert_eq!(p.gr_m.unwrap(), LoopMatrix::identity(1));
    assert_eq!(p.gr_n, d_matrix(1, 3));
}

#[test]
fn classify_is_identity_on_canonical_reps() {
    for (m, n) in [(1, 2), (1, 3), (2, 3), (2, 4)] {
        for wt in orbit_weights(m, n, 2).unwrap() {
            assert_eq!(classify(&canonical_rep_n(&wt), m, n).unwrap(), wt);
        }
    }
}

#[test]
fn classify_canonical_point_in_product_form() {
    for wt in orbit_weights(1, 3, 2).unwrap() {
        assert_eq!(classify_point(&canonical_rep_g(&wt), 1, 3, 24).unwrap(), wt);
    }
}

#[test]
fn classify_recovers_weight_after_group_action() {
    for (m, n) in [(1, 2), (1, 3), (2, 3), (2, 4)] {
        let ws = orbit_weights(m, n, 2).unwrap();
        for (i, wt) in ws.iter().enumerate().step_by(11) {
            for seed in 0..3u64 {
                let a = perturbed(wt, 1000 * i as u64 + seed);
                assert_eq!(classify_truncated(&a, m, n).unwrap(), *wt, "{wt:?} seed {seed}");
            }
        }
    }
}

#[test]
fn staged_reduction_agrees_with_invariants() {
    for (m, n) in [(1, 3), (2, 4)] {
        let ws = orbit_weights(m, n, 1).unwrap();
        for (i, wt) in ws.iter().enumerate().step_by(5) {
            let a = perturbed(wt, i as u64);
            assert_eq!(classify_staged(&a, m, n, 96).unwrap(), *wt);
        }
    }
}

#[test]
fn trailing_block_perturbation_recovers_theta_prime() {
    let wt = w(&[0], &[-1, 0], &[1, 2]);
    let u = sample(&GroupPattern::new(PatternTag::LowerUnipotent(4)).with_degree(4).with_pole_bound(0), 3);
    let a = canonical_rep_n(&wt).mul(&u.transpose());
    assert_eq!(classify(&a, 1, 4).unwrap().theta_prime, vec![1, 2]);
}

#[test]
fn distinct_weights_never_share_an_orbit() {
    let ws = orbit_weights(1, 3, 2).unwrap();
    let got: Vec<SuperWeight> = ws.iter().map(|x| classify(&canonical_rep_n(x), 1, 3).unwrap()).collect();
    let mut sorted = got.clone();
    sorted.sort_by_key(|x| x.flat());
    sorted.dedup();
    assert_eq!(sorted.len(), ws.len());
}

#[test]
fn classify_rejects_singular_input() {
    let a = LoopMatrix::zero(3);
    assert_eq!(classify(&a, 1, 3), Err(Error::Singular));
}

#[test]
fn semi_infinite_weight_of_canonical_point_is_exact() {
    for (m, n) in [(1, 3), (2, 4)] {
        for wt in orbit_weights(m, n, 1).unwrap() {
            assert_eq!(semi_infinite_weight(&canonical_rep_g(&wt), m, n).unwrap(), wt);
        }
    }
}

#[test]
fn semi_infinite_weight_construction_oracle() {
    let (m, n) = (1, 3);
    for seed in 0..20u64 {
        let target = SuperWeight::from_flat(m, n, &[seed as i64 % 3 - 1, 1, -2, seed as i64 % 2]);
        let u = sample(&GroupPattern::new(PatternTag::UpperUnipotent(n)).with_degree(4), seed);
        let xi: Vec<i64> = target.lambda.iter().map(|x| -x).collect();
        let p = OrbitPoint { gr_m: Some(LoopMatrix::diag_t(&xi)), gr_n: d_matrix(m, n).mul(&u).mul(&LoopMatrix::diag_t(&target.epsilon())) };
        assert_eq!(semi_infinite_weight(&p, m, n).unwrap(), target);
    }
}

#[test]
fn semi_infinite_weight_is_lattice_invariant() {
    let (m, n) = (2, 4);
    for seed in 0..20u64 {
        let ws = orbit_weights(m, n, 1).unwrap();
        let wt = &ws[(seed as usize * 13) % ws.len()];
        let p = canonical_rep_g(wt);
        let km = sample(&GroupPattern::new(PatternTag::ArcGL(m)).with_degree(5), seed);
        let kn = sample(&GroupPattern::new(PatternTag::ArcGL(n)).with_degree(5), seed + 99);
        let q = p.right_mul(&km, &kn);
        assert_eq!(semi_infinite_weight(&q, m, n).unwrap(), semi_infinite_weight(&p, m, n).unwrap());
    }
}

#[test]
fn semi_infinite_weight_is_bounded_by_orbit_weight() {
    let (m, n) = (1, 3);
    let ws = orbit_weights(m, n, 1).unwrap();
    for (i, wt) in ws.iter().enumerate() {
        let seed = i as u64;
        let g = sample(&GroupPattern::new(PatternTag::LowerUnipotent(m.max(1))).with_degree(3), seed);
        let u = sample(&GroupPattern::new(PatternTag::UminusMN(m, n)).with_degree(3), seed + 1);
        let lift = LoopMatrix::block_diag(&g, &LoopMatrix::identity(n - m));
        let p0 = canonical_rep_g(wt);
        let p = OrbitPoint { gr_m: p0.gr_m.as_ref().map(|x| g.mul(x)), gr_n: lift.mul(&u).mul(&p0.gr_n) };
        let s = semi_infinite_weight(&p, m, n).unwrap();
        assert!(leq(&s, wt).unwrap(), "{s:?} vs {wt:?}");
        assert_eq!(classify_point(&p, m, n, 96).unwrap(), *wt);
    }
}

#[test]
fn stratum_b_empty_when_last_row_is_corner_only() {
    let a = LoopMatrix::new(3, vec![t(0), z(), z(), t(1), t(0), z(), z(), z(), t(-2)]);
    let s = stratum_b(&a, 24).unwrap();
    assert!(s.j_seq.is_empty() && s.i_seq.is_empty());
    assert_eq!(s.eta_prime_1, 2);
}

#[test]
fn stratum_b_single_pivot() {
    let a = LoopMatrix::new(3, vec![t(0), z(), z(), z(), t(0), z(), t(0), z(), t(3)]);
    let s = stratum_b(&a, 24).unwrap();
    assert_eq!((s.j_seq, s.i_seq, s.eta_prime_1), (vec![1], vec![0], -3));
}

#[test]
fn stratum_b_keeps_only_strict_right_to_left_minima() {
    // last row valuations (1, -1, 0 | 2): columns 3 and 2 survive, column 1 is cleared.
    let a = LoopMatrix::new(4, vec![
        t(0), z(), z(), z(),
        z(), t(0), z(), z(),
        z(), z(), t(0), z(),
        t(1), t(-1), t(0), t(2),
    ]);
    let s = stratum_b(&a, 24).unwrap();
    assert_eq!(s.j_seq, vec![3, 2]);
    assert_eq!(s.i_seq, vec![0, -1]);
}

#[test]
fn stratum_b_invariant_under_lower_triangular_clearing() {
    let base = LoopMatrix::new(4, vec![
        t(1), z(), z(), z(),
        t(-1), t(0), z(), z(),
        z(), t(2), t(-1), z(),
        t(2), t(-1), t(0), t(1),
    ]);
    let s0 = stratum_b(&base, 48).unwrap();
    for seed in 0..30u64 {
        let l = sample(&GroupPattern::new(PatternTag::LowerUnipotent(4)).with_degree(4).with_pole_bound(0), seed);
        let d = sample(&GroupPattern::new(PatternTag::ArcTorus(4)).with_degree(4), seed);
        let k = sample(&GroupPattern::new(PatternTag::ArcGL(4)).with_degree(3), seed);
        assert_eq!(stratum_b(&base.mul(&l).mul(&d), 48).unwrap(), s0);
        assert_eq!(stratum_b(&base.mul(&k), 96).unwrap(), s0);
    }
}

#[test]
fn stratum_b_needs_room() {
    assert!(matches!(stratum_b(&LoopMatrix::identity(2), 24), Err(Error::PatternMismatch(_))));
}

#[test]
fn orbit_weights_are_orbit_indices() {
    assert!(orbit_weights(2, 4, 1).unwrap().iter().all(is_orbit_index));
}

#[test]
fn samples_from_arc_pattern_are_in_arc_group() {
    let k = sample(&GroupPattern::new(PatternTag::ArcGL(3)), 5);
    assert!(in_arc_group(&k).unwrap());
    assert!(same_lattice(&canonical_rep_n(&SuperWeight::zero(1, 3)), &d_matrix(1, 3), 24).unwrap());
}
