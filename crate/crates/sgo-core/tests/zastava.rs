use sgo_core::superroots::{composite_decompose, decompose, leq, orbit_weights, CompositeCoeffs, RootVector, SuperWeight};
use sgo_core::zastava::{closure_predicate, cor813_classify, intersection_dim_bound, minor_profile, prop942_check, profile_leq, zastava_dim, Cor813};
use sgo_core::Error;

fn rv(m: usize, n: usize, c: &[i64]) -> RootVector {
    RootVector::new(m, n, c.to_vec()).unwrap()
}

fn above(base: &SuperWeight, r: &RootVector) -> SuperWeight {
    base.add(&r.to_weight()).unwrap()
}

#[test]
fn zastava_dim_examples() {
    assert_eq!(zastava_dim(&rv(1, 3, &[1, 0, 0])), Ok(1));
    assert_eq!(zastava_dim(&rv(1, 3, &[0, 0, 1])), Ok(2));
    assert_eq!(zastava_dim(&RootVector::zero(1, 3)), Ok(0));
    assert_eq!(zastava_dim(&rv(1, 3, &[0, -1, 0])), Err(Error::NegativeCoefficient));
}

#[test]
fn zastava_dim_of_simple_roots() {
    for n in 2..=6 {
        for m in 1..n.min(4) {
            for i in 1..m + n {
                let want = if i <= 2 * m { 1 } else { 2 };
                assert_eq!(zastava_dim(&RootVector::simple(m, n, i)).unwrap(), want);
            }
        }
    }
}

#[test]
fn bound_of_equal_weights_is_zero() {
    let w = SuperWeight::from_parts(vec![1], vec![0, 2], vec![1]).unwrap();
    let r = intersection_dim_bound(&w, &w).unwrap();
    assert_eq!((r.bound, r.zastava_dim, r.witnesses), (0, 0, vec![w]));
}

#[test]
fn bound_one_even_pair() {
    let ws = SuperWeight::zero(1, 2);
    let wo = above(&ws, &rv(1, 2, &[1, 1]));
    let r = intersection_dim_bound(&wo, &ws).unwrap();
    assert_eq!((r.bound, r.zastava_dim, r.witnesses), (1, 2, vec![wo]));
}

#[test]
fn bound_single_odd_root() {
    let ws = SuperWeight::zero(1, 3);
    let r = intersection_dim_bound(&above(&ws, &RootVector::simple(1, 3, 1)), &ws).unwrap();
    assert_eq!((r.bound, r.zastava_dim), (0, 1));
    assert_eq!(r.witnesses, vec![ws]);
}

#[test]
fn bound_needs_comparable_weights() {
    let ws = SuperWeight::zero(1, 3);
    let wo = ws.sub(&RootVector::simple(1, 3, 2).to_weight()).unwrap();
    assert_eq!(intersection_dim_bound(&wo, &ws).map(|r| r.bound), Err(Error::NotComparable));
    assert_eq!(cor813_classify(&wo, &ws), Err(Error::NotComparable));
}

#[test]
fn even_odd_dichotomy_examples() {
    let ws = SuperWeight::zero(2, 4);
    let gl_m = rv(2, 4, &[0, 1, 1, 0, 0]);
    assert!(matches!(cor813_classify(&above(&ws, &gl_m), &ws).unwrap(), Cor813::Even(_)));
    let odd = rv(2, 4, &[2, 1, 0, 0, 0]);
    match cor813_classify(&above(&ws, &odd), &ws).unwrap() {
        Cor813::OddPlusAlpha(1, cc) => assert_eq!(cc, CompositeCoeffs { a: vec![0], b: vec![1, 0], c: vec![0] }),
        other => panic!("{other:?}"),
    }
    assert_eq!(cor813_classify(&above(&ws, &rv(2, 4, &[3, 0, 0, 0, 0])), &ws).unwrap(), Cor813::Neither);
}

/// Every coefficient vector in `[0, 2]^{M+N−1}`.
fn coefficient_box(m: usize, n: usize) -> Vec<RootVector> {
    let len = m + n - 1;
    (0..3usize.pow(len as u32))
        .map(|mut k| {
            let mut c = vec![0; len];
            for x in &mut c {
                *x = (k % 3) as i64;
                k /= 3;
            }
            rv(m, n, &c)
        })
        .collect()
}

#[test]
fn dichotomy_over_coefficient_box() {
    for (m, n) in [(1, 3), (2, 4)] {
        let ws = SuperWeight::zero(m, n);
        for r in coefficient_box(m, n) {
            let wo = above(&ws, &r);
            let rep = intersection_dim_bound(&wo, &ws).unwrap();
            assert!(2 * rep.bound <= rep.zastava_dim);
            let class = cor813_classify(&wo, &ws).unwrap();
            if 2 * rep.bound == rep.zastava_dim {
                assert!(matches!(class, Cor813::Even(_)), "{r:?}");
            }
            if 2 * rep.bound + 1 == rep.zastava_dim {
                assert!(matches!(class, Cor813::OddPlusAlpha(..)), "{r:?}");
            }
            if let Cor813::Even(cc) = &class {
                assert_eq!(composite_decompose(&r).as_ref(), Some(cc));
            }
        }
    }
}

#[test]
fn witnesses_attain_the_bound() {
    let ws = SuperWeight::zero(2, 4);
    let wo = above(&ws, &rv(2, 4, &[1, 2, 1, 2, 1]));
    let rep = intersection_dim_bound(&wo, &ws).unwrap();
    for h in &rep.witnesses {
        let cc = composite_decompose(&decompose(h, &ws).unwrap().unwrap()).unwrap();
        assert_eq!(cc.total(), rep.bound);
        assert!(leq(h, &wo).unwrap());
    }
}

#[test]
fn stratum_equality_examples() {
    assert_eq!(prop942_check(&[0, 0, 0], 0, &[], &[], &[0, 0]), Ok(true));
    assert_eq!(prop942_check(&[0, -2, 0], -2, &[2], &[0], &[0, 0]), Ok(false));
    assert_eq!(prop942_check(&[0, 2, 0], -2, &[2], &[0], &[0, 0]), Ok(true));
    assert_eq!(prop942_check(&[0, 0, 0], 0, &[], &[], &[1, 0]), Ok(false));
}

#[test]
fn stratum_equality_chain_holds() {
    // η′_1 = −3 and i = (2, 0):
    // −η_{j_1} = i_1 + η′_1 = 2 − 3 = −1, −η_{j_2} = i_2 − i_1 = −2.
    assert_eq!(prop942_check(&[2, 0, 1], -3, &[3, 1], &[2, 0], &[0, 0]), Ok(true));
    assert_eq!(prop942_check(&[2, 1, 1], -3, &[3, 1], &[2, 0], &[0, 0]), Ok(false));
}

#[test]
fn stratum_equality_rejects_malformed_sequences() {
    let bad = |r: sgo_core::Result<bool>| matches!(r, Err(Error::MalformedSequences(_)));
    assert!(bad(prop942_check(&[0, 0, 0], 0, &[1, 2], &[1, 0], &[0, 0])));
    assert!(bad(prop942_check(&[0, 0, 0], 0, &[2, 1], &[1, 1], &[0, 0])));
    assert!(bad(prop942_check(&[0, 0, 0], -5, &[2], &[1], &[0, 0])));
    assert!(bad(prop942_check(&[0, 0, 0], 0, &[4], &[0], &[0, 0])));
    assert!(bad(prop942_check(&[0, 0], 0, &[], &[], &[0, 0])));
}

#[test]
fn profile_of_zero_weight() {
    assert_eq!(minor_profile(&SuperWeight::zero(2, 4)).unwrap(), vec![0, 0, 0, 0, 0, 0]);
}

#[test]
fn closure_predicate_agrees_with_root_order() {
    for (m, n) in [(1, 2), (1, 3), (2, 3)] {
        let ws = orbit_weights(m, n, 1).unwrap();
        let profiles: Vec<Vec<i64>> = ws.iter().map(|w| minor_profile(w).unwrap()).collect();
        for (a, pa) in ws.iter().zip(&profiles) {
            for (b, pb) in ws.iter().zip(&profiles) {
                assert_eq!(profile_leq(pa, pb), leq(a, b).unwrap(), "{a:?} {b:?}");
            }
        }
    }
}

#[test]
fn closure_predicate_reflexive_and_degree_sensitive() {
    let w = SuperWeight::from_parts(vec![0, 1], vec![-1, 0, 0], vec![2]).unwrap();
    assert!(closure_predicate(&w, &w).unwrap());
    let shifted = SuperWeight::from_parts(vec![0, 1], vec![-1, 0, 0], vec![1]).unwrap();
    assert!(!closure_predicate(&w, &shifted).unwrap() && !closure_predicate(&shifted, &w).unwrap());
}
