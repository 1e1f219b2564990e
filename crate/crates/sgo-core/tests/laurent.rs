use proptest::prelude::*;
use sgo_core::laurent::{with_precision_retry, LaurentScalar, TruncatedSeries, Valuation};
use sgo_core::{Error, Rational};

fn series(terms: &[(i64, i64)], prec: Option<i64>) -> TruncatedSeries {
    TruncatedSeries::new(LaurentScalar::from_terms(terms.iter().map(|&(e, c)| (e, Rational::from_int(c)))), prec)
}

fn exact(terms: &[(i64, i64)]) -> TruncatedSeries {
    series(terms, None)
}

#[test]
fn add_cancels() {
    assert_eq!(exact(&[(-1, 1), (1, 1)]).add(&exact(&[(1, -1)])), exact(&[(-1, 1)]));
}

#[test]
fn add_takes_min_precision() {
    let s = series(&[(0, 1)], Some(3)).add(&series(&[(5, 1)], Some(4)));
    assert_eq!(s, series(&[(0, 1)], Some(3)));
    assert_eq!(s.precision(), Some(3));
}

#[test]
fn mul_examples() {
    assert_eq!(exact(&[(2, 1)]).mul(&exact(&[(-1, 1)])), exact(&[(1, 1)]));
    assert_eq!(exact(&[(0, 1), (1, 1)]).mul(&exact(&[(0, 1), (1, -1)])), exact(&[(0, 1), (2, -1)]));
}

#[test]
fn mul_precision_rule() {
    let a = series(&[(1, 2)], Some(5));
    let b = series(&[(-2, 1), (0, 3)], Some(4));
    // min(val(a) + P_b, val(b) + P_a) = min(1 + 4, −2 + 5) = 3
    assert_eq!(a.mul(&b).precision(), Some(3));
    assert_eq!(TruncatedSeries::zero().mul(&a), TruncatedSeries::zero());
}

#[test]
fn valuations() {
    assert_eq!(exact(&[(-3, 1), (2, 1)]).val(), Valuation::Finite(-3));
    assert_eq!(TruncatedSeries::zero().val(), Valuation::Infinite);
    assert_eq!(TruncatedSeries::zero_mod(5).val(), Valuation::Unknown(5));
}

#[test]
fn invert_examples() {
    assert_eq!(exact(&[(1, 1)]).invert(4).unwrap(), exact(&[(-1, 1)]));
    let inv = exact(&[(0, 1), (1, 1)]).invert(3).unwrap();
    assert_eq!(inv, series(&[(0, 1), (1, -1), (2, 1)], Some(3)));
    assert_eq!(TruncatedSeries::zero().invert(4), Err(Error::ZeroDivisor));
    assert_eq!(TruncatedSeries::zero_mod(2).invert(4), Err(Error::InsufficientPrecision));
}

#[test]
fn residue_examples() {
    assert_eq!(exact(&[(-1, 3), (0, 1)]).residue().unwrap(), Rational::from_int(3));
    assert_eq!(exact(&[(2, 1)]).residue().unwrap(), Rational::ZERO);
    assert_eq!(exact(&[(-2, 1)]).residue().unwrap(), Rational::ZERO);
    assert_eq!(series(&[(-3, 1)], Some(-1)).residue(), Err(Error::InsufficientPrecision));
}

#[test]
fn rational_coefficients_stay_exact() {
    let half = TruncatedSeries::monomial(Rational::new(1, 2), 0);
    let third = TruncatedSeries::monomial(Rational::new(-1, 3), 1);
    let s = half.add(&third).mul(&half.sub(&third));
    assert_eq!(s.poly().coeff(2), Rational::new(-1, 9));
    assert_eq!(s.poly().coeff(0), Rational::new(1, 4));
}

#[test]
fn retry_doubles_until_ceiling() {
    let mut seen = Vec::new();
    let r: sgo_core::Result<()> = with_precision_retry(24, |p| {
        seen.push(p);
        Err(Error::InsufficientPrecision)
    });
    assert_eq!(r, Err(Error::InsufficientPrecision));
    assert_eq!(seen, vec![24, 48, 96]);
    assert_eq!(with_precision_retry(24, |p| if p < 40 { Err(Error::InsufficientPrecision) } else { Ok(p) }), Ok(48));
}

fn poly() -> impl Strategy<Value = TruncatedSeries> {
    (-4i64..4, prop::collection::vec(-3i64..=3, 1..6)).prop_map(|(lo, c)| {
        exact(&c.iter().enumerate().map(|(k, &x)| (lo + k as i64, x)).collect::<Vec<_>>())
    })
}

fn nonzero() -> impl Strategy<Value = TruncatedSeries> {
    poly().prop_filter("nonzero", |a| !a.is_exact_zero())
}

proptest! {
    #[test]
    fn zero_is_additive_identity(a in poly()) {
        prop_assert_eq!(TruncatedSeries::zero().add(&a), a);
    }

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.sub(&a), TruncatedSeries::zero());
    }

    #[test]
    fn valuation_is_additive(a in nonzero(), b in nonzero()) {
        let (Valuation::Finite(x), Valuation::Finite(y)) = (a.val(), b.val()) else { unreachable!() };
        prop_assert_eq!(a.mul(&b).val(), Valuation::Finite(x + y));
    }

    #[test]
    fn invert_round_trip(a in nonzero(), p in 2i64..12) {
        let inv = a.invert(p).unwrap();
        prop_assert_eq!(inv.val().finite(), a.val().finite().map(|v| -v));
        let prod = a.mul(&inv);
        let q = prod.precision().unwrap_or(i64::MAX).min(p);
        prop_assert!(q >= 1);
        prop_assert_eq!(prod.truncate(q), TruncatedSeries::one().truncate(q));
    }

    #[test]
    fn mul_sub_matches_definition(a in poly(), b in poly(), f in poly(), g in poly(), pa in 0i64..8) {
        let a = a.truncate(pa);
        prop_assert_eq!(a.mul_sub(&b, &f, &g), a.mul(&b).sub(&f.mul(&g)));
    }
}
