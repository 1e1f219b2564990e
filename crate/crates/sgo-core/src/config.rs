//! Λ-colored divisors with a marked point, and the integer bookkeeping of
//! the factorizable line bundle and of the stalks of the factorization
//! algebra.
//!
//! Points are opaque tokens; only collisions and the marked point matter.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::superroots::{check_rank, decompose, parity, Parity, RootVector, SuperWeight};

/// The reserved identifier of the marked point.
pub const MARKED: &str = "c";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredDivisor {
    pub m: usize,
    pub n: usize,
    points: BTreeMap<String, SuperWeight>,
}

/// `Some(n)` with `w = −Σ n_i α_i`, `n ≥ 0`.
fn negative_root_coeffs(w: &SuperWeight) -> Option<RootVector> {
    decompose(&SuperWeight::zero(w.m, w.n), w).ok().flatten().filter(|r| r.is_nonnegative())
}

impl ColoredDivisor {
    pub fn empty(m: usize, n: usize) -> Result<Self> {
        check_rank(m, n)?;
        Ok(ColoredDivisor { m, n, points: BTreeMap::new() })
    }

    /// Adds `coeff·x`; zero coefficients are dropped.
    pub fn with_point(mut self, id: &str, coeff: SuperWeight) -> Result<Self> {
        if (coeff.m, coeff.n) != (self.m, self.n) {
            return Err(Error::RankMismatch);
        }
        if self.points.contains_key(id) {
            return Err(Error::OverlappingSupport);
        }
        if id != MARKED && negative_root_coeffs(&coeff).is_none() {
            return Err(Error::InvariantViolation(format!("coefficient at {id} is not in the negative root lattice")));
        }
        if coeff != SuperWeight::zero(self.m, self.n) {
            self.points.insert(id.to_string(), coeff);
        }
        Ok(self)
    }

    /// Adds `(−Σ n_i α_i)·x`.
    pub fn with_root(self, id: &str, n: &RootVector) -> Result<Self> {
        if !n.is_nonnegative() {
            return Err(Error::NegativeCoefficient);
        }
        let w = n.to_weight().neg();
        self.with_point(id, w)
    }

    pub fn points(&self) -> &BTreeMap<String, SuperWeight> {
        &self.points
    }

    pub fn support(&self) -> BTreeSet<String> {
        self.points.keys().cloned().collect()
    }

    pub fn marked(&self) -> Option<&SuperWeight> {
        self.points.get(MARKED)
    }

    pub fn degree(&self) -> SuperWeight {
        self.points.values().fold(SuperWeight::zero(self.m, self.n), |acc, w| acc.add(w).expect("ranks checked on insertion"))
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::RankMismatch);
        }
        if let (Some(a), Some(b)) = (self.marked(), other.marked()) {
            if negative_root_coeffs(a).is_none() && negative_root_coeffs(b).is_none() {
                return Err(Error::InvariantViolation("both summands carry a general coefficient at the marked point".into()));
            }
        }
        let mut points = self.points.clone();
        for (id, w) in &other.points {
            let sum = match points.get(id) {
                Some(v) => v.add(w)?,
                None => w.clone(),
            };
            if id != MARKED && negative_root_coeffs(&sum).is_none() {
                return Err(Error::InvariantViolation(format!("coefficient at {id} left the negative root lattice")));
            }
            if sum == SuperWeight::zero(self.m, self.n) {
                points.remove(id);
            } else {
                points.insert(id.clone(), sum);
            }
        }
        Ok(ColoredDivisor { m: self.m, n: self.n, points })
    }

    /// Every unmarked coefficient is a single negative simple root.
    pub fn is_open_stratum(&self) -> bool {
        self.points.iter().filter(|(id, _)| id.as_str() != MARKED).all(|(_, w)| {
            negative_root_coeffs(w).is_some_and(|r| r.coeffs.iter().sum::<i64>() == 1)
        })
    }

    pub fn line_bundle_exponents(&self) -> BTreeMap<String, i64> {
        self.points.iter().map(|(id, w)| (id.clone(), point_exponent(w))).collect()
    }

    pub fn to_json(&self) -> DivisorJson {
        DivisorJson { points: self.points.clone() }
    }

    pub fn from_json(j: DivisorJson) -> Result<Self> {
        let Some(first) = j.points.values().next() else {
            return Err(Error::Parse("a divisor file needs at least one point to fix (M, N)".into()));
        };
        let mut d = Self::empty(first.m, first.n)?;
        for (id, w) in j.points {
            d = d.with_point(&id, w)?;
        }
        Ok(d)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DivisorJson {
    pub points: BTreeMap<String, SuperWeight>,
}

/// Paper index `i ∈ {M+2, …, N}` of the stored θ′/η′ slot `s` (1-based).
pub fn eta_prime_index(m: usize, s: usize) -> usize {
    s + m + 1
}

/// Exponent of ω_x for a single coefficient (ξ, (η, η′)).
pub fn point_exponent(w: &SuperWeight) -> i64 {
    let xi: i64 = w.lambda.iter().map(|&x| -x * (x - 1) / 2).sum();
    let eta: i64 = w.theta.iter().map(|&x| x * (x + 1) / 2).sum();
    let eta_prime: i64 = w
        .theta_prime
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let i = eta_prime_index(w.m, k + 1) as i64;
            x * (x + 2 * (i - w.m as i64 - 1) + 1) / 2
        })
        .sum();
    xi + eta + eta_prime
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StalkParity {
    /// Perverse constant local system (odd simple root).
    Constant,
    /// Perverse sign local system (even simple root).
    Sign,
}

pub fn stalk_parity(alpha: &RootVector) -> Result<StalkParity> {
    let support = alpha.support();
    let [i] = support.as_slice() else {
        return Err(Error::MixedSupport);
    };
    Ok(match parity(alpha.m, *i) {
        Parity::Odd => StalkParity::Constant,
        Parity::Even => StalkParity::Sign,
    })
}

/// The exponents of `D1 + D2` are the union of the separate exponents.
pub fn factorization_exponent_check(d1: &ColoredDivisor, d2: &ColoredDivisor) -> Result<bool> {
    if !d1.support().is_disjoint(&d2.support()) {
        return Err(Error::OverlappingSupport);
    }
    let sum = d1.add(d2)?.line_bundle_exponents();
    let mut union = d1.line_bundle_exponents();
    union.extend(d2.line_bundle_exponents());
    Ok(sum == union)
}

/// Two negative simple roots whose exponents do not add when the points
/// collide, witnessing that factorization needs disjoint supports.
pub fn collision_counterexample(m: usize, n: usize) -> Result<Option<(usize, usize)>> {
    check_rank(m, n)?;
    for i in 1..m + n {
        for j in i..m + n {
            let a = RootVector::simple(m, n, i).to_weight().neg();
            let b = RootVector::simple(m, n, j).to_weight().neg();
            let merged = point_exponent(&a.add(&b)?);
            if merged != point_exponent(&a) + point_exponent(&b) {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}
