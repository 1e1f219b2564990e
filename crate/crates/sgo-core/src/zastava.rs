//! Dimension counts for open Zastava components and orbit intersections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::Valuation;
use crate::loopmat::{minor_min_valuation, LoopMatrix};
use crate::orbits::canonical_rep_n;
use crate::superroots::{composite_decompose, decompose, leq, CompositeCoeffs, RootVector, SuperWeight};

/// Odd coefficients count once, even ones twice.
pub fn zastava_dim(n: &RootVector) -> Result<i64> {
    if !n.is_nonnegative() {
        return Err(Error::NegativeCoefficient);
    }
    let split = 2 * n.m;
    Ok(n.coeffs[..split].iter().sum::<i64>() + 2 * n.coeffs[split..].iter().sum::<i64>())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReport {
    pub zastava_dim: i64,
    pub bound: i64,
    pub witnesses: Vec<SuperWeight>,
}

fn difference(w_o: &SuperWeight, w_s: &SuperWeight) -> Result<RootVector> {
    if !leq(w_s, w_o)? {
        return Err(Error::NotComparable);
    }
    Ok(decompose(w_o, w_s)?.expect("leq implies a decomposition"))
}

/// Maximum of Σa + Σb + Σc over intermediate weights ŵ with
/// `w_S ≤_G ŵ ≤ w_O`, by enumeration.
///
/// The GL_N roots past the odd block touch only their own simple root, so
/// they always take their full coefficient; the overlapping odd pairs are
/// enumerated.
pub fn intersection_dim_bound(w_o: &SuperWeight, w_s: &SuperWeight) -> Result<DimReport> {
    let n = difference(w_o, w_s)?;
    let m = n.m;
    let pairs = 2 * m - 1;
    let tail: Vec<i64> = n.coeffs[2 * m..].to_vec();
    let tail_sum: i64 = tail.iter().sum();

    let mut best = -1;
    let mut winners: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![0i64; pairs];
    // Pair p covers odd indices p and p+1 (0-based); their sum is capped by n.
    fn walk(p: usize, cur: &mut Vec<i64>, n: &[i64], best: &mut i64, winners: &mut Vec<Vec<i64>>) {
        if p == cur.len() {
            let total: i64 = cur.iter().sum();
            if total > *best {
                *best = total;
                winners.clear();
            }
            if total == *best {
                winners.push(cur.clone());
            }
            return;
        }
        let left = if p == 0 { 0 } else { cur[p - 1] };
        let cap = (n[p] - left).min(n[p + 1]);
        for x in 0..=cap {
            cur[p] = x;
            walk(p + 1, cur, n, best, winners);
        }
        cur[p] = 0;
    }
    walk(0, &mut cur, &n.coeffs, &mut best, &mut winners);

    let mut witnesses: Vec<SuperWeight> = winners
        .into_iter()
        .map(|x| {
            let cc = CompositeCoeffs {
                a: x.iter().skip(1).step_by(2).copied().collect(),
                b: x.iter().step_by(2).copied().collect(),
                c: tail.clone(),
            };
            w_s.add(&cc.to_root_vector(m, n.n).to_weight()).expect("same rank")
        })
        .collect();
    witnesses.sort();
    Ok(DimReport { zastava_dim: zastava_dim(&n)?, bound: best + tail_sum, witnesses })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cor813 {
    /// The difference is a nonnegative combination of composite roots.
    Even(CompositeCoeffs),
    /// One odd simple root (1-based index) plus a composite combination.
    OddPlusAlpha(usize, CompositeCoeffs),
    Neither,
}

pub fn cor813_classify(w_o: &SuperWeight, w_s: &SuperWeight) -> Result<Cor813> {
    let n = difference(w_o, w_s)?;
    if let Some(cc) = composite_decompose(&n) {
        return Ok(Cor813::Even(cc));
    }
    for i in 1..=2 * n.m {
        if n.coeffs[i - 1] == 0 {
            continue;
        }
        let rest = n.sub(&RootVector::simple(n.m, n.n, i));
        if let Some(cc) = composite_decompose(&rest) {
            return Ok(Cor813::OddPlusAlpha(i, cc));
        }
    }
    Ok(Cor813::Neither)
}

/// The clauses of the equality criterion for a 𝔅 stratum with `N = M + 2`.
///
/// `eta` has length M+1, `xi` length M; `j_seq` holds `j_1 > … > j_k`
/// (1-based, at most M+1) and `i_seq` holds `i_1 > … > i_k` with `i_k = 0`
/// and `i_1 < −η′_1`.
pub fn prop942_check(eta: &[i64], eta_prime_1: i64, j_seq: &[usize], i_seq: &[i64], xi: &[i64]) -> Result<bool> {
    let bad = |msg: &str| Err(Error::MalformedSequences(msg.to_string()));
    if eta.is_empty() || xi.len() + 1 != eta.len() {
        return bad("eta must have length M+1 and xi length M");
    }
    if j_seq.len() != i_seq.len() {
        return bad("j and i sequences differ in length");
    }
    if j_seq.iter().any(|&j| j == 0 || j > eta.len()) {
        return bad("j indices must lie in 1..=M+1");
    }
    if j_seq.windows(2).any(|w| w[0] <= w[1]) || i_seq.windows(2).any(|w| w[0] <= w[1]) {
        return bad("sequences must be strictly decreasing");
    }
    if let Some(&last) = i_seq.last() {
        if last != 0 {
            return bad("the last i must be 0");
        }
        if i_seq[0] >= -eta_prime_1 {
            return bad("i_1 must be below -eta'_1");
        }
    }
    if xi.iter().any(|&x| x != 0) {
        return Ok(false);
    }
    let mut expected = vec![0i64; eta.len()];
    for (l, (&j, &i)) in j_seq.iter().zip(i_seq).enumerate() {
        let gap = if l == 0 { i + eta_prime_1 } else { i - i_seq[l - 1] };
        expected[j - 1] = -gap;
    }
    Ok(expected == eta)
}

/// Minimal minor valuations of 𝕃_w on the nested row sets
/// `{1..i}` (i ≤ M), `{1..i, M+1}` (i ≤ M) and `{1..M+1+i}`, read off the
/// matrix rather than from any formula in the weight.
pub fn minor_profile(w: &SuperWeight) -> Result<Vec<i64>> {
    profile_of(&canonical_rep_n(w), w.m)
}

fn profile_of(a: &LoopMatrix, m: usize) -> Result<Vec<i64>> {
    let n = a.n();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for i in 1..=m {
        sets.push((0..i).collect());
    }
    for i in 0..=m {
        let mut s: Vec<usize> = (0..i).collect();
        s.push(m);
        sets.push(s);
    }
    for i in 1..n - m {
        sets.push((0..m + 1 + i).collect());
    }
    sets.iter()
        .map(|rows| match minor_min_valuation(a, rows)? {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(Error::Singular),
            Valuation::Unknown(_) => Err(Error::InsufficientPrecision),
        })
        .collect()
}

/// The closure order as inequalities between minimal minor valuations:
/// every profile entry of `w̃` is at most that of `w`, with equal
/// determinants.
pub fn closure_predicate(w: &SuperWeight, w_tilde: &SuperWeight) -> Result<bool> {
    Ok(profile_leq(&minor_profile(w)?, &minor_profile(w_tilde)?))
}

/// [`closure_predicate`] on precomputed profiles.
pub fn profile_leq(p: &[i64], p_tilde: &[i64]) -> bool {
    p.last() == p_tilde.last() && p.iter().zip(p_tilde).all(|(a, b)| b <= a)
}
