//! Orbits of GL_M(O) ⋉ U⁻_{M,N}(F) on Gr_N and semi-infinite orbits on
//! Gr_M × Gr_N.
//!
//! Classification reads three families of minimal minor valuations, each
//! invariant under the left group and under right GL_N(O):
//!
//! * `D_s`: s×s minors on s of the first M rows,
//! * `E_s`: (s+1)×(s+1) minors on row M+1 and s of the first M rows,
//! * `F_K`: K×K minors on the first K rows, for K > M+1.
//!
//! Right GL_N(O) only takes O-combinations of columns (Cauchy–Binet). The
//! left group mixes the first M rows by GL_M(O) and adds F-multiples of
//! earlier rows to rows below M+1, so every row set above is preserved.
//! On the canonical representative with (λ, θ) dominant these are the
//! partial sums `D_s = Σ_{i≤s}(λ_i+θ_i)`, `E_s = D_s + θ_{s+1}`,
//! `F_{M+1+r} = E_M + Σ_{k≤r} θ′_k`, which inverts to the weight.

use crate::error::{Error, Result};
use crate::laurent::{TruncatedSeries, Valuation};
use crate::loopmat::{self, d_matrix, d_matrix_inv, hermite_pivots, inverse, Bareiss, LoopMatrix, Orientation, PivotRule};
use crate::superroots::{check_rank, is_orbit_index, SuperWeight};

/// A point of Gr_M × Gr_N; a missing first component stands for the identity.
#[derive(Clone, Debug)]
pub struct OrbitPoint {
    pub gr_m: Option<LoopMatrix>,
    pub gr_n: LoopMatrix,
}

impl OrbitPoint {
    pub fn right_mul(&self, k_m: &LoopMatrix, k_n: &LoopMatrix) -> OrbitPoint {
        OrbitPoint { gr_m: self.gr_m.as_ref().map(|g| g.mul(k_m)), gr_n: self.gr_n.mul(k_n) }
    }

    /// The Gr_N representative `diag(gr_M⁻¹, 1)·gr_N` of the same H(F)-orbit.
    pub fn to_gr_n(&self, m: usize, target: i64) -> Result<LoopMatrix> {
        match &self.gr_m {
            None => Ok(self.gr_n.clone()),
            Some(g) => {
                if g.n() != m {
                    return Err(Error::PatternMismatch(format!("Gr_M component must be {m}x{m}")));
                }
                let inv = inverse(g, target)?;
                let lift = LoopMatrix::block_diag(&inv, &LoopMatrix::identity(self.gr_n.n() - m));
                Ok(lift.mul(&self.gr_n))
            }
        }
    }
}

/// 𝕃_w.
pub fn canonical_rep_n(w: &SuperWeight) -> LoopMatrix {
    let (m, n) = (w.m, w.n);
    LoopMatrix::from_fn(n, |i, j| {
        if i < m {
            if i == j {
                TruncatedSeries::t_pow(w.lambda[i] + w.theta[i])
            } else {
                TruncatedSeries::zero()
            }
        } else if i == m {
            if j <= m {
                TruncatedSeries::t_pow(w.theta[j])
            } else {
                TruncatedSeries::zero()
            }
        } else if i == j {
            TruncatedSeries::t_pow(w.theta_prime[i - m - 1])
        } else {
            TruncatedSeries::zero()
        }
    })
}

/// `(t^{−λ}, 𝔇·t^{(θ,θ′)})`.
pub fn canonical_rep_g(w: &SuperWeight) -> OrbitPoint {
    let neg: Vec<i64> = w.lambda.iter().map(|x| -x).collect();
    OrbitPoint {
        gr_m: Some(LoopMatrix::diag_t(&neg)),
        gr_n: d_matrix(w.m, w.n).mul(&LoopMatrix::diag_t(&w.epsilon())),
    }
}

/// The minor-valuation invariants of a Gr_N point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitInvariants {
    /// `D_1..D_M`.
    pub d: Vec<i64>,
    /// `E_0..E_M`.
    pub e: Vec<i64>,
    /// `F_{M+2}..F_N`.
    pub f: Vec<i64>,
}

fn need(v: Option<i64>) -> Result<i64> {
    v.ok_or(Error::Singular)
}

pub fn orbit_invariants(a: &LoopMatrix, m: usize, n: usize) -> Result<OrbitInvariants> {
    check_rank(m, n)?;
    if a.n() != n {
        return Err(Error::PatternMismatch(format!("expected a {n}x{n} matrix")));
    }
    let top: Vec<usize> = (0..m).collect();

    let mut run = Bareiss::new(a.submatrix_rows(&top)).valuations_only();
    let mut d = Vec::with_capacity(m);
    for _ in 0..m {
        d.push(need(run.step(&PivotRule::Among(top.clone()))?)?);
    }

    // Row M+1 first; then the top rows bordered by it; then the tail rows in order.
    let mut run = Bareiss::from_matrix(a).valuations_only();
    let mut e = Vec::with_capacity(m + 1);
    e.push(need(run.step(&PivotRule::InRow(m))?)?);
    for _ in 0..m {
        e.push(need(run.step(&PivotRule::Among(top.clone()))?)?);
    }
    let mut f = Vec::with_capacity(n - m - 1);
    for r in m + 1..n {
        f.push(need(run.step(&PivotRule::InRow(r))?)?);
    }
    Ok(OrbitInvariants { d, e, f })
}

impl OrbitInvariants {
    /// Inverts the partial-sum formulas. The result is only meaningful when
    /// (λ, θ) comes out dominant; anything else means the input was not an
    /// invertible point or the invariants were computed inconsistently.
    pub fn to_weight(&self, m: usize, n: usize) -> Result<SuperWeight> {
        let dd = |s: usize| if s == 0 { 0 } else { self.d[s - 1] };
        let theta: Vec<i64> = (0..=m).map(|s| self.e[s] - dd(s)).collect();
        let lambda: Vec<i64> = (1..=m).map(|s| dd(s) - dd(s - 1) - theta[s - 1]).collect();
        let mut prev = self.e[m];
        let theta_prime = self
            .f
            .iter()
            .map(|&x| {
                let r = x - prev;
                prev = x;
                r
            })
            .collect();
        let w = SuperWeight::new(m, n, lambda, theta, theta_prime)?;
        if !is_orbit_index(&w) {
            return Err(Error::InconsistentInvariants(format!("{:?} is not dominant", w)));
        }
        Ok(w)
    }
}

/// The orbit index of `a ∈ GL_N(F)`.
pub fn classify(a: &LoopMatrix, m: usize, n: usize) -> Result<SuperWeight> {
    orbit_invariants(a, m, n)?.to_weight(m, n)
}

pub fn classify_point(p: &OrbitPoint, m: usize, n: usize, target: i64) -> Result<SuperWeight> {
    classify(&p.to_gr_n(m, target)?, m, n)
}

/// The reduction of the uniqueness proof carried out explicitly.
///
/// Stage one is a column Hermite reduction from the top row, after which
/// the first M+1 rows occupy the first M+1 columns and the tail rows are
/// lower triangular with pivots θ′. Stage two clears everything left of the
/// diagonal in the tail rows with row operations from U⁻_{M,N}(F). The
/// result is block diagonal; its leading block carries (λ, θ).
pub struct StagedReduction {
    pub reduced: LoopMatrix,
    pub theta_prime: Vec<i64>,
}

pub fn staged_reduce(a: &LoopMatrix, m: usize, n: usize, target: i64) -> Result<StagedReduction> {
    check_rank(m, n)?;
    let hf = loopmat::hermite_reduce(a, Orientation::FromTopRow, target)?;
    let mut h = hf.triangular;
    for i in m + 1..n {
        for j in (0..i).rev() {
            if h.get(i, j).poly().is_zero() {
                h.set(i, j, TruncatedSeries::zero());
                continue;
            }
            let q = h.get(i, j).div(h.get(j, j), target)?;
            for c in 0..=j {
                let new = h.get(i, c).sub(&q.mul(h.get(j, c)));
                h.set(i, c, new);
            }
            h.set(i, j, TruncatedSeries::zero());
        }
    }
    Ok(StagedReduction { theta_prime: hf.pivots[m + 1..].to_vec(), reduced: h })
}

/// Classification through [`staged_reduce`]; an independent route used to
/// cross-check [`classify`].
pub fn classify_staged(a: &LoopMatrix, m: usize, n: usize, target: i64) -> Result<SuperWeight> {
    let st = staged_reduce(a, m, n, target)?;
    let w = classify(&st.reduced, m, n)?;
    if w.theta_prime != st.theta_prime {
        return Err(Error::InconsistentInvariants("stage-one pivots disagree with the tail block".into()));
    }
    Ok(w)
}

/// The weight (ξ, (η, η′)) of the semi-infinite orbit through `p`.
pub fn semi_infinite_weight(p: &OrbitPoint, m: usize, n: usize) -> Result<SuperWeight> {
    check_rank(m, n)?;
    let xi = match &p.gr_m {
        Some(g) => hermite_pivots(g, Orientation::FromTopRow)?.iter().map(|x| -x).collect(),
        None => vec![0; m],
    };
    let eta = hermite_pivots(&d_matrix_inv(m, n).mul(&p.gr_n), Orientation::FromBottomRow)?;
    SuperWeight::new(m, n, xi, eta[..=m].to_vec(), eta[m + 1..].to_vec())
}

/// Stratum data of a point of the 𝔅 pattern (`N = M + 2`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BStratum {
    /// `j_1 > j_2 > … > j_k`, 1-based columns among the first M+1.
    pub j_seq: Vec<usize>,
    /// `i_1 > i_2 > … > i_k`, the valuations of the surviving entries.
    pub i_seq: Vec<i64>,
    pub eta_prime_1: i64,
}

/// Reduces `a` to lower triangular form and reads which entries of the last
/// row survive clearing by later columns: walking leftwards from column
/// M+1, an entry survives exactly when its valuation is below every
/// valuation to its right, including that of the corner entry t^{−η′_1}.
pub fn stratum_b(a: &LoopMatrix, target: i64) -> Result<BStratum> {
    let n = a.n();
    if n < 3 {
        return Err(Error::PatternMismatch("the 𝔅 pattern needs N = M + 2 ≥ 3".into()));
    }
    let hf = loopmat::hermite_reduce(a, Orientation::FromTopRow, target)?;
    let h = hf.triangular;
    let last = n - 1;
    let corner = hf.pivots[last];
    let mut bound = corner;
    let (mut j_seq, mut i_seq) = (Vec::new(), Vec::new());
    for j in (0..last).rev() {
        match h.get(last, j).val() {
            Valuation::Finite(v) if v < bound => {
                j_seq.push(j + 1);
                i_seq.push(v);
                bound = v;
            }
            Valuation::Unknown(p) if p < bound => return Err(Error::InsufficientPrecision),
            _ => {}
        }
    }
    Ok(BStratum { j_seq, i_seq, eta_prime_1: -corner })
}
