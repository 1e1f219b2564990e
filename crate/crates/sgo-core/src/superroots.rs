//! The gl(M|N) root datum for the mixed Borel.
//!
//! Weights live in Z^M ⊕ Z^N with basis δ_1..δ_M, ε_1..ε_N. Reading the
//! basis along the chain ε_1, δ_1, ε_2, δ_2, …, ε_M, δ_M, ε_{M+1}, …, ε_N
//! every simple root is "next minus current", which makes the root lattice
//! type A and reduces `decompose` to prefix sums.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub fn check_rank(m: usize, n: usize) -> Result<()> {
    if m == 0 || m >= n {
        return Err(Error::InvalidRank(m, n));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SuperWeight {
    pub m: usize,
    pub n: usize,
    pub lambda: Vec<i64>,
    pub theta: Vec<i64>,
    pub theta_prime: Vec<i64>,
}

impl SuperWeight {
    pub fn new(m: usize, n: usize, lambda: Vec<i64>, theta: Vec<i64>, theta_prime: Vec<i64>) -> Result<Self> {
        check_rank(m, n)?;
        if lambda.len() != m || theta.len() != m + 1 || theta_prime.len() != n - m - 1 {
            return Err(Error::Parse(format!(
                "weight lengths ({}, {}, {}) do not match (M, N) = ({m}, {n})",
                lambda.len(),
                theta.len(),
                theta_prime.len()
            )));
        }
        Ok(SuperWeight { m, n, lambda, theta, theta_prime })
    }

    /// Infers (M, N) from the lengths.
    pub fn from_parts(lambda: Vec<i64>, theta: Vec<i64>, theta_prime: Vec<i64>) -> Result<Self> {
        let m = lambda.len();
        let n = m + 1 + theta_prime.len();
        if theta.len() != m + 1 {
            return Err(Error::Parse("theta must have length M+1".into()));
        }
        Self::new(m, n, lambda, theta, theta_prime)
    }

    pub fn zero(m: usize, n: usize) -> Self {
        SuperWeight { m, n, lambda: vec![0; m], theta: vec![0; m + 1], theta_prime: vec![0; n - m - 1] }
    }

    /// δ-block followed by ε-block.
    pub fn flat(&self) -> Vec<i64> {
        let mut v = self.lambda.clone();
        v.extend(&self.theta);
        v.extend(&self.theta_prime);
        v
    }

    pub fn from_flat(m: usize, n: usize, v: &[i64]) -> Self {
        SuperWeight {
            m,
            n,
            lambda: v[..m].to_vec(),
            theta: v[m..2 * m + 1].to_vec(),
            theta_prime: v[2 * m + 1..].to_vec(),
        }
    }

    /// The ε-block (θ, θ′) as one vector.
    pub fn epsilon(&self) -> Vec<i64> {
        let mut v = self.theta.clone();
        v.extend(&self.theta_prime);
        v
    }

    /// Coordinates read along the chain ε_1, δ_1, …, ε_M, δ_M, ε_{M+1}, …, ε_N.
    pub fn chain(&self) -> Vec<i64> {
        let mut v = Vec::with_capacity(self.m + self.n);
        for i in 0..self.m {
            v.push(self.theta[i]);
            v.push(self.lambda[i]);
        }
        v.push(self.theta[self.m]);
        v.extend(&self.theta_prime);
        v
    }

    pub fn from_chain(m: usize, n: usize, c: &[i64]) -> Self {
        let mut w = SuperWeight::zero(m, n);
        for i in 0..m {
            w.theta[i] = c[2 * i];
            w.lambda[i] = c[2 * i + 1];
        }
        w.theta[m] = c[2 * m];
        w.theta_prime.copy_from_slice(&c[2 * m + 1..]);
        w
    }

    pub fn total(&self) -> i64 {
        self.flat().iter().sum()
    }

    fn same_rank(&self, other: &Self) -> Result<()> {
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::RankMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_rank(other)?;
        let v: Vec<i64> = self.flat().iter().zip(other.flat()).map(|(a, b)| a + b).collect();
        Ok(Self::from_flat(self.m, self.n, &v))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_rank(other)?;
        let v: Vec<i64> = self.flat().iter().zip(other.flat()).map(|(a, b)| a - b).collect();
        Ok(Self::from_flat(self.m, self.n, &v))
    }

    pub fn neg(&self) -> Self {
        let v: Vec<i64> = self.flat().iter().map(|x| -x).collect();
        Self::from_flat(self.m, self.n, &v)
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> i64 {
        self.flat().iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

#[derive(Serialize, Deserialize)]
struct WeightJson {
    lambda: Vec<i64>,
    theta: Vec<i64>,
    theta_prime: Vec<i64>,
}

impl Serialize for SuperWeight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeightJson { lambda: self.lambda.clone(), theta: self.theta.clone(), theta_prime: self.theta_prime.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SuperWeight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = WeightJson::deserialize(d)?;
        SuperWeight::from_parts(w.lambda, w.theta, w.theta_prime).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Odd,
    Even,
}

/// Parity of α_i (1-based): odd exactly for `i ≤ 2M`.
pub fn parity(m: usize, i: usize) -> Parity {
    if i <= 2 * m {
        Parity::Odd
    } else {
        Parity::Even
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootVector {
    pub m: usize,
    pub n: usize,
    /// `coeffs[i-1]` multiplies α_i.
    pub coeffs: Vec<i64>,
}

impl RootVector {
    pub fn new(m: usize, n: usize, coeffs: Vec<i64>) -> Result<Self> {
        check_rank(m, n)?;
        if coeffs.len() != m + n - 1 {
            return Err(Error::Parse(format!("root vector needs {} coefficients", m + n - 1)));
        }
        Ok(RootVector { m, n, coeffs })
    }

    pub fn zero(m: usize, n: usize) -> Self {
        RootVector { m, n, coeffs: vec![0; m + n - 1] }
    }

    /// The unit vector on α_i (1-based).
    pub fn simple(m: usize, n: usize, i: usize) -> Self {
        let mut r = Self::zero(m, n);
        r.coeffs[i - 1] = 1;
        r
    }

    /// Σ n_i α_i as a weight.
    pub fn to_weight(&self) -> SuperWeight {
        let len = self.m + self.n;
        let mut chain = vec![0i64; len];
        for (k, &c) in self.coeffs.iter().enumerate() {
            chain[k + 1] += c;
            chain[k] -= c;
        }
        SuperWeight::from_chain(self.m, self.n, &chain)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        RootVector { m: self.m, n: self.n, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        RootVector { m: self.m, n: self.n, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    /// Support as 1-based simple-root indices.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(k, _)| k + 1).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleRoot {
    pub index: usize,
    /// δ-block then ε-block.
    pub vector: Vec<i64>,
    pub parity: Parity,
}

pub fn simple_roots(m: usize, n: usize) -> Result<Vec<SimpleRoot>> {
    check_rank(m, n)?;
    Ok((1..m + n)
        .map(|i| SimpleRoot { index: i, vector: RootVector::simple(m, n, i).to_weight().flat(), parity: parity(m, i) })
        .collect())
}

/// The unique `n` with `w1 − w2 = Σ n_i α_i`, or `None` off the root lattice.
pub fn decompose(w1: &SuperWeight, w2: &SuperWeight) -> Result<Option<RootVector>> {
    let d = w1.sub(w2)?;
    let chain = d.chain();
    if chain.iter().sum::<i64>() != 0 {
        return Ok(None);
    }
    let mut acc = 0;
    let coeffs = chain[..chain.len() - 1]
        .iter()
        .map(|x| {
            acc += x;
            -acc
        })
        .collect();
    Ok(Some(RootVector { m: w1.m, n: w1.n, coeffs }))
}

/// `w1 ≤ w2` in the root order: `w2 − w1` is a nonnegative sum of simple roots.
pub fn leq(w1: &SuperWeight, w2: &SuperWeight) -> Result<bool> {
    Ok(decompose(w2, w1)?.is_some_and(|r| r.is_nonnegative()))
}

/// Composite roots in simple-root coordinates: `(GL_M roots, GL_N roots)`.
///
/// α_{i,GL_M} = α_{2i} + α_{2i+1} for i < M, α_{i,GL_N} = α_{2i−1} + α_{2i}
/// for i ≤ M and α_{i,GL_N} = α_{i+M} for M < i < N.
pub fn composite_roots(m: usize, n: usize) -> Result<(Vec<RootVector>, Vec<RootVector>)> {
    check_rank(m, n)?;
    let pair = |a: usize, b: usize| RootVector::simple(m, n, a).add(&RootVector::simple(m, n, b));
    let gl_m = (1..m).map(|i| pair(2 * i, 2 * i + 1)).collect();
    let mut gl_n: Vec<RootVector> = (1..=m).map(|i| pair(2 * i - 1, 2 * i)).collect();
    gl_n.extend((m + 1..n).map(|i| RootVector::simple(m, n, i + m)));
    Ok((gl_m, gl_n))
}

/// Coefficients of a composite-root combination, split by family:
/// `a` on α_{i,GL_M}, `b` on α_{j,GL_N} (j ≤ M), `c` on α_{k,GL_N} (k > M).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompositeCoeffs {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
}

impl CompositeCoeffs {
    pub fn total(&self) -> i64 {
        self.a.iter().chain(&self.b).chain(&self.c).sum()
    }

    pub fn to_root_vector(&self, m: usize, n: usize) -> RootVector {
        let mut r = RootVector::zero(m, n);
        for (i, &x) in self.a.iter().enumerate() {
            r.coeffs[2 * (i + 1) - 1] += x;
            r.coeffs[2 * (i + 1)] += x;
        }
        for (j, &x) in self.b.iter().enumerate() {
            r.coeffs[2 * (j + 1) - 2] += x;
            r.coeffs[2 * (j + 1) - 1] += x;
        }
        for (k, &x) in self.c.iter().enumerate() {
            r.coeffs[2 * m + k] += x;
        }
        r
    }
}

/// Solves `r = Σ a_i α_{i,GL_M} + Σ b_j α_{j,GL_N} + Σ c_k α_{k,GL_N}`.
///
/// The composite roots are linearly independent (on the odd indices they
/// form the overlapping pairs (1,2), (2,3), …, (2M−1,2M)), so the solution
/// is unique when it exists; `None` when it is not nonnegative integral.
pub fn composite_decompose(r: &RootVector) -> Option<CompositeCoeffs> {
    let m = r.m;
    let mut pairs = vec![0i64; 2 * m - 1];
    let mut carry = 0;
    for (p, slot) in pairs.iter_mut().enumerate() {
        let v = r.coeffs[p] - carry;
        if v < 0 {
            return None;
        }
        *slot = v;
        carry = v;
    }
    if r.coeffs[2 * m - 1] != carry {
        return None;
    }
    let c: Vec<i64> = r.coeffs[2 * m..].to_vec();
    if c.iter().any(|&x| x < 0) {
        return None;
    }
    // Pair p (0-based) covers indices p+1, p+2: even p are GL_N pairs, odd p are GL_M pairs.
    let b = pairs.iter().step_by(2).copied().collect();
    let a = pairs.iter().skip(1).step_by(2).copied().collect();
    Some(CompositeCoeffs { a, b, c })
}

/// `w2 − w1` is a nonnegative combination of composite roots.
pub fn leq_g(w1: &SuperWeight, w2: &SuperWeight) -> Result<bool> {
    Ok(decompose(w2, w1)?.is_some_and(|r| composite_decompose(&r).is_some()))
}

fn nondecreasing(v: &[i64]) -> bool {
    v.windows(2).all(|w| w[0] <= w[1])
}

/// The typicality implications shared by (2.1) and (3.4).
fn typicality(w: &SuperWeight) -> bool {
    let (l, t) = (&w.lambda, &w.theta);
    let first = (0..w.m).all(|i| t[i] != t[i + 1] || t[i] + l[i] == 0);
    let second = (1..w.m).all(|i| l[i - 1] != l[i] || t[i] + l[i] == 0);
    first && second
}

/// Condition A: λ nondecreasing and θ_1 ≤ … ≤ θ_{M+1} ≤ θ′_1 ≤ … ≤ θ′_{N−M−1}.
pub fn condition_a(w: &SuperWeight) -> bool {
    nondecreasing(&w.lambda) && nondecreasing(&w.epsilon())
}

pub fn is_relevant(w: &SuperWeight) -> bool {
    condition_a(w) && typicality(w)
}

/// Highest-weight condition: GL_M and GL_N dominance of the stored blocks
/// together with the typicality implications. θ and θ′ are checked
/// separately; the link θ_{M+1} ≤ θ′_1 is not required.
pub fn is_hw_dominant(w: &SuperWeight) -> bool {
    nondecreasing(&w.lambda) && nondecreasing(&w.theta) && nondecreasing(&w.theta_prime) && typicality(w)
}

/// Whether (λ, θ) is dominant, i.e. `w` indexes an orbit.
pub fn is_orbit_index(w: &SuperWeight) -> bool {
    nondecreasing(&w.lambda) && nondecreasing(&w.theta)
}

/// 2ρ° = (λ°, (θ°, θ°′)).
pub fn rho_circ(m: usize, n: usize) -> Result<SuperWeight> {
    check_rank(m, n)?;
    let (mi, ni) = (m as i64, n as i64);
    let lambda = (0..mi).map(|k| -mi + 1 + 2 * k).collect();
    let theta = (0..=mi).map(|k| -mi + 2 * k).collect();
    let theta_prime = (0..ni - mi - 1).map(|k| mi + 2 + 2 * k).collect();
    Ok(SuperWeight { m, n, lambda, theta, theta_prime })
}

pub fn pairing(r: &SuperWeight, w: &SuperWeight) -> Result<i64> {
    r.same_rank(w)?;
    Ok(r.flat().iter().zip(w.flat()).map(|(a, b)| a * b).sum())
}

fn product_box(len: usize, b: i64, f: &mut impl FnMut(&[i64])) {
    let mut cur = vec![-b; len];
    loop {
        f(&cur);
        let mut k = len;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if cur[k] < b {
                cur[k] += 1;
                for x in &mut cur[k + 1..] {
                    *x = -b;
                }
                break;
            }
        }
    }
}

/// Every weight with coordinates in `[−b, b]`, lexicographic in (λ, θ, θ′).
pub fn box_weights(m: usize, n: usize, b: i64) -> Result<Vec<SuperWeight>> {
    check_rank(m, n)?;
    let mut out = Vec::new();
    product_box(m + n, b, &mut |v| out.push(SuperWeight::from_flat(m, n, v)));
    Ok(out)
}

/// Orbit indices in the box: (λ, θ) dominant, θ′ arbitrary.
pub fn orbit_weights(m: usize, n: usize, b: i64) -> Result<Vec<SuperWeight>> {
    check_rank(m, n)?;
    let mut out = Vec::new();
    product_box(m + n, b, &mut |v| {
        let w = SuperWeight::from_flat(m, n, v);
        if is_orbit_index(&w) {
            out.push(w);
        }
    });
    Ok(out)
}
