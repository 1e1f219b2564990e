//! Square matrices over F = Q((t)).
//!
//! Everything valuation-theoretic goes through [`Bareiss`]: fraction-free
//! elimination whose pivots are chosen by minimal t-adic valuation. With
//! that choice the k-th Bareiss pivot is a k×k minor of minimal valuation
//! and absolute precision is not lost along the way, which is what keeps
//! the orbit invariants decidable at modest truncation.

use std::fmt;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::laurent::{LaurentScalar, TruncatedSeries, Valuation, INF};
use crate::rational::Rational;

/// Cap on coefficients produced by a non-terminating exact division.
const DIV_CAP: i64 = 4 * crate::laurent::MAX_PRECISION;

#[derive(Clone, PartialEq, Eq)]
pub struct LoopMatrix {
    n: usize,
    entries: Vec<TruncatedSeries>,
}

impl LoopMatrix {
    /// Row-major entries; panics unless there are exactly `n*n`.
    pub fn new(n: usize, entries: Vec<TruncatedSeries>) -> Self {
        assert_eq!(entries.len(), n * n, "expected {n}x{n} entries");
        LoopMatrix { n, entries }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> TruncatedSeries) -> Self {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        LoopMatrix { n, entries }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_fn(n, |_, _| TruncatedSeries::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { TruncatedSeries::one() } else { TruncatedSeries::zero() })
    }

    /// `diag(t^{e_1}, …, t^{e_n})`.
    pub fn diag_t(exps: &[i64]) -> Self {
        let n = exps.len();
        Self::from_fn(n, |i, j| if i == j { TruncatedSeries::t_pow(exps[i]) } else { TruncatedSeries::zero() })
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| TruncatedSeries::from_int(rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: TruncatedSeries) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[TruncatedSeries] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[TruncatedSeries] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Common minimum precision of the entries; `None` when all are exact.
    pub fn precision(&self) -> Option<i64> {
        let p = self.entries.iter().map(|e| e.prec_raw()).min().unwrap_or(INF);
        (p != INF).then_some(p)
    }

    pub fn truncate(&self, p: i64) -> Self {
        LoopMatrix { n: self.n, entries: self.entries.iter().map(|e| e.truncate(p)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_truncated(other, INF)
    }

    /// `self·other` known modulo `t^p`; terms at or above `p` are never formed.
    pub fn mul_truncated(&self, other: &Self, p: i64) -> Self {
        assert_eq!(self.n, other.n);
        if let Some(prod) = self.mul_integral(other, p) {
            return prod;
        }
        if p != INF {
            return self.truncate(p - other.min_val()).mul(&other.truncate(p - self.min_val())).truncate(p);
        }
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = TruncatedSeries::zero();
                for k in 0..n {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if a.is_exact_zero() || b.is_exact_zero() {
                        continue;
                    }
                    acc = if a.poly().is_monomial() && a.is_exact() && a.poly().val() == Some(0) && a.poly().coeff(0).is_one() {
                        acc.add(b)
                    } else {
                        acc.add(&a.mul(b))
                    };
                }
                out.push(acc);
            }
        }
        LoopMatrix { n, entries: out }
    }

    /// Product of exact matrices with small integer coefficients, accumulated
    /// in i128 without intermediate series.
    fn min_val(&self) -> i64 {
        self.entries.iter().map(|e| e.val().lower_bound()).min().unwrap_or(0).min(0)
    }

    fn mul_integral(&self, other: &Self, p: i64) -> Option<Self> {
        let a = IntView::of(self)?;
        let b = IntView::of(other)?;
        let n = self.n;
        let bound = (a.max as u128).checked_mul(b.max as u128)?.checked_mul((a.width.min(b.width) * n) as u128)?;
        if bound > i128::MAX as u128 {
            return None;
        }
        let mut out = Vec::with_capacity(n * n);
        let mut buf: Vec<i128> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let mut lo = i64::MAX;
                let mut hi = i64::MIN;
                for k in 0..n {
                    if let (Some((la, ca)), Some((lb, cb))) = (&a.cells[i * n + k], &b.cells[k * n + j]) {
                        lo = lo.min(la + lb);
                        hi = hi.max(la + lb + (ca.len() + cb.len()) as i64 - 2);
                    }
                }
                if p != INF {
                    hi = hi.min(p - 1);
                }
                if lo == i64::MAX {
                    out.push(TruncatedSeries::zero());
                    continue;
                }
                if lo > hi {
                    out.push(TruncatedSeries::zero_mod(p));
                    continue;
                }
                buf.clear();
                buf.resize((hi - lo + 1) as usize, 0);
                for k in 0..n {
                    if let (Some((la, ca)), Some((lb, cb))) = (&a.cells[i * n + k], &b.cells[k * n + j]) {
                        let base = la + lb - lo;
                        for (x, &u) in ca.iter().enumerate() {
                            let start = base + x as i64;
                            if u == 0 || start >= buf.len() as i64 {
                                continue;
                            }
                            let u = u as i128;
                            for (slot, &v) in buf[start as usize..].iter_mut().zip(cb) {
                                *slot += u * v as i128;
                            }
                        }
                    }
                }
                let coeffs = buf.iter().map(|&c| Rational::from_i128_int(c)).collect();
                let poly = LaurentScalar::from_dense(lo, coeffs);
                out.push(if p == INF { TruncatedSeries::exact(poly) } else { TruncatedSeries::new(poly, Some(p)) });
            }
        }
        Some(LoopMatrix { n, entries: out })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// Block diagonal `diag(a, b)`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let n = a.n + b.n;
        Self::from_fn(n, |i, j| match (i < a.n, j < a.n) {
            (true, true) => a.get(i, j).clone(),
            (false, false) => b.get(i - a.n, j - a.n).clone(),
            _ => TruncatedSeries::zero(),
        })
    }

    /// Rows in `rows` and columns in `cols`, as a dense row list.
    pub(crate) fn submatrix_rows(&self, rows: &[usize]) -> Vec<Vec<TruncatedSeries>> {
        rows.iter().map(|&r| self.row(r).to_vec()).collect()
    }
}

impl fmt::Debug for LoopMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LoopMatrix({}x{}) [", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Which entries may serve as the next pivot.
#[derive(Clone, Debug)]
pub enum PivotRule {
    /// Minimal valuation over the given rows and every live column.
    Among(Vec<usize>),
    /// Minimal valuation within one row; ties go to the lowest column.
    InRow(usize),
}

struct IntView {
    cells: Vec<Option<(i64, Vec<i64>)>>,
    max: i64,
    width: usize,
}

impl IntView {
    fn of(m: &LoopMatrix) -> Option<Self> {
        let mut max = 0i64;
        let mut width = 0usize;
        let mut cells = Vec::with_capacity(m.entries.len());
        for e in &m.entries {
            if !e.is_exact() {
                return None;
            }
            if e.poly().is_zero() {
                cells.push(None);
                continue;
            }
            let (lo, cs) = e.poly().dense();
            let mut v = Vec::with_capacity(cs.len());
            for c in cs {
                let x = c.as_small_int()?;
                max = max.max(x.checked_abs()?);
                v.push(x);
            }
            width = width.max(v.len());
            cells.push(Some((lo, v)));
        }
        Some(IntView { cells, max, width })
    }
}

/// Fraction-free elimination on a rectangular block of series.
///
/// After `k` steps the current pivot is, up to sign, the k×k minor on the
/// pivot rows and columns, and every live entry is the (k+1)×(k+1) minor
/// obtained by bordering it (Sylvester's identity).
///
/// In [`Bareiss::valuations_only`] mode the division by the previous pivot
/// is replaced by division by its leading monomial, so every entry is the
/// corresponding minor times a unit of O. Valuations are unchanged and the
/// arithmetic stays integral on integral input.
pub struct Bareiss {
    rows: Vec<Vec<TruncatedSeries>>,
    row_live: Vec<bool>,
    col_live: Vec<bool>,
    prev: TruncatedSeries,
    steps: Vec<(usize, usize)>,
    pivot_vals: Vec<i64>,
    exact_quotients: bool,
}

impl Bareiss {
    pub fn new(rows: Vec<Vec<TruncatedSeries>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Bareiss {
            row_live: vec![true; rows.len()],
            col_live: vec![true; cols],
            rows,
            prev: TruncatedSeries::one(),
            steps: Vec::new(),
            pivot_vals: Vec::new(),
            exact_quotients: true,
        }
    }

    pub fn from_matrix(a: &LoopMatrix) -> Self {
        Self::new((0..a.n()).map(|i| a.row(i).to_vec()).collect())
    }

    pub fn valuations_only(mut self) -> Self {
        self.exact_quotients = false;
        self
    }

    /// Valuations of the successive pivots, i.e. of the nested minors.
    pub fn pivot_valuations(&self) -> &[i64] {
        &self.pivot_vals
    }

    pub fn pivot_positions(&self) -> &[(usize, usize)] {
        &self.steps
    }

    pub fn current_pivot(&self) -> &TruncatedSeries {
        &self.prev
    }

    pub fn entry(&self, r: usize, c: usize) -> &TruncatedSeries {
        &self.rows[r][c]
    }

    fn choose(&self, rule: &PivotRule) -> Result<Option<(usize, usize, i64)>> {
        let cand_rows: Vec<usize> = match rule {
            PivotRule::Among(rs) => rs.iter().copied().filter(|&r| self.row_live[r]).collect(),
            PivotRule::InRow(r) => {
                if self.row_live[*r] {
                    vec![*r]
                } else {
                    vec![]
                }
            }
        };
        let mut best: Option<(usize, usize, i64)> = None;
        let mut unknown_floor = INF;
        for c in (0..self.col_live.len()).filter(|&c| self.col_live[c]) {
            for &r in &cand_rows {
                match self.rows[r][c].val() {
                    Valuation::Finite(v) => {
                        if best.is_none_or(|b| v < b.2) {
                            best = Some((r, c, v));
                        }
                    }
                    Valuation::Unknown(p) => unknown_floor = unknown_floor.min(p),
                    Valuation::Infinite => {}
                }
            }
        }
        match best {
            Some(b) if unknown_floor >= b.2 => Ok(Some(b)),
            None if unknown_floor == INF => Ok(None),
            _ => Err(Error::InsufficientPrecision),
        }
    }

    /// One elimination step. Returns the new pivot's valuation, or `None`
    /// when every candidate is an exact zero.
    pub fn step(&mut self, rule: &PivotRule) -> Result<Option<i64>> {
        let Some((r, c, v)) = self.choose(rule)? else {
            return Ok(None);
        };
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let p = pivot_row[c].clone();
        let live_cols: Vec<usize> = (0..self.col_live.len()).filter(|&j| self.col_live[j] && j != c).collect();
        let prev_val = self.pivot_vals.last().copied().unwrap_or(0);
        let trivial_prev = self.prev.is_exact() && self.prev.poly().is_monomial() && self.prev.poly().val() == Some(0) && self.prev.poly().coeff(0).is_one();
        let mut outcome = Ok(());
        'rows: for i in 0..self.rows.len() {
            if i == r || !self.row_live[i] {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &live_cols {
                let a = &self.rows[i][j];
                let num = p.mul_sub(a, &f, &pivot_row[j]);
                self.rows[i][j] = if trivial_prev {
                    num
                } else if self.exact_quotients {
                    match num.div(&self.prev, DIV_CAP) {
                        Ok(q) => q,
                        Err(e) => {
                            outcome = Err(e);
                            break 'rows;
                        }
                    }
                } else {
                    num.into_shift(-prev_val)
                };
            }
        }
        self.rows[r] = pivot_row;
        outcome?;
        self.row_live[r] = false;
        self.col_live[c] = false;
        self.prev = p;
        self.steps.push((r, c));
        self.pivot_vals.push(v);
        Ok(Some(v))
    }

    /// Lower bound on the valuation of everything still live, used when the
    /// elimination stops on undecidable zeros.
    fn live_floor(&self) -> i64 {
        let mut m = INF;
        for (i, row) in self.rows.iter().enumerate() {
            if !self.row_live[i] {
                continue;
            }
            for (j, e) in row.iter().enumerate() {
                if self.col_live[j] {
                    m = m.min(e.val().lower_bound());
                }
            }
        }
        m
    }
}

fn perm_sign(p: &[usize]) -> i64 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            k = p[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Determinant by valuation-pivoted Bareiss elimination.
///
/// Never fails: if elimination runs into zeros that are only known modulo a
/// power of t, the result is a zero with the precision those zeros allow.
pub fn det(a: &LoopMatrix) -> TruncatedSeries {
    let n = a.n();
    if n == 0 {
        return TruncatedSeries::one();
    }
    let mut b = Bareiss::from_matrix(a);
    let all: Vec<usize> = (0..n).collect();
    for k in 0..n {
        match b.step(&PivotRule::Among(all.clone())) {
            Ok(Some(_)) => {}
            Ok(None) => return TruncatedSeries::zero(),
            Err(_) => {
                let rest = (n - k) as i64;
                let floor = b.live_floor();
                let pv = if k == 0 { 0 } else { b.pivot_vals[k - 1] };
                let bound = if floor == INF { INF } else { rest * floor - (rest - 1) * pv };
                return TruncatedSeries::zero_mod(bound);
            }
        }
    }
    let rows: Vec<usize> = b.steps.iter().map(|s| s.0).collect();
    let cols: Vec<usize> = b.steps.iter().map(|s| s.1).collect();
    let sign = perm_sign(&rows) * perm_sign(&cols);
    let d = b.prev.clone();
    if sign < 0 {
        d.neg()
    } else {
        d
    }
}

/// Minimum valuation over all |rows|×|rows| minors supported on `rows`.
///
/// `Valuation::Infinite` means every such minor is exactly zero.
pub fn minor_min_valuation(a: &LoopMatrix, rows: &[usize]) -> Result<Valuation> {
    let mut rs = rows.to_vec();
    rs.sort_unstable();
    rs.dedup();
    assert!(rs.len() <= a.n() && rs.iter().all(|&r| r < a.n()), "row set out of range");
    if rs.is_empty() {
        return Ok(Valuation::Finite(0));
    }
    let mut b = Bareiss::new(a.submatrix_rows(&rs)).valuations_only();
    let all: Vec<usize> = (0..rs.len()).collect();
    let mut last = 0;
    for _ in 0..rs.len() {
        match b.step(&PivotRule::Among(all.clone()))? {
            Some(v) => last = v,
            None => return Ok(Valuation::Infinite),
        }
    }
    Ok(Valuation::Finite(last))
}

/// Same quantity by explicit enumeration of column subsets and cofactor
/// expansion. Exponential; kept as an independent cross-check.
pub fn minor_min_valuation_expansion(a: &LoopMatrix, rows: &[usize]) -> Result<Valuation> {
    let k = rows.len();
    if k == 0 {
        return Ok(Valuation::Finite(0));
    }
    let mut best: Option<i64> = None;
    let mut unknown_floor = INF;
    for cols in subsets(a.n(), k) {
        let m: Vec<Vec<TruncatedSeries>> = rows.iter().map(|&r| cols.iter().map(|&c| a.get(r, c).clone()).collect()).collect();
        match laplace_det(&m).val() {
            Valuation::Finite(v) => best = Some(best.map_or(v, |b| b.min(v))),
            Valuation::Unknown(p) => unknown_floor = unknown_floor.min(p),
            Valuation::Infinite => {}
        }
    }
    match best {
        Some(v) if unknown_floor >= v => Ok(Valuation::Finite(v)),
        None if unknown_floor == INF => Ok(Valuation::Infinite),
        _ => Err(Error::InsufficientPrecision),
    }
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Cofactor expansion along the first row.
pub fn laplace_det(m: &[Vec<TruncatedSeries>]) -> TruncatedSeries {
    let k = m.len();
    match k {
        0 => TruncatedSeries::one(),
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        _ => {
            let mut acc = TruncatedSeries::zero();
            for j in 0..k {
                if m[0][j].is_exact_zero() {
                    continue;
                }
                let minor: Vec<Vec<TruncatedSeries>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect())
                    .collect();
                let term = m[0][j].mul(&laplace_det(&minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// Inverse by Gauss–Jordan elimination with valuation-minimal row pivots.
///
/// Divisions by pivots are carried to `target` coefficients past the
/// leading term; exact monomial pivots divide exactly.
pub fn inverse(a: &LoopMatrix, target: i64) -> Result<LoopMatrix> {
    let n = a.n();
    let mut m: Vec<Vec<TruncatedSeries>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.extend((0..n).map(|j| if i == j { TruncatedSeries::one() } else { TruncatedSeries::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let mut best: Option<(usize, i64)> = None;
        let mut unknown_floor = INF;
        for (r, row) in m.iter().enumerate().skip(c) {
            match row[c].val() {
                Valuation::Finite(v) => {
                    if best.is_none_or(|b| v < b.1) {
                        best = Some((r, v));
                    }
                }
                Valuation::Unknown(p) => unknown_floor = unknown_floor.min(p),
                Valuation::Infinite => {}
            }
        }
        let (r, _) = match best {
            Some(b) => b,
            None if unknown_floor == INF => return Err(Error::Singular),
            None => return Err(Error::InsufficientPrecision),
        };
        m.swap(c, r);
        let inv = m[c][c].invert(target)?;
        let pivot_row: Vec<TruncatedSeries> = m[c].iter().map(|e| e.mul(&inv)).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i == c || row[c].is_exact_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in 0..2 * n {
                if !pivot_row[j].is_exact_zero() {
                    row[j] = row[j].sub(&f.mul(&pivot_row[j]));
                }
            }
            row[c] = TruncatedSeries::zero();
        }
        m[c] = pivot_row;
        m[c][c] = TruncatedSeries::one();
    }
    Ok(LoopMatrix::from_fn(n, |i, j| m[i][n + j].clone()))
}

/// Membership in GL_n(O): integral entries and a unit determinant.
pub fn in_arc_group(a: &LoopMatrix) -> Result<bool> {
    for e in a.entries() {
        match e.val() {
            Valuation::Finite(v) if v < 0 => return Ok(false),
            Valuation::Unknown(p) if p < 0 => return Err(Error::InsufficientPrecision),
            _ => {}
        }
    }
    match det(a).val() {
        Valuation::Finite(v) => Ok(v == 0),
        Valuation::Infinite => Ok(false),
        Valuation::Unknown(p) if p > 0 => Ok(false),
        Valuation::Unknown(_) => Err(Error::InsufficientPrecision),
    }
}

/// Whether `a` and `b` span the same lattice, i.e. `a·GL_n(O) = b·GL_n(O)`.
pub fn same_lattice(a: &LoopMatrix, b: &LoopMatrix, target: i64) -> Result<bool> {
    in_arc_group(&inverse(a, target)?.mul(b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Pivot rows taken from the last row upward; the result is upper triangular.
    FromBottomRow,
    /// Pivot rows taken from the first row downward; the result is lower triangular.
    FromTopRow,
}

impl Orientation {
    fn row_order(self, n: usize) -> Vec<usize> {
        match self {
            Orientation::FromTopRow => (0..n).collect(),
            Orientation::FromBottomRow => (0..n).rev().collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HermiteForm {
    /// `pivots[r]` is the valuation of the diagonal entry in row `r`.
    pub pivots: Vec<i64>,
    /// Triangular `H = A·K`.
    pub triangular: LoopMatrix,
    /// The column transformation `K ∈ GL_n(O)`.
    pub transform: LoopMatrix,
    /// Unipotent triangular factor with `H = U·diag(H)`.
    pub unipotent: LoopMatrix,
}

/// Column Hermite reduction over O.
///
/// Rows are visited in the orientation's order; each row's pivot is its
/// entry of least valuation among unused columns (lowest index on ties),
/// moved to the diagonal, and the rest of the row is cleared with
/// fraction-free column operations `col_j ← u·col_j − q·col_p` where
/// `u` is the pivot's unit part, so no denominators are introduced.
pub fn hermite_reduce(a: &LoopMatrix, orientation: Orientation, target: i64) -> Result<HermiteForm> {
    let n = a.n();
    let mut h = a.clone();
    let mut k = LoopMatrix::identity(n);
    let order = orientation.row_order(n);
    let mut pivots = vec![0i64; n];
    for (step, &r) in order.iter().enumerate() {
        // Columns not yet holding a pivot are exactly the `order[step..]` slots.
        let free: Vec<usize> = {
            let mut f: Vec<usize> = order[step..].to_vec();
            f.sort_unstable();
            f
        };
        let mut best: Option<(usize, i64)> = None;
        let mut unknown_floor = INF;
        for &c in &free {
            match h.get(r, c).val() {
                Valuation::Finite(v) => {
                    if best.is_none_or(|b| v < b.1) {
                        best = Some((c, v));
                    }
                }
                Valuation::Unknown(p) => unknown_floor = unknown_floor.min(p),
                Valuation::Infinite => {}
            }
        }
        let (c, v) = match best {
            Some(b) if unknown_floor >= b.1 => b,
            None if unknown_floor == INF => return Err(Error::Singular),
            _ => return Err(Error::InsufficientPrecision),
        };
        if c != r {
            swap_cols(&mut h, c, r);
            swap_cols(&mut k, c, r);
        }
        pivots[r] = v;
        let unit = h.get(r, r).shift(-v);
        for &j in &free {
            if j == r || h.get(r, j).is_exact_zero() {
                continue;
            }
            let q = h.get(r, j).shift(-v);
            for m in [&mut h, &mut k] {
                for i in 0..n {
                    let new = m.get(i, j).mul(&unit).sub(&q.mul(m.get(i, r)));
                    m.set(i, j, new);
                }
            }
            h.set(r, j, TruncatedSeries::zero());
        }
    }
    let mut u = h.clone();
    for c in 0..n {
        let inv = h.get(c, c).invert(target)?;
        for i in 0..n {
            let e = if i == c { TruncatedSeries::one() } else { u.get(i, c).mul(&inv) };
            u.set(i, c, e);
        }
    }
    Ok(HermiteForm { pivots, triangular: h, transform: k, unipotent: u })
}

fn swap_cols(m: &mut LoopMatrix, a: usize, b: usize) {
    let n = m.n();
    for i in 0..n {
        m.entries.swap(i * n + a, i * n + b);
    }
}

/// Hermite pivots only, via row-ordered Bareiss elimination (no transform
/// is tracked, which makes this the fast path).
pub fn hermite_pivots(a: &LoopMatrix, orientation: Orientation) -> Result<Vec<i64>> {
    let n = a.n();
    let mut b = Bareiss::from_matrix(a).valuations_only();
    let mut pivots = vec![0; n];
    let mut prev = 0;
    for r in orientation.row_order(n) {
        let v = b.step(&PivotRule::InRow(r))?.ok_or(Error::Singular)?;
        pivots[r] = v - prev;
        prev = v;
    }
    Ok(pivots)
}

/// Elementary divisor exponents, sorted ascending.
pub fn smith_exponents(a: &LoopMatrix) -> Result<Vec<i64>> {
    let n = a.n();
    let mut b = Bareiss::from_matrix(a).valuations_only();
    let all: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    let mut prev = 0;
    for _ in 0..n {
        let v = b.step(&PivotRule::Among(all.clone()))?.ok_or(Error::Singular)?;
        out.push(v - prev);
        prev = v;
    }
    out.sort_unstable();
    Ok(out)
}

/// Sum over `i = M+1..N−1` (1-based) of the residue of the entry `(i+1, i)`.
pub fn chi_residue(a: &LoopMatrix, m: usize, n: usize) -> Result<Rational> {
    check_h_shape(a, m, n)?;
    let mut acc = Rational::ZERO;
    for r in m + 1..n {
        acc = &acc + &a.get(r, r - 1).residue()?;
    }
    Ok(acc)
}

/// Accepts the block shape of `GL_M(O) ⋉ U⁻_{M,N}(F)` (which contains U⁻ itself).
fn check_h_shape(a: &LoopMatrix, m: usize, n: usize) -> Result<()> {
    if a.n() != n || m == 0 || m >= n {
        return Err(Error::PatternMismatch(format!("expected {n}x{n} with 0 < M={m} < N")));
    }
    let is_zero = |i: usize, j: usize| a.get(i, j).poly().is_zero();
    let is_one = |i: usize, j: usize| {
        let p = a.get(i, j).poly();
        p.is_monomial() && p.val() == Some(0) && p.coeff(0).is_one()
    };
    for i in 0..n {
        for j in 0..n {
            let ok = if i < m {
                j >= m && is_zero(i, j) || j < m && a.get(i, j).val().lower_bound() >= 0
            } else if i == m {
                if j == m { is_one(i, j) } else { is_zero(i, j) }
            } else if j == i {
                is_one(i, j)
            } else {
                j < i || is_zero(i, j)
            };
            if !ok {
                return Err(Error::PatternMismatch(format!("entry ({}, {}) breaks the block shape", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternTag {
    ArcGL(usize),
    HPattern(usize, usize),
    UminusMN(usize, usize),
    UpperUnipotent(usize),
    LowerUnipotent(usize),
    ArcTorus(usize),
    DconjUpperUnipotent(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupPattern {
    pub tag: PatternTag,
    pub pole_bound: i64,
    pub coeff_range: i64,
    /// Exclusive upper bound on sampled exponents.
    pub degree: i64,
}

impl GroupPattern {
    pub fn new(tag: PatternTag) -> Self {
        GroupPattern { tag, pole_bound: 2, coeff_range: 3, degree: crate::laurent::DEFAULT_PRECISION }
    }

    pub fn with_pole_bound(mut self, p: i64) -> Self {
        self.pole_bound = p;
        self
    }

    pub fn with_degree(mut self, d: i64) -> Self {
        self.degree = d;
        self
    }

    pub fn with_coeff_range(mut self, c: i64) -> Self {
        self.coeff_range = c;
        self
    }
}

struct Sampler<'a> {
    rng: ChaCha8Rng,
    dist: Uniform<i64>,
    p: &'a GroupPattern,
}

impl Sampler<'_> {
    fn coeff(&mut self) -> Rational {
        Rational::from_int(self.dist.sample(&mut self.rng))
    }

    fn poly(&mut self, lo: i64) -> TruncatedSeries {
        let coeffs: Vec<Rational> = (lo..self.p.degree.max(lo + 1)).map(|_| self.coeff()).collect();
        TruncatedSeries::exact(LaurentScalar::from_dense(lo, coeffs))
    }

    fn arc(&mut self) -> TruncatedSeries {
        self.poly(0)
    }

    fn loop_entry(&mut self) -> TruncatedSeries {
        self.poly(-self.p.pole_bound)
    }

    fn unit(&mut self) -> TruncatedSeries {
        loop {
            let s = self.arc();
            if !s.poly().coeff(0).is_zero() {
                return s;
            }
        }
    }

    fn arc_gl(&mut self, n: usize) -> LoopMatrix {
        loop {
            let m = LoopMatrix::from_fn(n, |_, _| self.arc());
            let constant: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| m.get(i, j).poly().coeff(0).as_small_int().unwrap_or(0) as i128).collect()).collect();
            if int_det_nonzero(constant) {
                return m;
            }
        }
    }

    fn unipotent(&mut self, n: usize, upper: bool) -> LoopMatrix {
        LoopMatrix::from_fn(n, |i, j| {
            if i == j {
                TruncatedSeries::one()
            } else if (i < j) == upper {
                self.loop_entry()
            } else {
                TruncatedSeries::zero()
            }
        })
    }

    fn uminus(&mut self, m: usize, n: usize, top: Option<LoopMatrix>) -> LoopMatrix {
        LoopMatrix::from_fn(n, |i, j| {
            if i < m && j < m {
                match &top {
                    Some(g) => g.get(i, j).clone(),
                    None if i == j => TruncatedSeries::one(),
                    None => TruncatedSeries::zero(),
                }
            } else if i == j {
                TruncatedSeries::one()
            } else if i > m && j < i {
                self.loop_entry()
            } else {
                TruncatedSeries::zero()
            }
        })
    }
}

/// Nonsingularity of a small integer matrix by fraction-free elimination.
fn int_det_nonzero(mut a: Vec<Vec<i128>>) -> bool {
    let n = a.len();
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| a[r][k] != 0) else {
            return false;
        };
        a.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    true
}

/// The matrix 𝔇: identity except that row `M+1` reads `(1, …, 1, 0, …, 0)`
/// with `M+1` ones.
pub fn d_matrix(m: usize, n: usize) -> LoopMatrix {
    LoopMatrix::from_fn(n, |i, j| {
        if i == j || (i == m && j < m) {
            TruncatedSeries::one()
        } else {
            TruncatedSeries::zero()
        }
    })
}

/// 𝔇⁻¹: row `M+1` reads `(−1, …, −1, 1, 0, …)`.
pub fn d_matrix_inv(m: usize, n: usize) -> LoopMatrix {
    LoopMatrix::from_fn(n, |i, j| {
        if i == j {
            TruncatedSeries::one()
        } else if i == m && j < m {
            TruncatedSeries::from_int(-1)
        } else {
            TruncatedSeries::zero()
        }
    })
}

/// Deterministic sample of `pattern` from `seed`. Samples are exact
/// Laurent polynomials; callers truncate to their working precision.
pub fn sample(pattern: &GroupPattern, seed: u64) -> LoopMatrix {
    let r = pattern.coeff_range.abs();
    let mut s = Sampler { rng: ChaCha8Rng::seed_from_u64(seed), dist: Uniform::new_inclusive(-r, r), p: pattern };
    match pattern.tag {
        PatternTag::ArcGL(n) => s.arc_gl(n),
        PatternTag::ArcTorus(n) => {
            let d: Vec<TruncatedSeries> = (0..n).map(|_| s.unit()).collect();
            LoopMatrix::from_fn(n, |i, j| if i == j { d[i].clone() } else { TruncatedSeries::zero() })
        }
        PatternTag::UpperUnipotent(n) => s.unipotent(n, true),
        PatternTag::LowerUnipotent(n) => s.unipotent(n, false),
        PatternTag::UminusMN(m, n) => s.uminus(m, n, None),
        PatternTag::HPattern(m, n) => {
            let g = s.arc_gl(m);
            s.uminus(m, n, Some(g))
        }
        PatternTag::DconjUpperUnipotent(m, n) => {
            let u = s.unipotent(n, true);
            d_matrix(m, n).mul(&u).mul(&d_matrix_inv(m, n))
        }
    }
}
