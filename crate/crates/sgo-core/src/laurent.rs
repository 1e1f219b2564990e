//! Laurent polynomials over Q and their truncated counterparts.
//!
//! A [`TruncatedSeries`] is a Laurent polynomial together with a precision
//! `P`: the value is only known modulo `t^P`. Exact values carry `P = ∞`.
//! Coefficients are stored densely from the lowest nonzero exponent.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Sentinel for infinite precision.
pub const INF: i64 = i64::MAX;
pub const DEFAULT_PRECISION: i64 = 24;
pub const MAX_PRECISION: i64 = 96;

/// Default working precision, overridable through `SGO_PRECISION`.
pub fn working_precision() -> i64 {
    std::env::var("SGO_PRECISION").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_PRECISION)
}

/// Runs `f` at `start`, doubling the precision after each
/// `InsufficientPrecision` until `MAX_PRECISION` has been tried.
pub fn with_precision_retry<T>(start: i64, mut f: impl FnMut(i64) -> Result<T>) -> Result<T> {
    let mut p = start.max(1);
    loop {
        match f(p) {
            Err(Error::InsufficientPrecision) if p < MAX_PRECISION => p = (2 * p).min(MAX_PRECISION),
            r => return r,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    /// Exact zero.
    Infinite,
    /// Zero modulo `t^P`; the true valuation is at least `P`.
    Unknown(i64),
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Lower bound usable in precision bookkeeping.
    pub fn lower_bound(self) -> i64 {
        match self {
            Valuation::Finite(v) | Valuation::Unknown(v) => v,
            Valuation::Infinite => INF,
        }
    }
}

#[inline]
fn padd(a: i64, b: i64) -> i64 {
    if a == INF || b == INF {
        INF
    } else {
        a + b
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentScalar {
    lo: i64,
    /// `coeffs[k]` is the coefficient of `t^(lo+k)`; first and last are nonzero.
    coeffs: Vec<Rational>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        LaurentScalar::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rational::ONE, 0)
    }

    pub fn monomial(c: Rational, e: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentScalar { lo: e, coeffs: vec![c] }
    }

    /// Builds from `(exponent, coefficient)` pairs; repeated exponents add.
    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(terms: I) -> Self {
        let mut ts: Vec<(i64, Rational)> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if ts.is_empty() {
            return Self::zero();
        }
        let lo = ts.iter().map(|t| t.0).min().unwrap();
        let hi = ts.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![Rational::ZERO; (hi - lo + 1) as usize];
        for (e, c) in ts.drain(..) {
            let slot = &mut coeffs[(e - lo) as usize];
            *slot = &*slot + &c;
        }
        Self::from_dense(lo, coeffs)
    }

    pub(crate) fn from_dense(lo: i64, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Self::zero();
        }
        if lead > 0 {
            coeffs.drain(..lead);
        }
        LaurentScalar { lo: lo + lead as i64, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest stored exponent and the dense coefficients from it.
    pub(crate) fn dense(&self) -> (i64, &[Rational]) {
        (self.lo, &self.coeffs)
    }

    pub fn val(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.lo)
    }

    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.lo + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, e: i64) -> Rational {
        if e < self.lo {
            return Rational::ZERO;
        }
        self.coeffs.get((e - self.lo) as usize).cloned().unwrap_or(Rational::ZERO)
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        let lo = self.lo;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (lo + k as i64, c))
    }

    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Drops every term with exponent `>= p`.
    fn truncated(mut self, p: i64) -> Self {
        if p == INF || self.is_zero() {
            return self;
        }
        if p <= self.lo {
            return Self::zero();
        }
        let keep = (p - self.lo) as usize;
        if keep < self.coeffs.len() {
            self.coeffs.truncate(keep);
            return Self::from_dense(self.lo, self.coeffs);
        }
        self
    }
}

impl fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let (sign, mag) = if c.is_negative() { ("-", c.abs()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "t^{e}")?,
                (_, false) => write!(f, "{mag}*t^{e}")?,
            }
        }
        Ok(())
    }
}

/// First `len` coefficients of the product of two dense coefficient runs.
fn convolve(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    if len == 0 {
        return Vec::new();
    }
    if let Some(out) = convolve_small(a, b, len) {
        return out;
    }
    let mut out = vec![Rational::ZERO; len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

fn small_max(a: &[Rational]) -> Option<u128> {
    let mut m = 0u128;
    for x in a {
        m = m.max(x.as_small_int()?.unsigned_abs() as u128);
    }
    Some(m)
}

/// Integer convolution in i128 when every coefficient is a small integer and
/// the accumulated sums cannot overflow.
fn convolve_small(a: &[Rational], b: &[Rational], len: usize) -> Option<Vec<Rational>> {
    let ma = small_max(a)?;
    let mb = small_max(b)?;
    let bound = ma.checked_mul(mb)?.checked_mul(a.len().min(b.len()) as u128)?;
    if bound > i128::MAX as u128 {
        return None;
    }
    let bi: Vec<i128> = b.iter().map(|y| y.as_small_int().unwrap() as i128).collect();
    let mut acc = vec![0i128; len];
    for (i, x) in a.iter().enumerate().take(len) {
        let x = x.as_small_int().unwrap();
        if x == 0 {
            continue;
        }
        let x = x as i128;
        let lim = (len - i).min(bi.len());
        for (slot, &y) in acc[i..i + lim].iter_mut().zip(&bi[..lim]) {
            *slot += x * y;
        }
    }
    Some(acc.into_iter().map(Rational::from_i128_int).collect())
}

/// `acc[base..] ±= x * y` on integer coefficient slices.
fn cross_accumulate<T>(acc: &mut [T], x: &[Rational], y: &[Rational], base: usize, neg: bool)
where
    T: Copy + From<i64> + std::ops::Mul<Output = T> + std::ops::AddAssign + std::ops::Neg<Output = T>,
{
    let yi: Vec<T> = y.iter().map(|c| T::from(c.as_small_int().unwrap())).collect();
    for (i, c) in x.iter().enumerate() {
        let start = base + i;
        if start >= acc.len() {
            break;
        }
        let c = c.as_small_int().unwrap();
        if c == 0 {
            continue;
        }
        let c = if neg { -T::from(c) } else { T::from(c) };
        for (slot, &d) in acc[start..].iter_mut().zip(&yi) {
            *slot += c * d;
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    poly: LaurentScalar,
    prec: i64,
}

impl TruncatedSeries {
    pub fn exact(poly: LaurentScalar) -> Self {
        TruncatedSeries { poly, prec: INF }
    }

    /// `poly` known modulo `t^prec`; higher terms are discarded.
    pub fn new(poly: LaurentScalar, prec: Option<i64>) -> Self {
        let prec = prec.unwrap_or(INF);
        TruncatedSeries { poly: poly.truncated(prec), prec }
    }

    pub fn zero() -> Self {
        Self::exact(LaurentScalar::zero())
    }

    pub fn one() -> Self {
        Self::exact(LaurentScalar::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::exact(LaurentScalar::monomial(Rational::from_int(n), 0))
    }

    /// Exact `c·t^e`.
    pub fn monomial(c: Rational, e: i64) -> Self {
        Self::exact(LaurentScalar::monomial(c, e))
    }

    /// Exact `t^e`.
    pub fn t_pow(e: i64) -> Self {
        Self::monomial(Rational::ONE, e)
    }

    pub fn zero_mod(p: i64) -> Self {
        TruncatedSeries { poly: LaurentScalar::zero(), prec: p }
    }

    pub fn poly(&self) -> &LaurentScalar {
        &self.poly
    }

    /// `None` means infinite precision.
    pub fn precision(&self) -> Option<i64> {
        (self.prec != INF).then_some(self.prec)
    }

    pub(crate) fn prec_raw(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec == INF
    }

    pub fn is_exact_zero(&self) -> bool {
        self.prec == INF && self.poly.is_zero()
    }

    pub fn val(&self) -> Valuation {
        match self.poly.val() {
            Some(v) => Valuation::Finite(v),
            None if self.prec == INF => Valuation::Infinite,
            None => Valuation::Unknown(self.prec),
        }
    }

    pub fn coeff(&self, e: i64) -> Result<Rational> {
        if e >= self.prec {
            return Err(Error::InsufficientPrecision);
        }
        Ok(self.poly.coeff(e))
    }

    pub fn residue(&self) -> Result<Rational> {
        self.coeff(-1)
    }

    pub fn truncate(&self, p: i64) -> Self {
        let prec = self.prec.min(p);
        TruncatedSeries { poly: self.poly.clone().truncated(prec), prec }
    }

    /// [`TruncatedSeries::shift`] without copying the coefficients.
    pub fn into_shift(mut self, k: i64) -> Self {
        if !self.poly.is_zero() {
            self.poly.lo += k;
        }
        self.prec = padd(self.prec, k);
        self
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut poly = self.poly.clone();
        if !poly.is_zero() {
            poly.lo += k;
        }
        TruncatedSeries { poly, prec: padd(self.prec, k) }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let coeffs = self.poly.coeffs.iter().map(|x| x * c).collect();
        TruncatedSeries {
            poly: LaurentScalar { lo: self.poly.lo, coeffs },
            prec: self.prec,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    /// `self·a − f·g`, the Bareiss cross term, with an allocation-light
    /// integer path.
    pub fn mul_sub(&self, a: &Self, f: &Self, g: &Self) -> Self {
        if f.is_exact_zero() || g.is_exact_zero() {
            return self.mul(a);
        }
        let ops = [&self.poly, &a.poly, &f.poly, &g.poly];
        if ops.iter().any(|x| x.is_zero()) {
            return self.mul(a).sub(&f.mul(g));
        }
        let mut maxes = [0u128; 4];
        for (m, x) in maxes.iter_mut().zip(ops) {
            match small_max(&x.coeffs) {
                Some(v) => *m = v,
                None => return self.mul(a).sub(&f.mul(g)),
            }
        }
        let b1 = maxes[0].checked_mul(maxes[1]).and_then(|x| x.checked_mul(self.poly.coeffs.len().min(a.poly.coeffs.len()) as u128));
        let b2 = maxes[2].checked_mul(maxes[3]).and_then(|x| x.checked_mul(f.poly.coeffs.len().min(g.poly.coeffs.len()) as u128));
        let bound = match b1.zip(b2).and_then(|(x, y)| x.checked_add(y)) {
            Some(b) if b <= i128::MAX as u128 => b,
            _ => return self.mul(a).sub(&f.mul(g)),
        };
        let (l1, l2) = (self.poly.lo + a.poly.lo, f.poly.lo + g.poly.lo);
        let prec = padd(self.poly.lo, a.prec).min(padd(a.poly.lo, self.prec)).min(padd(f.poly.lo, g.prec)).min(padd(g.poly.lo, f.prec));
        let lo = l1.min(l2);
        let top = |x: &LaurentScalar, y: &LaurentScalar| x.lo + y.lo + (x.coeffs.len() + y.coeffs.len()) as i64 - 2;
        let mut hi = top(&self.poly, &a.poly).max(top(&f.poly, &g.poly));
        if prec != INF {
            hi = hi.min(prec - 1);
        }
        if hi < lo {
            return Self::zero_mod(prec);
        }
        let len = (hi - lo + 1) as usize;
        let pairs = [(&self.poly.coeffs, &a.poly.coeffs, (l1 - lo) as usize, false), (&f.poly.coeffs, &g.poly.coeffs, (l2 - lo) as usize, true)];
        let coeffs: Vec<Rational> = if bound <= i64::MAX as u128 {
            let mut acc = vec![0i64; len];
            for (x, y, base, neg) in pairs {
                cross_accumulate(&mut acc, x, y, base, neg);
            }
            acc.into_iter().map(Rational::from_int).collect()
        } else {
            let mut acc = vec![0i128; len];
            for (x, y, base, neg) in pairs {
                cross_accumulate(&mut acc, x, y, base, neg);
            }
            acc.into_iter().map(Rational::from_i128_int).collect()
        };
        TruncatedSeries { poly: LaurentScalar::from_dense(lo, coeffs), prec }
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let prec = self.prec.min(other.prec);
        let (a, b) = (&self.poly, &other.poly);
        if b.is_zero() {
            return self.truncate(prec);
        }
        if a.is_zero() {
            let o = other.truncate(prec);
            return if negate { o.neg() } else { o };
        }
        let lo = a.lo.min(b.lo);
        let hi = a.degree().unwrap().max(b.degree().unwrap());
        let hi = if prec == INF { hi } else { hi.min(prec - 1) };
        if hi < lo {
            return Self::zero_mod(prec);
        }
        let mut coeffs = Vec::with_capacity((hi - lo + 1) as usize);
        for e in lo..=hi {
            let x = a.coeff(e);
            let y = b.coeff(e);
            coeffs.push(if negate { &x - &y } else { &x + &y });
        }
        TruncatedSeries { poly: LaurentScalar::from_dense(lo, coeffs), prec }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            poly: LaurentScalar {
                lo: self.poly.lo,
                coeffs: self.poly.coeffs.iter().map(|c| -c).collect(),
            },
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        let va = self.val().lower_bound();
        let vb = other.val().lower_bound();
        let prec = padd(va, other.prec).min(padd(vb, self.prec));
        if self.poly.is_zero() || other.poly.is_zero() {
            return Self::zero_mod(prec);
        }
        let lo = va + vb;
        let full = self.poly.coeffs.len() + other.poly.coeffs.len() - 1;
        let len = if prec == INF { full } else { full.min((prec - lo).max(0) as usize) };
        let coeffs = convolve(&self.poly.coeffs, &other.poly.coeffs, len);
        TruncatedSeries { poly: LaurentScalar::from_dense(lo, coeffs), prec }
    }

    /// Quotient `self / other`.
    ///
    /// `cap` bounds the number of coefficients produced past the leading one
    /// when the exact quotient is an infinite series.
    pub fn div(&self, other: &Self, cap: i64) -> Result<Self> {
        let vb = match other.val() {
            Valuation::Finite(v) => v,
            Valuation::Infinite => return Err(Error::ZeroDivisor),
            Valuation::Unknown(_) => return Err(Error::InsufficientPrecision),
        };
        if self.is_exact_zero() {
            return Ok(Self::zero());
        }
        let u = &other.poly.coeffs;
        let rel_u = if other.prec == INF { INF } else { other.prec - vb };
        let a_prec = if self.prec == INF { INF } else { self.prec - vb };
        let va = match self.poly.val() {
            Some(v) => v - vb,
            None => return Ok(Self::zero_mod(a_prec)),
        };
        let mut prec = a_prec.min(padd(va, rel_u));
        let bounded = prec != INF;
        prec = prec.min(padd(va, cap.max(1)));
        let len = (prec - va) as usize;

        // Long division from the low end; an exact quotient stops as soon as
        // the remainder vanishes.
        let a = &self.poly.coeffs;
        let u0 = &u[0];
        let width = if bounded { len } else { len.max(a.len()) + u.len() };
        let mut rem: Vec<Rational> = a.iter().take(width).cloned().collect();
        let mut q = Vec::with_capacity(len.min(width));
        for k in 0..len {
            // Only the next u.len() slots can have been touched so far.
            let reach = width.min(k + u.len()).max(k + 1);
            if rem.len() < reach {
                rem.resize(reach, Rational::ZERO);
            }
            let c = if rem[k].is_zero() { Rational::ZERO } else { &rem[k] / u0 };
            if !c.is_zero() {
                let lim = u.len().min(width - k);
                for j in 1..lim {
                    if !u[j].is_zero() {
                        rem[k + j] = &rem[k + j] - &(&c * &u[j]);
                    }
                }
            }
            q.push(c);
            if !bounded && k + 1 >= a.len() && rem[k + 1..].iter().all(|x| x.is_zero()) {
                return Ok(Self::exact(LaurentScalar::from_dense(va, q)));
            }
        }
        Ok(TruncatedSeries { poly: LaurentScalar::from_dense(va, q), prec })
    }

    /// Inverse known to `target` coefficients past the leading one, or fewer
    /// when `self` itself is not known that far. Exact monomials invert exactly.
    pub fn invert(&self, target: i64) -> Result<Self> {
        Self::one().div(self, target)
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)?;
        if self.prec != INF {
            write!(f, " + O(t^{})", self.prec)?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::add(self, rhs)
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::sub(self, rhs)
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::mul(self, rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries::neg(self)
    }
}
