//! Twisted polynomials `Σ c_i τ^i` with `τ·c = c^p·τ`.
//!
//! Three shapes share the commutation rule: [`OrePoly`] (finitely many
//! nonnegative powers, over `k` or over Laurent scalars), [`SkewLaurentPoly`]
//! (finitely many signed powers over `k`) and [`TauSeries`] (nonpositive
//! powers truncated at a depth, over Laurent scalars).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::{FFElem, FiniteField};
use crate::laurent::{LaurentElement, Q};

/// A coefficient ring carrying the Frobenius action needed by `τ`.
pub trait TwistScalar: Clone + PartialEq + fmt::Debug {
    fn zero_in(field: &Arc<FiniteField>) -> Self;
    fn one_in(field: &Arc<FiniteField>) -> Self;
    fn base_field(&self) -> &Arc<FiniteField>;
    fn add(&self, other: &Self) -> Result<Self>;
    fn mul(&self, other: &Self) -> Result<Self>;
    fn negate(&self) -> Self;
    /// `self^{p^n}`.
    fn twist(&self, n: i64) -> Self;
    /// True only for a zero that carries no precision information.
    fn is_exact_zero(&self) -> bool;
    fn to_laurent(&self) -> LaurentElement;
}

impl TwistScalar for FFElem {
    fn zero_in(field: &Arc<FiniteField>) -> Self {
        FFElem::zero(field)
    }
    fn one_in(field: &Arc<FiniteField>) -> Self {
        FFElem::one(field)
    }
    fn base_field(&self) -> &Arc<FiniteField> {
        self.field()
    }
    fn add(&self, other: &Self) -> Result<Self> {
        self.checked_add(other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)
    }
    fn negate(&self) -> Self {
        -self
    }
    fn twist(&self, n: i64) -> Self {
        self.frobenius_pow(n)
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn to_laurent(&self) -> LaurentElement {
        LaurentElement::constant(self)
    }
}

impl TwistScalar for LaurentElement {
    fn zero_in(field: &Arc<FiniteField>) -> Self {
        LaurentElement::zero(field)
    }
    fn one_in(field: &Arc<FiniteField>) -> Self {
        LaurentElement::one(field)
    }
    fn base_field(&self) -> &Arc<FiniteField> {
        self.field()
    }
    fn add(&self, other: &Self) -> Result<Self> {
        self.checked_add(other)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)
    }
    fn negate(&self) -> Self {
        LaurentElement::neg(self)
    }
    fn twist(&self, n: i64) -> Self {
        self.p_power(n)
    }
    fn is_exact_zero(&self) -> bool {
        LaurentElement::is_exact_zero(self)
    }
    fn to_laurent(&self) -> LaurentElement {
        self.clone()
    }
}

/// Things that act on `K^perf` through `f(ξ) = Σ f_i ξ^{p^i}`.
pub trait TwistAction {
    fn apply(&self, xi: &LaurentElement) -> Result<LaurentElement>;
}

pub fn ore_apply<T: TwistAction + ?Sized>(f: &T, xi: &LaurentElement) -> Result<LaurentElement> {
    f.apply(xi)
}

/// `Σ_{i ≥ 0} c_i τ^i`, dense; trailing exact zeros are trimmed.
#[derive(Clone, PartialEq)]
pub struct OrePoly<S: TwistScalar> {
    field: Arc<FiniteField>,
    coeffs: Vec<S>,
}

/// Twisted polynomials over the residue field.
pub type KPoly = OrePoly<FFElem>;

impl<S: TwistScalar> fmt::Debug for OrePoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exact_zero())
            .map(|(i, c)| match i {
                0 => format!("({c:?})"),
                1 => format!("({c:?})τ"),
                _ => format!("({c:?})τ^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<S: TwistScalar> OrePoly<S> {
    pub fn new(field: &Arc<FiniteField>, mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            coeffs.pop();
        }
        Self {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn zero(field: &Arc<FiniteField>) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &Arc<FiniteField>) -> Self {
        Self::new(field, vec![S::one_in(field)])
    }

    /// `c·τ^n`.
    pub fn monomial(c: S, n: usize) -> Self {
        let field = c.base_field().clone();
        let mut coeffs = vec![S::zero_in(&field); n];
        coeffs.push(c);
        Self::new(&field, coeffs)
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// τ-degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> S {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| S::zero_in(&self.field))
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    /// Least `i` with a coefficient that is not an exact zero.
    pub fn lowest_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_exact_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i))?);
        }
        Ok(Self::new(&self.field, out))
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|c| c.negate()).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// `c·self` with `c` on the left.
    pub fn scale_left(&self, c: &S) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|x| c.mul(x)).collect::<Result<_>>()?;
        Ok(Self::new(&self.field, coeffs))
    }

    /// Twisted product: `(fg)_ℓ = Σ_{i+j=ℓ} f_i g_j^{p^i}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.field));
        }
        let mut out = vec![S::zero_in(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, fi) in self.coeffs.iter().enumerate() {
            if fi.is_exact_zero() {
                continue;
            }
            for (j, gj) in other.coeffs.iter().enumerate() {
                if gj.is_exact_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&fi.mul(&gj.twist(i as i64))?)?;
            }
        }
        Ok(Self::new(&self.field, out))
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Coefficientwise Laurent image.
    pub fn to_laurent(&self) -> OrePoly<LaurentElement> {
        OrePoly::new(&self.field, self.coeffs.iter().map(|c| c.to_laurent()).collect())
    }
}

pub fn ore_mul<S: TwistScalar>(f: &OrePoly<S>, g: &OrePoly<S>) -> Result<OrePoly<S>> {
    f.mul(g)
}

impl<S: TwistScalar> TwistAction for OrePoly<S> {
    fn apply(&self, xi: &LaurentElement) -> Result<LaurentElement> {
        let mut acc = LaurentElement::zero(&self.field);
        let mut power = xi.clone();
        for c in &self.coeffs {
            if !c.is_exact_zero() {
                acc = acc.checked_add(&c.to_laurent().checked_mul(&power)?)?;
            }
            power = power.p_power(1);
        }
        Ok(acc)
    }
}

impl KPoly {
    /// Builds from residue-field codes, lowest degree first.
    pub fn from_codes(field: &Arc<FiniteField>, codes: &[u32]) -> Self {
        Self::new(field, codes.iter().map(|&c| FFElem::from_code(field, c)).collect())
    }

    /// `f = q·g + r` with `deg r < deg g`.
    pub fn left_divmod(&self, g: &Self) -> Result<(Self, Self)> {
        let m = g.degree().ok_or(Error::DivisionByZero)?;
        let lg = g.leading().unwrap().clone();
        let mut r = self.clone();
        let mut q = vec![FFElem::zero(&self.field); self.coeffs.len().saturating_sub(m)];
        while let Some(dr) = r.degree() {
            if dr < m {
                break;
            }
            let delta = dr - m;
            // (c τ^δ)(lg τ^m) = c·lg^{p^δ} τ^{δ+m}
            let c = r.leading().unwrap().checked_div(&lg.frobenius_pow(delta as i64))?;
            q[delta] = &q[delta] + &c;
            let t = Self::monomial(c, delta).mul(g)?;
            r = r.sub(&t)?;
        }
        Ok((Self::new(&self.field, q), r))
    }
}

pub fn left_divmod(f: &KPoly, g: &KPoly) -> Result<(KPoly, KPoly)> {
    f.left_divmod(g)
}

/// `Σ_ν c_ν τ^ν` over `k`, finite support in `ν ∈ Z`.
#[derive(Clone, PartialEq, Eq)]
pub struct SkewLaurentPoly {
    field: Arc<FiniteField>,
    low: i64,
    // Codes of τ^{low}, τ^{low+1}, ...; both ends nonzero unless empty.
    coeffs: Vec<u32>,
}

impl fmt::Debug for SkewLaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .into_iter()
            .map(|(n, c)| match n {
                0 => format!("({c})"),
                1 => format!("({c})τ"),
                _ => format!("({c})τ^{n}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl SkewLaurentPoly {
    fn from_dense(field: &Arc<FiniteField>, low: i64, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|&&c| c == 0).count();
        coeffs.drain(..lead);
        let low = if coeffs.is_empty() { 0 } else { low + lead as i64 };
        Self {
            field: field.clone(),
            low,
            coeffs,
        }
    }

    pub fn from_terms(field: &Arc<FiniteField>, terms: impl IntoIterator<Item = (i64, u32)>) -> Self {
        let terms: Vec<(i64, u32)> = terms.into_iter().collect();
        let Some(low) = terms.iter().map(|t| t.0).min() else {
            return Self::zero(field);
        };
        let high = terms.iter().map(|t| t.0).max().unwrap();
        let mut dense = vec![0u32; (high - low + 1) as usize];
        for (n, c) in terms {
            let slot = &mut dense[(n - low) as usize];
            *slot = field.add_code(*slot, c);
        }
        Self::from_dense(field, low, dense)
    }

    pub fn zero(field: &Arc<FiniteField>) -> Self {
        Self {
            field: field.clone(),
            low: 0,
            coeffs: Vec::new(),
        }
    }

    /// `c·τ^n`.
    pub fn monomial(c: &FFElem, n: i64) -> Self {
        Self::from_dense(c.field(), n, vec![c.code()])
    }

    pub fn one(field: &Arc<FiniteField>) -> Self {
        Self::monomial(&FFElem::one(field), 0)
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.low)
    }

    pub fn max_exponent(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i64 - 1)
    }

    /// Nonzero terms `(ν, c_ν)`, ascending in `ν`.
    pub fn terms(&self) -> Vec<(i64, FFElem)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (self.low + i as i64, FFElem::from_code(&self.field, c)))
            .collect()
    }

    pub fn coeff(&self, n: i64) -> FFElem {
        let code = if n < self.low {
            0
        } else {
            self.coeffs.get((n - self.low) as usize).copied().unwrap_or(0)
        };
        FFElem::from_code(&self.field, code)
    }

    pub fn leading(&self) -> Option<FFElem> {
        self.coeffs.last().map(|&c| FFElem::from_code(&self.field, c))
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = self.max_exponent().unwrap().max(other.max_exponent().unwrap());
        let mut dense = vec![0u32; (high - low + 1) as usize];
        for src in [self, other] {
            for (i, &c) in src.coeffs.iter().enumerate() {
                let slot = &mut dense[(src.low - low) as usize + i];
                *slot = self.field.add_code(*slot, c);
            }
        }
        Self::from_dense(&self.field, low, dense)
    }

    pub fn neg(&self) -> Self {
        Self {
            field: self.field.clone(),
            low: self.low,
            coeffs: self.coeffs.iter().map(|&c| self.field.neg_code(c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let f = &self.field;
        let mut dense = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let shift = self.low + i as i64;
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let t = f.mul_code(a, f.frob_code(b, shift));
                dense[i + j] = f.add_code(dense[i + j], t);
            }
        }
        Self::from_dense(f, self.low + other.low, dense)
    }

    /// `τ^n·self`.
    pub fn shift_left(&self, n: i64) -> Self {
        Self {
            field: self.field.clone(),
            low: if self.is_zero() { 0 } else { self.low + n },
            coeffs: self.coeffs.iter().map(|&c| self.field.frob_code(c, n)).collect(),
        }
    }

    pub fn scale_left(&self, c: &FFElem) -> Self {
        Self::from_dense(
            &self.field,
            self.low,
            self.coeffs.iter().map(|&x| self.field.mul_code(c.code(), x)).collect(),
        )
    }

    /// The same element in `k[τ]`, if it has no negative powers.
    pub fn to_kpoly(&self) -> Option<KPoly> {
        if self.is_zero() {
            return Some(KPoly::zero(&self.field));
        }
        if self.low < 0 {
            return None;
        }
        let mut codes = vec![0u32; self.low as usize];
        codes.extend_from_slice(&self.coeffs);
        Some(KPoly::from_codes(&self.field, &codes))
    }

    pub fn from_kpoly(f: &KPoly) -> Self {
        Self::from_dense(f.field(), 0, f.coeffs().iter().map(|c| c.code()).collect())
    }
}

impl TwistAction for SkewLaurentPoly {
    fn apply(&self, xi: &LaurentElement) -> Result<LaurentElement> {
        let mut acc = LaurentElement::zero(&self.field);
        for (n, c) in self.terms() {
            acc = acc.checked_add(&xi.p_power(n).scale(&c))?;
        }
        Ok(acc)
    }
}

/// `Σ_{-J ≤ j ≤ 0} x_j τ^j` with Laurent coefficients.
#[derive(Clone, PartialEq)]
pub struct TauSeries {
    field: Arc<FiniteField>,
    // coeffs[i] is the coefficient of τ^{-i}.
    coeffs: Vec<LaurentElement>,
}

impl fmt::Debug for TauSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| format!("[τ^-{i}] {c}"))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl TauSeries {
    /// Coefficients listed from `τ^0` downward.
    pub fn new(field: &Arc<FiniteField>, coeffs: Vec<LaurentElement>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("series needs at least the τ^0 term".into()));
        }
        Ok(Self {
            field: field.clone(),
            coeffs,
        })
    }

    /// `1` truncated at depth `j`.
    pub fn one(field: &Arc<FiniteField>, depth: usize) -> Self {
        let mut coeffs = vec![LaurentElement::zero(field); depth + 1];
        coeffs[0] = LaurentElement::one(field);
        Self {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn depth(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `τ^j` for `-depth ≤ j ≤ 0`.
    pub fn coeff(&self, j: i64) -> &LaurentElement {
        assert!(j <= 0 && (-j) as usize <= self.depth(), "index {j} outside the series");
        &self.coeffs[(-j) as usize]
    }

    pub fn coeffs(&self) -> &[LaurentElement] {
        &self.coeffs
    }

    /// `z_j = x_j^{p^{|j|}}`, which lies in `K` when `x_j ∈ K^{1/p^{|j|}}`.
    pub fn z(&self, j: i64) -> LaurentElement {
        self.coeff(j).p_power(-j)
    }

    pub fn truncate_depth(&self, depth: usize) -> Self {
        Self {
            field: self.field.clone(),
            coeffs: self.coeffs[..=depth.min(self.depth())].to_vec(),
        }
    }

    /// `(xy)_ℓ = Σ_{i+j=ℓ} x_i y_j^{p^i}` for `-depth ≤ ℓ ≤ 0`.
    pub fn mul(&self, other: &Self, depth: usize) -> Result<Self> {
        if self.depth() < depth || other.depth() < depth {
            return Err(Error::PrecisionExhausted(format!(
                "series product to depth {depth} needs both factors to that depth"
            )));
        }
        let mut out = Vec::with_capacity(depth + 1);
        for l in 0..=depth {
            // i = -a, j = -(l - a)
            let mut acc = LaurentElement::zero(&self.field);
            for a in 0..=l {
                let xi = &self.coeffs[a];
                let yj = &other.coeffs[l - a];
                if xi.is_exact_zero() || yj.is_exact_zero() {
                    continue;
                }
                acc = acc.checked_add(&xi.checked_mul(&yj.p_power(-(a as i64)))?)?;
            }
            out.push(acc);
        }
        Self::new(&self.field, out)
    }

    /// Two-sided inverse to `depth`, solved downward from `y_0 = x_0^{-1}`.
    pub fn inverse(&self, depth: usize) -> Result<Self> {
        if self.depth() < depth {
            return Err(Error::PrecisionExhausted(format!(
                "inverse to depth {depth} of a series known to depth {}",
                self.depth()
            )));
        }
        let x0 = &self.coeffs[0];
        match x0.valuation() {
            Ok(v) if v == Q::from_integer(0) => {}
            Err(Error::PrecisionExhausted(m)) => return Err(Error::PrecisionExhausted(m)),
            _ => return Err(Error::NotAUnit),
        }
        let x0inv = x0.inverse()?;
        let mut y: Vec<LaurentElement> = vec![x0inv.clone()];
        for l in 1..=depth {
            // y_ℓ = -x_0^{-1} Σ_{ℓ<j≤0} x_{ℓ-j} y_j^{p^{ℓ-j}}, here ℓ = -l, j = -b.
            let mut acc = LaurentElement::zero(&self.field);
            for (b, yb) in y.iter().enumerate() {
                let a = l - b;
                let xa = &self.coeffs[a];
                if xa.is_exact_zero() || yb.is_exact_zero() {
                    continue;
                }
                acc = acc.checked_add(&xa.checked_mul(&yb.p_power(-(a as i64)))?)?;
            }
            y.push(x0inv.checked_mul(&acc)?.neg());
        }
        Self::new(&self.field, y)
    }

    /// `true` if every coefficient agrees with `other` below exponent `bound`.
    pub fn agrees_below(&self, other: &Self, bound: Q) -> Result<bool> {
        if self.depth() != other.depth() {
            return Ok(false);
        }
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            if !a.agrees_below(b, bound)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Least valuation of `x - 1` over the coefficients; `None` if it is exactly 0.
    pub fn valuation_of_deviation(&self) -> Option<Q> {
        let one = LaurentElement::one(&self.field);
        let mut best: Option<Q> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            let dev = if i == 0 { c - &one } else { c.clone() };
            if let Some(v) = dev.valuation_lower_bound() {
                best = Some(best.map_or(v, |b: Q| b.min(v)));
            }
        }
        best
    }
}

impl TwistAction for TauSeries {
    fn apply(&self, xi: &LaurentElement) -> Result<LaurentElement> {
        let mut acc = LaurentElement::zero(&self.field);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            acc = acc.checked_add(&c.checked_mul(&xi.p_power(-(i as i64)))?)?;
        }
        Ok(acc)
    }
}

pub fn series_mul(x: &TauSeries, y: &TauSeries, depth: usize) -> Result<TauSeries> {
    x.mul(y, depth)
}

pub fn series_inverse(x: &TauSeries, depth: usize) -> Result<TauSeries> {
    x.inverse(depth)
}

/// Coefficients of `f·x` for a polynomial `f` of degree `r` and a series `x`
/// of depth `J`, for the exponents `r - J ..= r` that are fully determined.
pub fn poly_times_series(f: &OrePoly<LaurentElement>, x: &TauSeries) -> Result<Vec<(i64, LaurentElement)>> {
    let r = f.degree().unwrap_or(0) as i64;
    let depth = x.depth() as i64;
    let field = x.field();
    let mut out = Vec::new();
    for l in (r - depth)..=r {
        let mut acc = LaurentElement::zero(field);
        for i in 0..=r {
            let j = l - i;
            if j > 0 || j < -depth {
                continue;
            }
            let fi = f.coeff(i as usize);
            if fi.is_exact_zero() {
                continue;
            }
            acc = acc.checked_add(&fi.checked_mul(&x.coeff(j).p_power(i))?)?;
        }
        out.push((l, acc));
    }
    Ok(out)
}

/// Coefficients of `x·g` on the same determined window as [`poly_times_series`].
pub fn series_times_poly(x: &TauSeries, g: &OrePoly<LaurentElement>) -> Result<Vec<(i64, LaurentElement)>> {
    let r = g.degree().unwrap_or(0) as i64;
    let depth = x.depth() as i64;
    let field = x.field();
    let mut out = Vec::new();
    for l in (r - depth)..=r {
        let mut acc = LaurentElement::zero(field);
        for j in (l - r).max(-depth)..=l.min(0) {
            let gi = g.coeff((l - j) as usize);
            if gi.is_exact_zero() {
                continue;
            }
            acc = acc.checked_add(&x.coeff(j).checked_mul(&gi.p_power(j))?)?;
        }
        out.push((l, acc));
    }
    Ok(out)
}
