//! Laurent series over `k` in a fractional power of the uniformizer.
//!
//! An element at level `e` lives in `k((π^{1/p^e}))`; the integer key `n`
//! stands for the exponent `n / p^e`. Elements carry a precision cap: keys at
//! or above `prec` are unknown. Every value is kept in canonical form, so
//! structural equality is mathematical equality (including the precision).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ff::{FFElem, FiniteField};

pub type Q = Ratio<i64>;

/// An element of `K^{1/p^e}` with a precision cap.
#[derive(Clone)]
pub struct LaurentElement {
    field: Arc<FiniteField>,
    level: u32,
    // Sorted by key, codes nonzero, keys below `prec`.
    terms: Vec<(i64, u32)>,
    // `None` means exact.
    prec: Option<i64>,
}

impl PartialEq for LaurentElement {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level
            && self.terms == other.terms
            && self.prec == other.prec
            && (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field)
    }
}

impl Eq for LaurentElement {}

fn ppow(p: u64, e: u32) -> i64 {
    (p as i64).checked_pow(e).expect("exponent level overflow")
}

/// `p`-adic valuation of the denominator of a reduced rational.
fn denominator_level(q: &Q, p: u64) -> Result<u32> {
    let mut den = *q.denom();
    let mut e = 0;
    while den % p as i64 == 0 {
        den /= p as i64;
        e += 1;
    }
    if den != 1 {
        return Err(Error::InvalidInput(format!(
            "exponent {q} does not have a power of {p} as denominator"
        )));
    }
    Ok(e)
}

impl LaurentElement {
    /// Builds an element from `(key, coefficient)` pairs at `level`. Repeated
    /// keys are summed and keys at or above `prec` are discarded.
    pub fn from_terms(
        field: &Arc<FiniteField>,
        level: u32,
        terms: impl IntoIterator<Item = (i64, FFElem)>,
        prec: Option<i64>,
    ) -> Result<Self> {
        let mut raw = Vec::new();
        for (k, c) in terms {
            if !Arc::ptr_eq(c.field(), field) && **c.field() != **field {
                return Err(Error::FieldMismatch);
            }
            raw.push((k, c.code()));
        }
        Ok(Self::from_codes(field, level, raw, prec))
    }

    pub(crate) fn from_codes(
        field: &Arc<FiniteField>,
        level: u32,
        mut raw: Vec<(i64, u32)>,
        prec: Option<i64>,
    ) -> Self {
        raw.sort_unstable_by_key(|t| t.0);
        let mut terms: Vec<(i64, u32)> = Vec::with_capacity(raw.len());
        for (k, c) in raw {
            if prec.is_some_and(|n| k >= n) {
                continue;
            }
            match terms.last_mut() {
                Some(last) if last.0 == k => last.1 = field.add_code(last.1, c),
                _ => terms.push((k, c)),
            }
        }
        terms.retain(|t| t.1 != 0);
        let mut out = Self {
            field: field.clone(),
            level,
            terms,
            prec,
        };
        out.canonicalize();
        out
    }

    fn canonicalize(&mut self) {
        let p = self.field.characteristic() as i64;
        while self.level > 0
            && self.terms.iter().all(|t| t.0 % p == 0)
            && self.prec.is_none_or(|n| n % p == 0)
        {
            for t in &mut self.terms {
                t.0 /= p;
            }
            self.prec = self.prec.map(|n| n / p);
            self.level -= 1;
        }
        if self.terms.is_empty() && self.prec.is_none() {
            self.level = 0;
        }
    }

    pub fn zero(field: &Arc<FiniteField>) -> Self {
        Self::from_codes(field, 0, Vec::new(), None)
    }

    pub fn one(field: &Arc<FiniteField>) -> Self {
        Self::from_codes(field, 0, vec![(0, 1)], None)
    }

    /// `O(π^n)`: zero known only below exponent `n`.
    pub fn big_o(field: &Arc<FiniteField>, n: Q) -> Result<Self> {
        let e = denominator_level(&n, field.characteristic())?;
        let key = (n * ppow(field.characteristic(), e)).to_integer();
        Ok(Self::from_codes(field, e, Vec::new(), Some(key)))
    }

    pub fn constant(c: &FFElem) -> Self {
        Self::from_codes(c.field(), 0, vec![(0, c.code())], None)
    }

    /// Exact monomial `c·π^{exponent}`.
    pub fn monomial(c: &FFElem, exponent: Q) -> Result<Self> {
        let field = c.field();
        let e = denominator_level(&exponent, field.characteristic())?;
        let key = (exponent * ppow(field.characteristic(), e)).to_integer();
        Ok(Self::from_codes(field, e, vec![(key, c.code())], None))
    }

    /// Exact `π^n`.
    pub fn pi_pow(field: &Arc<FiniteField>, n: i64) -> Self {
        Self::from_codes(field, 0, vec![(n, 1)], None)
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// True when no term is known to be nonzero (exact zero or `O(π^n)`).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.prec.is_none()
    }

    /// Raw precision key at the current level.
    pub fn prec_key(&self) -> Option<i64> {
        self.prec
    }

    pub fn keys(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.terms.iter().copied()
    }

    fn denom(&self) -> i64 {
        ppow(self.field.characteristic(), self.level)
    }

    /// Precision as an exponent of `π`; `None` when exact.
    pub fn precision(&self) -> Option<Q> {
        self.prec.map(|n| Q::new(n, self.denom()))
    }

    /// Terms as `(exponent, coefficient)`, ascending.
    pub fn terms(&self) -> Vec<(Q, FFElem)> {
        let den = self.denom();
        self.terms
            .iter()
            .map(|&(k, c)| (Q::new(k, den), FFElem::from_code(&self.field, c)))
            .collect()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of `π^{exponent}`; errors if that exponent is beyond the precision.
    pub fn coeff(&self, exponent: Q) -> Result<FFElem> {
        if let Some(n) = self.precision() {
            if exponent >= n {
                return Err(Error::PrecisionExhausted(format!(
                    "coefficient of π^{exponent} requested, precision is {n}"
                )));
            }
        }
        let scaled = exponent * self.denom();
        if !scaled.is_integer() {
            return Ok(FFElem::zero(&self.field));
        }
        let key = scaled.to_integer();
        let code = self
            .terms
            .binary_search_by_key(&key, |t| t.0)
            .map(|i| self.terms[i].1)
            .unwrap_or(0);
        Ok(FFElem::from_code(&self.field, code))
    }

    /// Least exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Result<Q> {
        match self.terms.first() {
            Some(&(k, _)) => Ok(Q::new(k, self.denom())),
            None if self.prec.is_none() => Err(Error::ZeroValuation),
            None => Err(Error::PrecisionExhausted(format!(
                "element is O(π^{}) and has no known leading term",
                self.precision().unwrap()
            ))),
        }
    }

    /// Valuation, reading `O(π^n)` as `n` and an exact zero as `None`.
    pub fn valuation_lower_bound(&self) -> Option<Q> {
        match self.terms.first() {
            Some(&(k, _)) => Some(Q::new(k, self.denom())),
            None => self.precision(),
        }
    }

    pub fn leading_coefficient(&self) -> Result<FFElem> {
        self.valuation()?;
        Ok(FFElem::from_code(&self.field, self.terms[0].1))
    }

    /// The same element at a finer level `e >= self.level`; not canonical.
    fn keys_at(&self, e: u32) -> (Vec<(i64, u32)>, Option<i64>) {
        let m = ppow(self.field.characteristic(), e - self.level);
        (
            self.terms.iter().map(|&(k, c)| (k * m, c)).collect(),
            self.prec.map(|n| n * m),
        )
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        let e = self.level.max(other.level);
        let (mut a, pa) = self.keys_at(e);
        let (b, pb) = other.keys_at(e);
        a.extend(b);
        let prec = min_opt(pa, pb);
        Ok(Self::from_codes(&self.field, e, a, prec))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Self::zero(&self.field));
        }
        let e = self.level.max(other.level);
        let (a, pa) = self.keys_at(e);
        let (b, pb) = other.keys_at(e);
        let va = a.first().map(|t| t.0).or(pa).unwrap();
        let vb = b.first().map(|t| t.0).or(pb).unwrap();
        let prec = min_opt(pa.map(|n| n + vb), pb.map(|n| n + va));
        let f = &self.field;
        let mut raw = Vec::with_capacity(a.len() * b.len());
        for &(ka, ca) in &a {
            for &(kb, cb) in &b {
                let k = ka + kb;
                if prec.is_some_and(|n| k >= n) {
                    // `b` is sorted, so later keys are larger still.
                    break;
                }
                raw.push((k, f.mul_code(ca, cb)));
            }
        }
        Ok(Self::from_codes(f, e, raw, prec))
    }

    pub fn neg(&self) -> Self {
        Self {
            field: self.field.clone(),
            level: self.level,
            terms: self
                .terms
                .iter()
                .map(|&(k, c)| (k, self.field.neg_code(c)))
                .collect(),
            prec: self.prec,
        }
    }

    /// `c·self` for `c ∈ k`.
    pub fn scale(&self, c: &FFElem) -> Self {
        if c.is_zero() {
            // 0·O(π^n) is exactly zero: the unknown part is multiplied by 0 too.
            return Self::zero(&self.field);
        }
        Self {
            field: self.field.clone(),
            level: self.level,
            terms: self
                .terms
                .iter()
                .map(|&(k, x)| (k, self.field.mul_code(x, c.code())))
                .collect(),
            prec: self.prec,
        }
    }

    /// `π^{s}·self` for an exponent `s` with `p`-power denominator.
    pub fn shift(&self, s: Q) -> Result<Self> {
        let es = denominator_level(&s, self.field.characteristic())?;
        let e = self.level.max(es);
        let (terms, prec) = self.keys_at(e);
        let sk = (s * ppow(self.field.characteristic(), e)).to_integer();
        Ok(Self::from_codes(
            &self.field,
            e,
            terms.into_iter().map(|(k, c)| (k + sk, c)).collect(),
            prec.map(|n| n + sk),
        ))
    }

    /// Lowers the precision to at most `bound`.
    pub fn truncate(&self, bound: Q) -> Result<Self> {
        let eb = denominator_level(&bound, self.field.characteristic())?;
        let e = self.level.max(eb);
        let (terms, prec) = self.keys_at(e);
        let bk = (bound * ppow(self.field.characteristic(), e)).to_integer();
        Ok(Self::from_codes(&self.field, e, terms, min_opt(prec, Some(bk))))
    }

    /// `self^{p^n}`; negative `n` takes `p^{|n|}`-th roots in `K^perf`.
    pub fn p_power(&self, n: i64) -> Self {
        let f = &self.field;
        let map = |c: u32| f.frob_code(c, n);
        if n >= 0 {
            let n = n as u32;
            if self.level >= n {
                Self::from_codes(
                    f,
                    self.level - n,
                    self.terms.iter().map(|&(k, c)| (k, map(c))).collect(),
                    self.prec,
                )
            } else {
                let m = ppow(f.characteristic(), n - self.level);
                Self::from_codes(
                    f,
                    0,
                    self.terms.iter().map(|&(k, c)| (k * m, map(c))).collect(),
                    self.prec.map(|x| x * m),
                )
            }
        } else {
            Self::from_codes(
                f,
                self.level + n.unsigned_abs() as u32,
                self.terms.iter().map(|&(k, c)| (k, map(c))).collect(),
                self.prec,
            )
        }
    }

    /// Apply the `k`-automorphism `c ↦ c^{p^n}` to the coefficients only.
    pub fn frobenius_coeffs(&self, n: i64) -> Self {
        Self {
            field: self.field.clone(),
            level: self.level,
            terms: self
                .terms
                .iter()
                .map(|&(k, c)| (k, self.field.frob_code(c, n)))
                .collect(),
            prec: self.prec,
        }
    }

    /// Terms with negative exponent, as an exact element.
    pub fn principal_part(&self) -> Result<Self> {
        if self.prec.is_some_and(|n| n < 0) {
            return Err(Error::PrecisionExhausted(format!(
                "class modulo O is undetermined at precision {}",
                self.precision().unwrap()
            )));
        }
        Ok(Self::from_codes(
            &self.field,
            self.level,
            self.terms.iter().copied().filter(|t| t.0 < 0).collect(),
            None,
        ))
    }

    /// Multiplicative inverse. Exact non-monomial inputs have no finite
    /// representation of their inverse; use [`Self::inverse_capped`].
    pub fn inverse(&self) -> Result<Self> {
        if self.prec.is_none() && self.terms.len() > 1 {
            return Err(Error::PrecisionExhausted(
                "inverse of an exact non-monomial series needs a precision cap".into(),
            ));
        }
        self.inverse_impl()
    }

    /// Inverse of `self` after truncating it to relative precision `rel`
    /// (exponent units) when it is exact.
    pub fn inverse_capped(&self, rel: Q) -> Result<Self> {
        if self.prec.is_none() && self.terms.len() > 1 {
            let v = self.valuation()?;
            return self.truncate(v + rel)?.inverse_impl();
        }
        self.inverse_impl()
    }

    fn inverse_impl(&self) -> Result<Self> {
        let f = &self.field;
        let (v, c0) = match self.terms.first() {
            Some(&t) => t,
            None if self.prec.is_none() => return Err(Error::DivisionByZero),
            None => {
                return Err(Error::PrecisionExhausted(
                    "cannot invert an element with no known terms".into(),
                ))
            }
        };
        let c0inv = f.inv_code(c0).unwrap();
        let Some(prec) = self.prec else {
            return Ok(Self::from_codes(f, self.level, vec![(-v, c0inv)], None));
        };
        // self = c0 π^v (1 + u); invert the unit 1 + u through relative key R.
        let r = (prec - v) as usize;
        let unit: Vec<(usize, u32)> = self
            .terms
            .iter()
            .skip(1)
            .map(|&(k, c)| ((k - v) as usize, f.mul_code(c, c0inv)))
            .collect();
        let mut y = vec![0u32; r];
        if r > 0 {
            y[0] = 1;
        }
        for n in 1..r {
            let mut acc = 0u32;
            for &(k, b) in &unit {
                if k > n {
                    break;
                }
                acc = f.add_code(acc, f.mul_code(b, y[n - k]));
            }
            y[n] = f.neg_code(acc);
        }
        let raw = y
            .into_iter()
            .enumerate()
            .filter(|t| t.1 != 0)
            .map(|(i, c)| (i as i64 - v, f.mul_code(c, c0inv)))
            .collect();
        Ok(Self::from_codes(f, self.level, raw, Some(prec - 2 * v)))
    }

    /// Whether `self` and `other` agree at every exponent below `bound`
    /// that both of them know.
    pub fn agrees_below(&self, other: &Self, bound: Q) -> Result<bool> {
        let d = self.checked_sub(other)?.truncate(bound)?;
        Ok(d.is_zero())
    }

    /// Known at least up to `bound`.
    pub fn known_to(&self, bound: Q) -> bool {
        self.precision().is_none_or(|n| n >= bound)
    }

    pub fn pow(&self, e: u64) -> Result<Self> {
        let mut acc = Self::one(&self.field);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            base = base.checked_mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Orders optional precisions with `None` (exact) as +∞.
pub fn cmp_prec(a: Option<Q>, b: Option<Q>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

impl fmt::Display for LaurentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (e, c) in self.terms() {
            let cs = c.to_string();
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            let mono = if e.is_zero() {
                String::new()
            } else if e.is_one() {
                "π".to_string()
            } else if e.is_integer() {
                format!("π^{e}")
            } else {
                format!("π^({e})")
            };
            parts.push(match (cs.as_str(), mono.is_empty()) {
                (_, true) => cs,
                ("1", false) => mono,
                _ => format!("{cs}*{mono}"),
            });
        }
        if let Some(n) = self.precision() {
            parts.push(if n.is_integer() { format!("O(π^{n})") } else { format!("O(π^({n}))") });
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for LaurentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &LaurentElement {
    type Output = LaurentElement;
    fn add(self, rhs: &LaurentElement) -> LaurentElement {
        self.checked_add(rhs).expect("field mismatch")
    }
}

impl Sub for &LaurentElement {
    type Output = LaurentElement;
    fn sub(self, rhs: &LaurentElement) -> LaurentElement {
        self.checked_sub(rhs).expect("field mismatch")
    }
}

impl Mul for &LaurentElement {
    type Output = LaurentElement;
    fn mul(self, rhs: &LaurentElement) -> LaurentElement {
        self.checked_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &LaurentElement {
    type Output = LaurentElement;
    fn neg(self) -> LaurentElement {
        LaurentElement::neg(self)
    }
}

/// Arithmetic operations accepted by [`l_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

pub fn l_arith(a: &LaurentElement, b: &LaurentElement, op: SeriesOp) -> Result<LaurentElement> {
    match op {
        SeriesOp::Add => a.checked_add(b),
        SeriesOp::Sub => a.checked_sub(b),
        SeriesOp::Mul => a.checked_mul(b),
    }
}

pub fn l_inv(a: &LaurentElement) -> Result<LaurentElement> {
    a.inverse()
}

pub fn p_power(a: &LaurentElement, n: i64) -> LaurentElement {
    a.p_power(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FieldSpec;

    fn f2() -> Arc<FiniteField> {
        FiniteField::new(FieldSpec::prime(2)).unwrap()
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn pi_times_inverse() {
        let k = f2();
        let a = LaurentElement::pi_pow(&k, 1);
        let b = LaurentElement::pi_pow(&k, -1);
        assert_eq!(&a * &b, LaurentElement::one(&k));
        assert_eq!(l_inv(&a).unwrap(), b);
    }

    #[test]
    fn char_two_cancellation() {
        let k = f2();
        let a = &LaurentElement::pi_pow(&k, -1) + &LaurentElement::one(&k);
        let b = LaurentElement::pi_pow(&k, -1);
        assert_eq!(l_arith(&a, &b, SeriesOp::Add).unwrap(), LaurentElement::one(&k));
    }

    #[test]
    fn half_powers_renormalize() {
        let k = f2();
        let h = LaurentElement::monomial(&FFElem::one(&k), q(1, 2)).unwrap();
        assert_eq!(h.level(), 1);
        let s = &h * &h;
        assert_eq!(s.level(), 0);
        assert_eq!(s, LaurentElement::pi_pow(&k, 1));
    }

    #[test]
    fn geometric_series() {
        let k = f2();
        let a = (&LaurentElement::one(&k) + &LaurentElement::pi_pow(&k, 1))
            .truncate(q(4, 1))
            .unwrap();
        let inv = l_inv(&a).unwrap();
        let expected = [0, 1, 2, 3]
            .iter()
            .fold(LaurentElement::big_o(&k, q(4, 1)).unwrap(), |acc, &n| {
                &acc + &LaurentElement::pi_pow(&k, n)
            });
        assert_eq!(inv, expected);
        assert_eq!(&a * &inv, LaurentElement::one(&k).truncate(q(4, 1)).unwrap());
    }

    #[test]
    fn inverse_of_constant_and_errors() {
        let k = FiniteField::new(FieldSpec::new(3, vec![1, 0, 1])).unwrap();
        let z = FFElem::generator(&k);
        let c = LaurentElement::constant(&z);
        assert_eq!(l_inv(&c).unwrap(), LaurentElement::constant(&z.inverse().unwrap()));
        assert_eq!(l_inv(&LaurentElement::zero(&k)), Err(Error::DivisionByZero));
        let two_terms = &c + &LaurentElement::pi_pow(&k, 1);
        assert!(matches!(l_inv(&two_terms), Err(Error::PrecisionExhausted(_))));
        let capped = two_terms.inverse_capped(q(5, 1)).unwrap();
        assert_eq!(capped.precision(), Some(q(5, 1)));
    }

    #[test]
    fn p_power_examples() {
        let k3 = FiniteField::new(FieldSpec::prime(3)).unwrap();
        assert_eq!(
            p_power(&LaurentElement::pi_pow(&k3, -1), 1),
            LaurentElement::pi_pow(&k3, -3)
        );
        let k = f2();
        let r = p_power(&LaurentElement::pi_pow(&k, 1), -1);
        assert_eq!(r.level(), 1);
        assert_eq!(r.valuation().unwrap(), q(1, 2));
        assert_eq!(
            p_power(&LaurentElement::pi_pow(&k, -1), -1).valuation().unwrap(),
            q(-1, 2)
        );
    }

    #[test]
    fn valuation_and_principal_part() {
        let k = f2();
        let a = &LaurentElement::pi_pow(&k, -2) + &LaurentElement::pi_pow(&k, 3);
        assert_eq!(a.valuation().unwrap(), q(-2, 1));
        let b = &(&LaurentElement::pi_pow(&k, -1) + &LaurentElement::one(&k))
            + &LaurentElement::pi_pow(&k, 1);
        assert_eq!(b.principal_part().unwrap(), LaurentElement::pi_pow(&k, -1));
        assert_eq!(LaurentElement::zero(&k).valuation(), Err(Error::ZeroValuation));
        let low = LaurentElement::big_o(&k, q(-1, 1)).unwrap();
        assert!(matches!(low.principal_part(), Err(Error::PrecisionExhausted(_))));
        assert!(matches!(low.valuation(), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn multiplication_precision_rule() {
        let k = f2();
        // (π^{-1} + O(π^2)) · (π^3 + O(π^5)) = π^2 + O(π^4)
        let a = LaurentElement::pi_pow(&k, -1).truncate(q(2, 1)).unwrap();
        let b = LaurentElement::pi_pow(&k, 3).truncate(q(5, 1)).unwrap();
        let c = &a * &b;
        assert_eq!(c.precision(), Some(q(4, 1)));
        assert_eq!(c.valuation().unwrap(), q(2, 1));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn field(fi: usize) -> Arc<FiniteField> {
            match fi {
                0 => FiniteField::new(FieldSpec::new(2, vec![1, 1, 1])).unwrap(),
                1 => FiniteField::new(FieldSpec::new(3, vec![1, 0, 1])).unwrap(),
                _ => FiniteField::new(FieldSpec::prime(5)).unwrap(),
            }
        }

        fn element(k: &Arc<FiniteField>, level: u32, raw: &[(i64, u32)], prec: Option<i64>) -> LaurentElement {
            let raw = raw.iter().map(|&(e, c)| (e, c % k.order())).collect();
            LaurentElement::from_codes(k, level, raw, prec)
        }

        fn arb_raw() -> impl Strategy<Value = Vec<(i64, u32)>> {
            prop::collection::vec((-12i64..12, 1u32..100), 1..6)
        }

        proptest! {
            #[test]
            fn valuation_laws(fi in 0usize..3, la in 0u32..3, lb in 0u32..3, ra in arb_raw(), rb in arb_raw()) {
                let k = field(fi);
                let a = element(&k, la, &ra, None);
                let b = element(&k, lb, &rb, None);
                prop_assume!(!a.is_zero() && !b.is_zero());
                let va = a.valuation().unwrap();
                let vb = b.valuation().unwrap();
                prop_assert_eq!((&a * &b).valuation().unwrap(), va + vb);
                let s = &a + &b;
                if !s.is_zero() {
                    let vs = s.valuation().unwrap();
                    prop_assert!(vs >= va.min(vb));
                    if va != vb {
                        prop_assert_eq!(vs, va.min(vb));
                    }
                }
            }

            #[test]
            fn p_power_is_a_homomorphism(fi in 0usize..3, la in 0u32..3, lb in 0u32..3, ra in arb_raw(), rb in arb_raw(), n in -3i64..3) {
                let k = field(fi);
                let a = element(&k, la, &ra, None);
                let b = element(&k, lb, &rb, None);
                prop_assert_eq!((&a * &b).p_power(n), &a.p_power(n) * &b.p_power(n));
                prop_assert_eq!((&a + &b).p_power(n), &a.p_power(n) + &b.p_power(n));
                prop_assert_eq!(a.p_power(-2).p_power(2), a.clone());
                if !a.is_zero() {
                    let scale = Q::from_integer(k.characteristic() as i64).pow(n as i32);
                    prop_assert_eq!(a.p_power(n).valuation().unwrap(), a.valuation().unwrap() * scale);
                }
            }

            #[test]
            fn principal_part_ignores_integral_noise(fi in 0usize..3, la in 0u32..3, ra in arb_raw(), ru in prop::collection::vec((0i64..12, 1u32..100), 0..5), lu in 0u32..3) {
                let k = field(fi);
                let a = element(&k, la, &ra, None);
                let u = element(&k, lu, &ru, Some(40));
                prop_assert_eq!((&a + &u).principal_part().unwrap(), a.principal_part().unwrap());
            }

            #[test]
            fn inverse_round_trip(fi in 0usize..3, la in 0u32..3, ra in arb_raw(), rel in 1i64..20) {
                let k = field(fi);
                let a = element(&k, la, &ra, None);
                prop_assume!(!a.is_zero());
                let inv = a.inverse_capped(Q::from_integer(rel)).unwrap();
                let prod = &a * &inv;
                let one = LaurentElement::one(&k);
                prop_assert!(prod.agrees_below(&one, Q::from_integer(rel)).unwrap());
                prop_assert!(prod.known_to(Q::from_integer(rel)));
            }
        }
    }
}
