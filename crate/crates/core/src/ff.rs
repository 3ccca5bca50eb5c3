//! Finite fields `k = F_p[z]/(g(z))` with the full Frobenius group action.
//!
//! Elements are stored as integer codes `c_0 + c_1 p + ... + c_{d-1} p^{d-1}`
//! of their coordinate vectors in the basis `1, z, ..., z^{d-1}`. Products,
//! inverses and Frobenius powers go through discrete log tables built once per
//! field, so every operation on a code is a table lookup.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// Below this order addition also uses a full table.
const ADD_TABLE_LIMIT: u32 = 1024;

/// Prime `p` and monic modulus `g`, coefficient list from degree 0 upward.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub g: Vec<u64>,
}

impl FieldSpec {
    pub fn new(p: u64, g: Vec<u64>) -> Self {
        Self { p, g }
    }

    /// The prime field, presented as `F_p[z]/(z)`.
    pub fn prime(p: u64) -> Self {
        Self { p, g: vec![0, 1] }
    }

    pub fn degree(&self) -> usize {
        self.g.len().saturating_sub(1)
    }
}

/// A finite field together with its arithmetic tables.
pub struct FiniteField {
    spec: FieldSpec,
    p: u32,
    d: u32,
    q: u32,
    /// `exp[i] = gen^i` for `0 <= i < q - 1`.
    exp: Vec<u32>,
    /// `log[c]` for `c != 0`; `log[0]` is unused.
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.d, self.spec.g)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for FiniteField {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= n {
        if n.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

// Dense polynomials over F_p, lowest degree first, used only while building tables.
fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = poly_trim(a.to_vec());
    let m = poly_trim(m.to_vec());
    let dm = m.len() - 1;
    let inv_lead = mod_pow(m[dm], p - 2, p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = r[top] * inv_lead % p;
        let shift = top - dm;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_rem(&out, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = poly_trim(a.to_vec());
    let mut b = poly_trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Irreducibility via `gcd(z^{p^i} - z, g) = 1` for `1 <= i <= deg g / 2`.
fn is_irreducible(g: &[u64], p: u64) -> bool {
    let d = g.len() - 1;
    if d == 1 {
        return true;
    }
    let z = vec![0, 1];
    let mut zp = z.clone();
    for _ in 1..=d / 2 {
        // zp <- zp^p mod g
        let mut acc = vec![1u64];
        let mut base = zp.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, g, p);
            }
            base = poly_mulmod(&base, &base, g, p);
            e >>= 1;
        }
        zp = acc;
        let mut diff = zp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let h = poly_gcd(g, &diff, p);
        if h.len() != 1 {
            return false;
        }
    }
    true
}

impl FiniteField {
    /// Validates `spec` and builds the arithmetic tables.
    pub fn new(spec: FieldSpec) -> Result<Arc<Self>> {
        let p = spec.p;
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if spec.g.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree >= 1".into()));
        }
        if spec.g.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField(format!(
                "modulus coefficients must lie in [0, {p})"
            )));
        }
        if *spec.g.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        let d = spec.degree() as u32;
        let q = (p as u128).checked_pow(d).unwrap_or(u128::MAX);
        if q > MAX_FIELD_ORDER as u128 {
            return Err(Error::InvalidField(format!(
                "field order {p}^{d} exceeds the supported maximum {MAX_FIELD_ORDER}"
            )));
        }
        if !is_irreducible(&spec.g, p) {
            return Err(Error::InvalidField(format!(
                "modulus {:?} is reducible over F_{p}",
                spec.g
            )));
        }
        let q = q as u32;
        let p32 = p as u32;
        let to_digits = |c: u32| -> Vec<u64> {
            let mut v = Vec::with_capacity(d as usize);
            let mut c = c;
            for _ in 0..d {
                v.push((c % p32) as u64);
                c /= p32;
            }
            v
        };
        let from_digits = |v: &[u64]| -> u32 {
            v.iter().rev().fold(0u32, |acc, &x| acc * p32 + x as u32)
        };

        // Search for a generator of the multiplicative group.
        let mut exp = Vec::new();
        let mut log = vec![0u32; q as usize];
        if q == 2 {
            exp.push(1);
        } else {
            'search: for cand in 2..q {
                let base = poly_trim(to_digits(cand));
                exp.clear();
                let mut cur = vec![1u64];
                for _ in 0..q - 1 {
                    let mut digits = cur.clone();
                    digits.resize(d as usize, 0);
                    let code = from_digits(&digits);
                    if code == 1 && !exp.is_empty() {
                        continue 'search;
                    }
                    exp.push(code);
                    cur = poly_mulmod(&cur, &base, &spec.g, p);
                }
                break;
            }
        }
        for (i, &c) in exp.iter().enumerate() {
            log[c as usize] = i as u32;
        }

        let neg: Vec<u32> = (0..q)
            .map(|c| {
                let v: Vec<u64> = to_digits(c).iter().map(|&x| (p - x) % p).collect();
                from_digits(&v)
            })
            .collect();

        let mut field = FiniteField {
            spec,
            p: p32,
            d,
            q,
            exp,
            log,
            neg,
            add: None,
        };
        if q <= ADD_TABLE_LIMIT && p32 != 2 {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.add_digits(a, b);
                }
            }
            field.add = Some(table);
        }
        Ok(Arc::new(field))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    /// Degree `d` of `k` over `F_p`.
    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.d {
            let s = (a % self.p + b % self.p) % self.p;
            out += s * place;
            place *= self.p;
            a /= self.p;
            b /= self.p;
        }
        out
    }

    #[inline]
    pub fn add_code(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        match &self.add {
            Some(t) => t[(a * self.q + b) as usize],
            None => self.add_digits(a, b),
        }
    }

    #[inline]
    pub fn neg_code(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub_code(&self, a: u32, b: u32) -> u32 {
        self.add_code(a, self.neg_code(b))
    }

    #[inline]
    pub fn mul_code(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        let s = self.log[a as usize] + self.log[b as usize];
        self.exp[(if s >= n { s - n } else { s }) as usize]
    }

    #[inline]
    pub fn inv_code(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.q - 1;
        let l = self.log[a as usize];
        Some(self.exp[((n - l) % n) as usize])
    }

    /// `a^{p^n}` for any signed `n`.
    #[inline]
    pub fn frob_code(&self, a: u32, n: i64) -> u32 {
        if a == 0 || self.d == 1 {
            return a;
        }
        let n = n.rem_euclid(self.d as i64) as u32;
        if n == 0 {
            return a;
        }
        let m = (self.q - 1) as u64;
        let pn = (self.p as u64).pow(n) % m;
        let l = self.log[a as usize] as u64;
        self.exp[(l * pn % m) as usize]
    }

    pub fn pow_code(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let m = (self.q - 1) as u64;
        let l = self.log[a as usize] as u64;
        self.exp[((l * (e % m)) % m) as usize]
    }

    /// Code of the element `n mod p` of the prime field.
    pub fn prime_code(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn digits(&self, mut c: u32) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.d as usize);
        for _ in 0..self.d {
            v.push((c % self.p) as u64);
            c /= self.p;
        }
        v
    }

    /// Code from a coordinate vector; shorter vectors are zero padded and
    /// entries are reduced mod `p`.
    pub fn code_from_digits(&self, digits: &[i64]) -> Result<u32> {
        if digits.len() > self.d as usize {
            return Err(Error::InvalidInput(format!(
                "element has {} coordinates but the field has degree {}",
                digits.len(),
                self.d
            )));
        }
        Ok(digits
            .iter()
            .rev()
            .fold(0u32, |acc, &x| acc * self.p + x.rem_euclid(self.p as i64) as u32))
    }

    pub fn format_code(&self, c: u32) -> String {
        if c == 0 {
            return "0".into();
        }
        let digits = self.digits(c);
        let mut parts = Vec::new();
        for (i, &x) in digits.iter().enumerate().rev() {
            if x == 0 {
                continue;
            }
            let part = match (i, x) {
                (0, _) => format!("{x}"),
                (1, 1) => "z".to_string(),
                (1, _) => format!("{x}*z"),
                (_, 1) => format!("z^{i}"),
                _ => format!("{x}*z^{i}"),
            };
            parts.push(part);
        }
        parts.join("+")
    }

    fn is_prime_subfield_code(&self, c: u32) -> bool {
        c < self.p
    }

    /// Orbit of `c` under Frobenius, starting at `c`.
    pub fn frobenius_orbit(&self, c: u32) -> Vec<u32> {
        let mut orbit = vec![c];
        let mut cur = self.frob_code(c, 1);
        while cur != c {
            orbit.push(cur);
            cur = self.frob_code(cur, 1);
        }
        orbit
    }

    /// Minimal polynomial over `F_p` of the element with code `c`,
    /// coefficients from degree 0 upward.
    pub fn minimal_polynomial(&self, c: u32) -> Vec<u64> {
        // prod over the orbit of (t - c_i), computed with coefficients in k.
        let mut poly: Vec<u32> = vec![1];
        for root in self.frobenius_orbit(c) {
            let nr = self.neg_code(root);
            let mut next = vec![0u32; poly.len() + 1];
            for (i, &a) in poly.iter().enumerate() {
                next[i + 1] = self.add_code(next[i + 1], a);
                next[i] = self.add_code(next[i], self.mul_code(a, nr));
            }
            poly = next;
        }
        debug_assert!(poly.iter().all(|&a| self.is_prime_subfield_code(a)));
        poly.into_iter().map(|a| a as u64).collect()
    }
}

/// An element of `k`.
#[derive(Clone)]
pub struct FFElem {
    field: Arc<FiniteField>,
    code: u32,
}

impl fmt::Debug for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format_code(self.code))
    }
}

impl fmt::Display for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field.format_code(self.code))
    }
}

impl PartialEq for FFElem {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
            && (Arc::ptr_eq(&self.field, &other.field) || self.field == other.field)
    }
}

impl Eq for FFElem {}

/// The four field operations accepted by [`ff_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FFElem {
    pub fn from_code(field: &Arc<FiniteField>, code: u32) -> Self {
        debug_assert!(code < field.q);
        Self {
            field: field.clone(),
            code,
        }
    }

    pub fn zero(field: &Arc<FiniteField>) -> Self {
        Self::from_code(field, 0)
    }

    pub fn one(field: &Arc<FiniteField>) -> Self {
        Self::from_code(field, 1)
    }

    /// The class of `z` (for `d = 1` this is the root of `g`).
    pub fn generator(field: &Arc<FiniteField>) -> Self {
        if field.d == 1 {
            let root = (field.p as u64 - field.spec.g[0]) % field.p as u64;
            return Self::from_code(field, root as u32);
        }
        Self::from_code(field, field.p)
    }

    pub fn from_int(field: &Arc<FiniteField>, n: i64) -> Self {
        Self::from_code(field, field.prime_code(n))
    }

    pub fn from_coeffs(field: &Arc<FiniteField>, coeffs: &[i64]) -> Result<Self> {
        Ok(Self::from_code(field, field.code_from_digits(coeffs)?))
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    /// Coordinates in the basis `1, z, ..., z^{d-1}`; always `d` entries.
    pub fn coeffs(&self) -> Vec<u64> {
        self.field.digits(self.code)
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    pub fn is_one(&self) -> bool {
        self.code == 1
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_code(&self.field, self.field.add_code(self.code, other.code)))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_code(&self.field, self.field.sub_code(self.code, other.code)))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_code(&self.field, self.field.mul_code(self.code, other.code)))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let inv = self.field.inv_code(other.code).ok_or(Error::DivisionByZero)?;
        Ok(Self::from_code(&self.field, self.field.mul_code(self.code, inv)))
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self.field.inv_code(self.code).ok_or(Error::DivisionByZero)?;
        Ok(Self::from_code(&self.field, inv))
    }

    pub fn pow(&self, e: u64) -> Self {
        Self::from_code(&self.field, self.field.pow_code(self.code, e))
    }

    /// `self^{p^n}`; negative `n` applies the inverse Frobenius.
    pub fn frobenius_pow(&self, n: i64) -> Self {
        Self::from_code(&self.field, self.field.frob_code(self.code, n))
    }
}

/// Binary field operation with error reporting.
pub fn ff_arith(a: &FFElem, b: &FFElem, op: FieldOp) -> Result<FFElem> {
    match op {
        FieldOp::Add => a.checked_add(b),
        FieldOp::Sub => a.checked_sub(b),
        FieldOp::Mul => a.checked_mul(b),
        FieldOp::Div => a.checked_div(b),
    }
}

pub fn frobenius_pow(a: &FFElem, n: i64) -> FFElem {
    a.frobenius_pow(n)
}

// Operator forms panic on a field mismatch, which is a programming error.
impl Add for &FFElem {
    type Output = FFElem;
    fn add(self, rhs: &FFElem) -> FFElem {
        self.checked_add(rhs).expect("field mismatch")
    }
}

impl Sub for &FFElem {
    type Output = FFElem;
    fn sub(self, rhs: &FFElem) -> FFElem {
        self.checked_sub(rhs).expect("field mismatch")
    }
}

impl Mul for &FFElem {
    type Output = FFElem;
    fn mul(self, rhs: &FFElem) -> FFElem {
        self.checked_mul(rhs).expect("field mismatch")
    }
}

impl Neg for &FFElem {
    type Output = FFElem;
    fn neg(self) -> FFElem {
        FFElem::from_code(&self.field, self.field.neg_code(self.code))
    }
}
