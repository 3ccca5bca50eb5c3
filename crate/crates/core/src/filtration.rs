//! Classes in `K^perf / O_{K^perf}` written over the basis `[π^{-j}]`, `p ∤ j`.
//!
//! A class is a finitely supported vector `j ↦ f_j ∈ k[τ^{±1}]` with
//! `[ξ] = Σ_j f_j([π^{-j}])`. The filtration step `W_i` consists of the
//! classes supported on `j < i`; membership is read off the support, not the
//! valuation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::{FFElem, FiniteField};
use crate::laurent::{LaurentElement, Q};
use crate::ore::{SkewLaurentPoly, TwistAction};

#[derive(Clone, PartialEq, Eq)]
pub struct PrincipalClass {
    field: Arc<FiniteField>,
    // Keys prime to p; values nonzero.
    decomp: BTreeMap<u64, SkewLaurentPoly>,
}

impl fmt::Debug for PrincipalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.decomp.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .decomp
            .iter()
            .rev()
            .map(|(j, fj)| format!("{j}: {fj:?}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Splits `m > 0` as `j·p^a` with `p ∤ j`.
pub fn split_p_part(mut m: u64, p: u64) -> (u64, u32) {
    let mut a = 0;
    while m.is_multiple_of(p) {
        m /= p;
        a += 1;
    }
    (m, a)
}

impl PrincipalClass {
    pub fn zero(field: &Arc<FiniteField>) -> Self {
        Self {
            field: field.clone(),
            decomp: BTreeMap::new(),
        }
    }

    /// Builds from explicit components; zero components are dropped.
    pub fn from_components(
        field: &Arc<FiniteField>,
        comps: impl IntoIterator<Item = (u64, SkewLaurentPoly)>,
    ) -> Result<Self> {
        let p = field.characteristic();
        let mut out = Self::zero(field);
        for (j, f) in comps {
            if j == 0 || j % p == 0 {
                return Err(Error::InvalidInput(format!(
                    "basis index {j} must be positive and prime to {p}"
                )));
            }
            out.add_component(j, &f);
        }
        Ok(out)
    }

    fn add_component(&mut self, j: u64, f: &SkewLaurentPoly) {
        let sum = match self.decomp.get(&j) {
            Some(g) => g.add(f),
            None => f.clone(),
        };
        if sum.is_zero() {
            self.decomp.remove(&j);
        } else {
            self.decomp.insert(j, sum);
        }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.decomp.is_empty()
    }

    pub fn components(&self) -> &BTreeMap<u64, SkewLaurentPoly> {
        &self.decomp
    }

    pub fn component(&self, j: u64) -> SkewLaurentPoly {
        self.decomp
            .get(&j)
            .cloned()
            .unwrap_or_else(|| SkewLaurentPoly::zero(&self.field))
    }

    pub fn top_index(&self) -> Option<u64> {
        self.decomp.keys().next_back().copied()
    }

    /// Least `i` with the class in `W_i`.
    pub fn w_level(&self) -> u64 {
        self.top_index().map_or(0, |j| j + 1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (j, f) in &other.decomp {
            out.add_component(*j, f);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            field: self.field.clone(),
            decomp: self.decomp.iter().map(|(j, f)| (*j, f.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// `g·self` for `g ∈ k[τ^{±1}]`.
    pub fn left_mul(&self, g: &SkewLaurentPoly) -> Self {
        let mut out = Self::zero(&self.field);
        for (j, f) in &self.decomp {
            out.add_component(*j, &g.mul(f));
        }
        out
    }

    /// The exact representative `Σ_j f_j(π^{-j})`.
    pub fn reconstruct(&self) -> Result<LaurentElement> {
        let mut acc = LaurentElement::zero(&self.field);
        for (j, f) in &self.decomp {
            acc = acc.checked_add(&f.apply(&LaurentElement::pi_pow(&self.field, -(*j as i64)))?)?;
        }
        Ok(acc)
    }

    /// Valuation of the class: the least value `-j·p^{deg f_j}`.
    pub fn valuation(&self) -> Result<Q> {
        let p = self.field.characteristic() as i64;
        self.decomp
            .iter()
            .map(|(j, f)| {
                let nu = f.max_exponent().unwrap();
                -Q::from_integer(*j as i64) * Q::from_integer(p).pow(nu as i32)
            })
            .min()
            .ok_or(Error::ZeroClass)
    }

    /// Prime-to-`p` part of `-v`.
    pub fn j_invariant(&self) -> Result<u64> {
        let v = self.valuation()?;
        let p = self.field.characteristic() as i64;
        // -v = j p^ν with ν possibly negative.
        let mut num = -*v.numer();
        while num % p == 0 {
            num /= p;
        }
        Ok(num as u64)
    }

    /// Membership in `W_i`: every basis index is below `i`.
    pub fn in_w(&self, i: u64) -> bool {
        self.decomp.keys().all(|&j| j < i)
    }

    /// Nonzero `(j, ν, c)` triples, ordered by `j` then `ν`.
    pub fn triples(&self) -> Vec<(u64, i64, FFElem)> {
        self.decomp
            .iter()
            .flat_map(|(j, f)| f.terms().into_iter().map(move |(n, c)| (*j, n, c)))
            .collect()
    }
}

/// Decomposes the class of `ξ` over the basis `[π^{-j}]`.
pub fn decompose(xi: &LaurentElement) -> Result<PrincipalClass> {
    let field = xi.field();
    let p = field.characteristic();
    let pp = xi.principal_part()?;
    let e = pp.level() as i64;
    let mut comps: BTreeMap<u64, Vec<(i64, u32)>> = BTreeMap::new();
    for (key, c) in pp.keys() {
        // c π^{-m/p^e}, m = j p^a  →  c τ^{a-e} on [π^{-j}]
        let (j, a) = split_p_part((-key) as u64, p);
        comps.entry(j).or_default().push((a as i64 - e, c));
    }
    let mut out = PrincipalClass::zero(field);
    for (j, terms) in comps {
        out.add_component(j, &SkewLaurentPoly::from_terms(field, terms));
    }
    Ok(out)
}

pub fn j_invariant(c: &PrincipalClass) -> Result<u64> {
    c.j_invariant()
}

pub fn w_membership(c: &PrincipalClass, i: u64) -> bool {
    c.in_w(i)
}
