//! Drinfeld `F_p[t]`-modules over `K = k((π))` with good reduction.
//!
//! A module is determined by `ψ_t ∈ O_K[τ]`. Validation derives the rank,
//! the reduction `φ̄_t`, the characteristic prime `p̄res`, the height and the
//! deviation `w = v(ψ_t − φ̄_t)`.
//!
//! Reducing `w` to the single generator `t`: if `v(ψ_a − φ̄_a) ≥ w` and
//! `v(ψ_b − φ̄_b) ≥ w` then `ψ_{ab} − φ̄_{ab} = (ψ_a − φ̄_a)ψ_b + φ̄_a(ψ_b − φ̄_b)`
//! has valuation `≥ w` as all coefficients are integral, and sums are clear.
//! So the infimum over all of `F_p[t]` is attained at `t`.

use std::sync::Arc;

use log::{debug, trace};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{FFElem, FiniteField};
use crate::laurent::{LaurentElement, Q};
use crate::ore::{poly_times_series, series_times_poly, KPoly, OrePoly, TauSeries, TwistAction};

/// `ψ_t` together with its derived invariants.
#[derive(Debug, Clone)]
pub struct DrinfeldModuleSpec {
    field: Arc<FiniteField>,
    psi_t: OrePoly<LaurentElement>,
    r: usize,
    phibar_t: KPoly,
    // `None` when ψ = φ̄.
    w: Option<Q>,
    pres: Vec<u64>,
    h: u32,
}

/// Residue of an integral element.
pub fn residue(a: &LaurentElement) -> Result<FFElem> {
    if let Some(v) = a.valuation_lower_bound() {
        if v < Q::from_integer(0) {
            return Err(Error::NonIntegral(format!("{a}")));
        }
    }
    if !a.known_to(Q::from_integer(1)) {
        return Err(Error::PrecisionExhausted(format!(
            "residue of {a} is not determined"
        )));
    }
    a.coeff(Q::from_integer(0))
}

/// Evaluates `Σ a_i X^i` at a twisted polynomial `X`, with `a_i ∈ F_p`.
pub fn eval_at<S: crate::ore::TwistScalar>(a: &[u64], x: &OrePoly<S>) -> Result<OrePoly<S>> {
    let field = x.field().clone();
    let mut acc = OrePoly::<S>::zero(&field);
    for &ai in a.iter().rev() {
        acc = acc.mul(x)?;
        if ai % field.characteristic() != 0 {
            let c = lift_scalar::<S>(&FFElem::from_int(&field, ai as i64));
            acc = acc.add(&OrePoly::monomial(c, 0))?;
        }
    }
    Ok(acc)
}

fn lift_scalar<S: crate::ore::TwistScalar>(c: &FFElem) -> S {
    // Repeated addition of one realizes any element of the prime field.
    let field = c.field();
    let mut acc = S::zero_in(field);
    for _ in 0..c.code() {
        acc = acc.add(&S::one_in(field)).expect("same field");
    }
    acc
}

/// Validates `ψ_t` and computes the derived invariants.
pub fn validate(field: &Arc<FiniteField>, psi_t: OrePoly<LaurentElement>) -> Result<DrinfeldModuleSpec> {
    let r = match psi_t.degree() {
        None | Some(0) => {
            return Err(Error::NotADrinfeldModule(
                "ψ_t must have positive τ-degree".into(),
            ))
        }
        Some(r) => r,
    };
    let mut bar = Vec::with_capacity(r + 1);
    for (i, c) in psi_t.coeffs().iter().enumerate() {
        if c.level() != 0 {
            return Err(Error::InvalidInput(format!(
                "coefficient of τ^{i} must lie in K, found fractional exponents"
            )));
        }
        bar.push(residue(c).map_err(|e| match e {
            Error::NonIntegral(m) => Error::NonIntegral(format!("coefficient of τ^{i}: {m}")),
            other => other,
        })?);
    }
    let lead = psi_t.leading().unwrap();
    if !lead.known_to(Q::from_integer(1)) {
        return Err(Error::PrecisionExhausted(
            "leading coefficient of ψ_t is not known modulo π".into(),
        ));
    }
    if bar[r].is_zero() {
        return Err(Error::BadReduction);
    }
    let phibar_t = KPoly::new(field, bar);

    let mut w: Option<Q> = None;
    for (i, c) in psi_t.coeffs().iter().enumerate() {
        let diff = c.checked_sub(&LaurentElement::constant(&phibar_t.coeff(i)))?;
        if let Some(v) = diff.valuation_lower_bound() {
            w = Some(w.map_or(v, |b| b.min(v)));
        }
    }

    let c0 = phibar_t.coeff(0);
    let pres = field.minimal_polynomial(c0.code());
    let phibar_pres = eval_at(&pres, &phibar_t)?;
    let low = phibar_pres
        .lowest_degree()
        .ok_or_else(|| Error::CheckFailed("φ̄ evaluated at p̄res vanished".into()))?;
    let dp = pres.len() - 1;
    if low % dp != 0 {
        return Err(Error::CheckFailed(format!(
            "lowest τ-degree {low} of φ̄ at p̄res is not a multiple of {dp}"
        )));
    }
    let h = (low / dp) as u32;
    debug!("validated module: r={r} h={h} w={w:?} pres={pres:?}");
    Ok(DrinfeldModuleSpec {
        field: field.clone(),
        psi_t,
        r,
        phibar_t,
        w,
        pres,
        h,
    })
}

impl DrinfeldModuleSpec {
    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn psi_t(&self) -> &OrePoly<LaurentElement> {
        &self.psi_t
    }

    /// Rank `r = deg_τ ψ_t`.
    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn phibar_t(&self) -> &KPoly {
        &self.phibar_t
    }

    /// `v(ψ_t − φ̄_t)`; `None` when the module equals its reduction.
    pub fn w(&self) -> Option<Q> {
        self.w
    }

    pub fn exact_reduction(&self) -> bool {
        self.w.is_none()
    }

    /// Minimal polynomial over `F_p` of the constant residue, lowest degree first.
    pub fn pres(&self) -> &[u64] {
        &self.pres
    }

    pub fn height(&self) -> u32 {
        self.h
    }

    /// `ψ_a` for `a ∈ F_p[t]`, coefficients from degree 0 upward.
    pub fn psi(&self, a: &[u64]) -> Result<OrePoly<LaurentElement>> {
        eval_at(a, &self.psi_t)
    }

    pub fn phibar(&self, a: &[u64]) -> Result<KPoly> {
        eval_at(a, &self.phibar_t)
    }

    /// `ψ_t(ξ)`.
    pub fn apply_t(&self, xi: &LaurentElement) -> Result<LaurentElement> {
        self.psi_t.apply(xi)
    }
}

/// Local Tate-module ranks of a module of rank `r_phi`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TateRankTable {
    pub r_phi: usize,
    pub h: u32,
    pub pres: Vec<u64>,
    pub rank_at_pres: usize,
    pub rank_elsewhere: usize,
}

impl TateRankTable {
    /// Rank at the prime generated by `prime` (lowest degree first).
    pub fn rank_at(&self, prime: &[u64]) -> usize {
        if prime == self.pres.as_slice() {
            self.rank_at_pres
        } else {
            self.rank_elsewhere
        }
    }
}

/// Table for the quotient by a lattice of rank `rank_m`.
pub fn tate_rank_table(spec: &DrinfeldModuleSpec, rank_m: usize) -> TateRankTable {
    let r_phi = spec.r + rank_m;
    TateRankTable {
        r_phi,
        h: spec.h,
        pres: spec.pres.clone(),
        rank_at_pres: r_phi - spec.h as usize,
        rank_elsewhere: r_phi,
    }
}

/// Fixed-point iteration `x ← step(x)` modulo `π^n`, stopping at the first
/// repeat. The cap is `n + 2` steps.
fn iterate_mod(
    start: LaurentElement,
    n: Q,
    what: &str,
    mut step: impl FnMut(&LaurentElement) -> Result<LaurentElement>,
) -> Result<LaurentElement> {
    let cap = n.ceil().to_integer().max(0) as usize + 2;
    let mut x = start.truncate(n)?;
    for it in 0..cap {
        let next = step(&x)?.truncate(n)?;
        if next == x {
            trace!("{what}: stable after {it} steps");
            return Ok(x);
        }
        x = next;
    }
    Err(Error::NonConvergence(format!(
        "{what} did not stabilize modulo π^{n} within {cap} steps"
    )))
}

/// The unique `x = Σ_{j≤0} x_j τ^j` with `x ≡ 1 mod m_K` and
/// `ψ_t x = x φ̄_t`, to depth `depth` and modulo `π^prec`.
pub fn canonical_lift(spec: &DrinfeldModuleSpec, depth: usize, prec: i64) -> Result<TauSeries> {
    let field = spec.field();
    if spec.exact_reduction() {
        return Ok(TauSeries::one(field, depth));
    }
    if prec < 1 {
        return Err(Error::PrecisionExhausted(format!(
            "lift precision must be at least 1, got {prec}"
        )));
    }
    let n = Q::from_integer(prec);
    let r = spec.r;
    let pr = field.characteristic().pow(r as u32);
    let f: Vec<LaurentElement> = spec.psi_t.coeffs().to_vec();
    let fbar: Vec<FFElem> = (0..=r).map(|i| spec.phibar_t.coeff(i)).collect();
    let fr = &f[r];
    let fbr = &fbar[r];

    // x_0^{p^r - 1} = f̄_r / f_r, Newton from x = 1.
    let a = LaurentElement::constant(fbr).checked_mul(&fr.inverse_capped(n)?)?.truncate(n)?;
    let m = pr - 1;
    let m_elem = FFElem::from_int(field, m as i64);
    let x0 = iterate_mod(LaurentElement::one(field), n, "x_0", |x| {
        let xm1 = x.pow(m - 1)?;
        let fx = xm1.checked_mul(x)?.checked_sub(&a)?;
        let dfx = xm1.scale(&m_elem);
        x.checked_sub(&fx.checked_mul(&dfx.inverse_capped(n)?)?)
    })?;

    let mut xs: Vec<LaurentElement> = vec![x0];
    for l in 1..=depth as i64 {
        // ℓ = -l; C_ℓ = Σ_{j=ℓ+1}^{min(0, r+ℓ)} (f_{r+ℓ-j} x_j^{p^{r+ℓ-j}} - x_j f̄_{r+ℓ-j}^{p^j})
        let ell = -l;
        let mut c = LaurentElement::zero(field);
        let top = 0.min(r as i64 + ell);
        for j in (ell + 1)..=top {
            let i = (r as i64 + ell - j) as usize;
            let xj = &xs[(-j) as usize];
            let lhs = f[i].checked_mul(&xj.p_power(i as i64))?;
            let rhs = xj.scale(&fbar[i].frobenius_pow(j));
            c = c.checked_add(&lhs.checked_sub(&rhs)?)?;
        }
        let fbr_inv = fbr.frobenius_pow(ell).inverse()?;
        let u = fr.scale(&fbr_inv);
        let c = c.scale(&fbr_inv).truncate(n)?;
        if let Some(v) = c.valuation_lower_bound() {
            if v <= Q::from_integer(0) {
                return Err(Error::CheckFailed(format!(
                    "lift right-hand side at τ^{ell} is not in the maximal ideal"
                )));
            }
        }
        let what = format!("x_{ell}");
        let x = iterate_mod(c.clone(), n, &what, |x| {
            u.checked_mul(&x.p_power(r as i64))?.checked_add(&c)
        })?;
        xs.push(x);
    }
    let x = TauSeries::new(field, xs)?;
    check_lift(spec, &x, n)?;
    Ok(x)
}

/// Whether `f x ≡ x ḡ` on the determined window, below exponent `bound`.
pub fn intertwines(
    f: &OrePoly<LaurentElement>,
    g: &OrePoly<LaurentElement>,
    x: &TauSeries,
    bound: Q,
) -> Result<bool> {
    let lhs = poly_times_series(f, x)?;
    let rhs = series_times_poly(x, g)?;
    for ((l1, a), (l2, b)) in lhs.iter().zip(&rhs) {
        debug_assert_eq!(l1, l2);
        if !a.agrees_below(b, bound)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_lift(spec: &DrinfeldModuleSpec, x: &TauSeries, n: Q) -> Result<()> {
    if !intertwines(&spec.psi_t, &spec.phibar_t.to_laurent(), x, n)? {
        return Err(Error::CheckFailed("ψ_t x ≠ x φ̄_t".into()));
    }
    if let (Some(w), Some(dev)) = (spec.w, x.valuation_of_deviation()) {
        if dev < w.min(n) {
            return Err(Error::CheckFailed(format!(
                "v(x - 1) = {dev} is below w = {w}"
            )));
        }
    }
    Ok(())
}
