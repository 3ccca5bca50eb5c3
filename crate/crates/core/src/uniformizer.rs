//! Truncated Tate uniformization.
//!
//! For a bound `B` the lattice points of valuation `≥ -B` form a finite
//! `F_p`-space `M_B`. Its additive polynomial `e_B` (constant coefficient 1,
//! kernel exactly `M_B`) is built one basis vector at a time, and `φ_t` is
//! solved from `e_B ψ_t = φ_t e_B`, which is unitriangular in the unknowns.
//! The mismatch in the unsolved degrees certifies the result a posteriori.

use log::{debug, warn};

use crate::drinfeld::DrinfeldModuleSpec;
use crate::error::{Error, Result};
use crate::ff::FFElem;
use crate::kummer::LatticeSpec;
use crate::laurent::{LaurentElement, Q};
use crate::linalg::{FpBasis, SparseVec};
use crate::ore::{OrePoly, TwistAction};

/// Largest `dim M_B` for which the point set is listed explicitly.
pub const MAX_LISTED_DIMENSION: usize = 16;

/// The space `M_B` and how it was found.
#[derive(Debug, Clone)]
pub struct LatticeEnumeration {
    /// Valuation bound `B`.
    pub bound: Q,
    /// `ψ_a(m_i)` was generated for `deg a ≤ degree`.
    pub degree: usize,
    /// `F_p`-basis of `M_B` in echelon form, valuations ascending.
    pub basis: Vec<LaurentElement>,
    /// All points of `M_B`, zero first.
    pub points: Vec<LaurentElement>,
    /// Set when the generated valuations differ from the ones predicted
    /// by leading terms, so `M_B` may be incomplete.
    pub cancellation: bool,
}

impl LatticeEnumeration {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

fn require_exact(a: &LaurentElement, what: &str) -> Result<()> {
    if a.is_exact() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} must be exact for uniformization")))
    }
}

fn coordinates(a: &LaurentElement) -> SparseVec<(i64, usize)> {
    let mut v = SparseVec::new();
    for (q, c) in a.terms() {
        for (i, digit) in c.coeffs().into_iter().enumerate() {
            if digit != 0 {
                v.insert((q.to_integer(), i), digit as u32);
            }
        }
    }
    v
}

/// Least `D ≥ 0` with `p^{rD}·min_i |v(m_i)| ≥ B`.
pub fn enumeration_degree(p: u64, r: usize, min_abs_v: Q, bound: Q) -> usize {
    let step = Q::from_integer((p as i64).pow(r as u32));
    let mut reach = min_abs_v;
    let mut d = 0;
    while reach < bound {
        reach *= step;
        d += 1;
    }
    d
}

/// Lists `M_B = {m ∈ M : v(m) ≥ -B}`.
pub fn enumerate_lattice(spec: &DrinfeldModuleSpec, lattice: &LatticeSpec, bound: Q) -> Result<LatticeEnumeration> {
    let field = spec.field();
    let p = field.characteristic();
    for c in spec.psi_t().coeffs() {
        require_exact(c, "ψ_t")?;
    }
    for m in lattice.generators() {
        require_exact(m, "lattice generators")?;
    }
    let zero = LaurentElement::zero(field);
    if lattice.is_empty() {
        return Ok(LatticeEnumeration {
            bound,
            degree: 0,
            basis: Vec::new(),
            points: vec![zero],
            cancellation: false,
        });
    }
    let min_abs = lattice
        .generators()
        .iter()
        .map(|m| -m.valuation().unwrap())
        .min()
        .unwrap();
    let degree = enumeration_degree(p, spec.rank(), min_abs, bound);
    let step = Q::from_integer((p as i64).pow(spec.rank() as u32));

    let mut basis: FpBasis<(i64, usize), LaurentElement> = FpBasis::new(p);
    let combine = |t: &LaurentElement, c: u32, s: &LaurentElement| -> LaurentElement {
        t + &s.scale(&FFElem::from_int(field, c as i64))
    };
    let mut predicted = Vec::new();
    for m in lattice.generators() {
        let mut cur = m.clone();
        let mut v = m.valuation()?;
        for k in 0..=degree {
            if k > 0 {
                cur = spec.apply_t(&cur)?;
                v *= step;
            }
            predicted.push(v);
            basis.insert(coordinates(&cur), cur.clone(), &combine);
        }
    }
    let mut found: Vec<Q> = basis.rows().map(|((e, _), _, _)| Q::from_integer(*e)).collect();
    predicted.sort();
    found.sort();
    let cancellation = predicted != found;
    if cancellation {
        warn!("lattice enumeration saw cancellation; M_B may be incomplete");
    }
    let in_bound: Vec<LaurentElement> = basis
        .rows()
        .filter(|((e, _), _, _)| Q::from_integer(*e) >= -bound)
        .map(|(_, _, t)| t.clone())
        .collect();
    let pts = if in_bound.len() <= MAX_LISTED_DIMENSION {
        let mut pts = vec![zero];
        for b in &in_bound {
            let mut next = Vec::with_capacity(pts.len() * p as usize);
            for c in 0..p {
                let s = b.scale(&FFElem::from_int(field, c as i64));
                next.extend(pts.iter().map(|x| x + &s));
            }
            pts = next;
        }
        pts
    } else {
        Vec::new()
    };
    debug!("M_B has dimension {} at bound {bound}", in_bound.len());
    Ok(LatticeEnumeration {
        bound,
        degree,
        basis: in_bound,
        points: pts,
        cancellation,
    })
}

/// `e_B` and the exact additive polynomial it normalizes.
#[derive(Debug, Clone)]
pub struct TruncatedExponential {
    pub lattice: LatticeEnumeration,
    /// Exact; kernel exactly `M_B`.
    pub kernel_poly: OrePoly<LaurentElement>,
    /// `kernel_poly` divided by its constant coefficient, known modulo `π^prec`
    /// beyond the exact constant term 1.
    pub e: OrePoly<LaurentElement>,
}

/// Additive polynomial with kernel `span(basis)`:
/// `P_k = (τ − c_k^{p−1}) P_{k−1}`, `c_k = P_{k−1}(v_k)`.
pub fn kernel_polynomial(spec: &DrinfeldModuleSpec, basis: &[LaurentElement]) -> Result<OrePoly<LaurentElement>> {
    let field = spec.field();
    let p = field.characteristic();
    let mut poly = OrePoly::one(field);
    for v in basis {
        let c = poly.apply(v)?;
        if c.is_zero() {
            return Err(Error::CheckFailed("basis vectors are F_p-dependent".into()));
        }
        let factor = OrePoly::new(field, vec![c.pow(p - 1)?.neg(), LaurentElement::one(field)]);
        poly = factor.mul(&poly)?;
    }
    Ok(poly)
}

pub fn truncated_exponential(spec: &DrinfeldModuleSpec, lattice: LatticeEnumeration, prec: i64) -> Result<TruncatedExponential> {
    let field = spec.field();
    let kernel_poly = kernel_polynomial(spec, &lattice.basis)?;
    let a0 = kernel_poly.coeff(0);
    let a0inv = a0.inverse_capped(Q::from_integer(prec))?;
    let mut coeffs = vec![LaurentElement::one(field)];
    for c in kernel_poly.coeffs().iter().skip(1) {
        coeffs.push(c.checked_mul(&a0inv)?.truncate(Q::from_integer(prec))?);
    }
    Ok(TruncatedExponential {
        lattice,
        e: OrePoly::new(field, coeffs),
        kernel_poly,
    })
}

/// Result of solving `e_B ψ_t = φ_t e_B`.
#[derive(Debug, Clone)]
pub struct AnalyticQuotient {
    pub exponential: TruncatedExponential,
    pub phi_t: OrePoly<LaurentElement>,
    /// Least valuation of `e_B ψ_t − φ_t e_B` in the unsolved degrees;
    /// `None` when that difference is exactly zero.
    pub residual_valuation: Option<Q>,
    /// Whether some residual coefficient was only known as `O(π^n)`, making
    /// `residual_valuation` a lower bound.
    pub residual_is_bound: bool,
    /// Precision `N` the exponential was computed to.
    pub precision: i64,
}

pub fn analytic_quotient(
    spec: &DrinfeldModuleSpec,
    lattice: &LatticeSpec,
    bound: Q,
    prec: i64,
) -> Result<AnalyticQuotient> {
    let enumeration = enumerate_lattice(spec, lattice, bound)?;
    let exponential = truncated_exponential(spec, enumeration, prec)?;
    let field = spec.field();
    let e = &exponential.e;
    let n = e.degree().unwrap();
    let r = spec.rank();
    let e_psi = e.mul(spec.psi_t())?;

    // φ_k = (eψ)_k − Σ_{a<k} φ_a e_{k−a}^{p^a}
    let mut phi: Vec<LaurentElement> = Vec::with_capacity(r + n + 1);
    for k in 0..=r + n {
        let mut acc = e_psi.coeff(k);
        for (a, pa) in phi.iter().enumerate() {
            if k - a > n {
                continue;
            }
            acc = acc.checked_sub(&pa.checked_mul(&e.coeff(k - a).p_power(a as i64))?)?;
        }
        phi.push(acc);
    }
    // The constant term is solved exactly because e_0 = 1.
    phi[0] = spec.psi_t().coeff(0);
    let phi_t = OrePoly::new(field, phi);

    let phi_e = phi_t.mul(e)?;
    let mut residual: Option<Q> = None;
    let mut is_bound = false;
    for k in (r + n + 1)..=(r + 2 * n) {
        let diff = e_psi.coeff(k).checked_sub(&phi_e.coeff(k))?;
        if diff.is_exact_zero() {
            continue;
        }
        if diff.is_zero() {
            is_bound = true;
        }
        let v = diff.valuation_lower_bound().unwrap();
        residual = Some(residual.map_or(v, |b: Q| b.min(v)));
    }
    if let Some(v) = residual {
        if v <= Q::from_integer(0) {
            return Err(Error::ResidualTooLarge(format!(
                "functional equation residual has valuation {v}"
            )));
        }
    }
    Ok(AnalyticQuotient {
        exponential,
        phi_t,
        residual_valuation: residual,
        residual_is_bound: is_bound,
        precision: prec,
    })
}

/// Precision ceiling for [`analytic_quotient_auto`].
pub const MAX_AUTO_PRECISION: i64 = 4096;

/// Doubles the precision from 32 until the residual is known exactly or the
/// ceiling is hit. The last attempt is returned either way.
pub fn analytic_quotient_auto(spec: &DrinfeldModuleSpec, lattice: &LatticeSpec, bound: Q) -> Result<AnalyticQuotient> {
    let mut prec = 32;
    loop {
        let aq = analytic_quotient(spec, lattice, bound, prec)?;
        if !aq.residual_is_bound || prec >= MAX_AUTO_PRECISION {
            debug!("uniformization settled at precision {prec}");
            return Ok(aq);
        }
        prec *= 2;
    }
}

/// Compares `φ_t` at bound `B` with `φ_t` at a larger bound. The least
/// valuation of the difference, `δ`, estimates the truncation error; the
/// returned degree is the largest `k` with `v(φ_k) < δ`, the part of `φ_t`
/// that the two bounds agree on.
pub fn stable_degree(coarse: &AnalyticQuotient, fine: &AnalyticQuotient) -> Result<(usize, Option<Q>)> {
    let diff = coarse.phi_t.sub(&fine.phi_t)?;
    let delta = diff
        .coeffs()
        .iter()
        .filter_map(|c| c.valuation_lower_bound())
        .min();
    let mut degree = 0;
    for (k, c) in coarse.phi_t.coeffs().iter().enumerate() {
        if let Some(v) = c.valuation_lower_bound() {
            let certified = match delta {
                Some(d) => v < d,
                None => true,
            };
            if certified && !c.is_zero() {
                degree = k;
            }
        }
    }
    Ok((degree, delta))
}
