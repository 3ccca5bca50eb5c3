//! Generators and brute-force oracles shared by the integration suites.
//! Oracles deliberately avoid the library routines they are compared with.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use drinfeld_core::drinfeld::{validate, DrinfeldModuleSpec};
use drinfeld_core::ff::{FFElem, FieldSpec, FiniteField};
use drinfeld_core::filtration::PrincipalClass;
use drinfeld_core::laurent::{LaurentElement, Q};
use drinfeld_core::ore::{OrePoly, SkewLaurentPoly, TauSeries};

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

/// Random field of characteristic `p` and degree `d`, modulus found by trial.
pub fn random_field(rng: &mut ChaCha8Rng, p: u64, d: usize) -> Arc<FiniteField> {
    if d == 1 {
        return FiniteField::new(FieldSpec::prime(p)).unwrap();
    }
    loop {
        let mut g: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
        g.push(1);
        if let Ok(k) = FiniteField::new(FieldSpec::new(p, g)) {
            return k;
        }
    }
}

pub fn random_elem(rng: &mut ChaCha8Rng, k: &Arc<FiniteField>) -> FFElem {
    FFElem::from_code(k, rng.gen_range(0..k.order()))
}

pub fn random_unit(rng: &mut ChaCha8Rng, k: &Arc<FiniteField>) -> FFElem {
    FFElem::from_code(k, rng.gen_range(1..k.order()))
}

/// `c_0 + c_1 π + ... + c_n π^n`, exact.
pub fn random_integral(rng: &mut ChaCha8Rng, k: &Arc<FiniteField>, n: i64, unit: bool) -> LaurentElement {
    let c0 = if unit { random_unit(rng, k) } else { random_elem(rng, k) };
    let mut terms = vec![(0, c0)];
    for e in 1..=n {
        if rng.gen_bool(0.5) {
            terms.push((e, random_elem(rng, k)));
        }
    }
    LaurentElement::from_terms(k, 0, terms, None).unwrap()
}

/// Good-reduction `ψ_t` of rank `r`, with at least one nonzero `π`-adic tail.
pub fn random_module(rng: &mut ChaCha8Rng, k: &Arc<FiniteField>, r: usize) -> DrinfeldModuleSpec {
    loop {
        let coeffs: Vec<LaurentElement> = (0..=r).map(|i| random_integral(rng, k, 3, i == r)).collect();
        let spec = validate(k, OrePoly::new(k, coeffs)).unwrap();
        if !spec.exact_reduction() {
            return spec;
        }
    }
}

/// Exact element with valuation exactly `-pole` and terms at level `level`.
pub fn random_pole(rng: &mut ChaCha8Rng, k: &Arc<FiniteField>, pole: i64, level: u32) -> LaurentElement {
    let p = k.characteristic() as i64;
    let scale = p.pow(level);
    let mut terms = vec![(-pole * scale, random_unit(rng, k))];
    for key in (-pole * scale + 1)..(2 * scale) {
        if rng.gen_bool(0.3) {
            terms.push((key, random_elem(rng, k)));
        }
    }
    LaurentElement::from_terms(k, level, terms, None).unwrap()
}

/// Coefficients of `f·x − x·ḡ` at `τ^k` for `r − J ≤ k ≤ r`, summed directly.
pub fn commutator_window(
    f: &OrePoly<LaurentElement>,
    gbar: &OrePoly<LaurentElement>,
    x: &TauSeries,
) -> Vec<LaurentElement> {
    let k = f.field().clone();
    let r = f.degree().unwrap() as i64;
    let depth = x.depth() as i64;
    let mut out = Vec::new();
    for t in (r - depth)..=r {
        let mut acc = LaurentElement::zero(&k);
        for j in -depth..=0 {
            let i = t - j;
            if !(0..=r).contains(&i) {
                continue;
            }
            let xj = x.coeff(j);
            let left = f.coeff(i as usize).checked_mul(&xj.p_power(i)).unwrap();
            let right = xj.checked_mul(&gbar.coeff(i as usize).frobenius_coeffs(j)).unwrap();
            acc = acc.checked_add(&left.checked_sub(&right).unwrap()).unwrap();
        }
        out.push(acc);
    }
    out
}

/// `(x·y)_k = Σ_{i+j=k} x_i y_j^{p^i}` for `-depth ≤ k ≤ 0`.
pub fn series_product(x: &TauSeries, y: &TauSeries) -> Vec<LaurentElement> {
    let k = x.field().clone();
    let depth = x.depth().min(y.depth()) as i64;
    (0..=depth)
        .map(|l| {
            let t = -l;
            let mut acc = LaurentElement::zero(&k);
            for i in t..=0 {
                let j = t - i;
                let term = x.coeff(i).checked_mul(&y.coeff(j).p_power(i)).unwrap();
                acc = acc.checked_add(&term).unwrap();
            }
            acc
        })
        .collect()
}

/// Rank over `F_p` of dense vectors, by plain Gaussian elimination.
pub fn fp_rank(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let inv = |a: u64| (1..p).find(|b| a * b % p == 1).unwrap();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let s = inv(rows[rank][c]);
        for x in rows[rank].iter_mut() {
            *x = *x * s % p;
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let m = row[c];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x + (p - m) * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `dim_{F_p}` of `Σ_i k[τ]_{≤D}·row_i`, each row a map `j ↦ Σ c_n τ^n`.
/// `c·τ^a` applied to `c_n τ^n` gives `c·c_n^{p^a} τ^{n+a}`.
pub fn span_dimension(rows: &[PrincipalClass], k: &Arc<FiniteField>, degree: usize) -> usize {
    let p = k.characteristic();
    let d = k.degree() as usize;
    let mut vectors: Vec<BTreeMap<(u64, i64, usize), u64>> = Vec::new();
    for row in rows {
        for a in 0..=degree as i64 {
            for b in 0..d {
                let mut basis = vec![0i64; d];
                basis[b] = 1;
                let c = FFElem::from_coeffs(k, &basis).unwrap();
                let mut v = BTreeMap::new();
                for (j, f) in row.components() {
                    for (n, cn) in f.terms() {
                        let coeff = c.checked_mul(&cn.frobenius_pow(a)).unwrap();
                        for (digit, x) in coeff.coeffs().into_iter().enumerate() {
                            if x != 0 {
                                v.insert((*j, n + a, digit), x);
                            }
                        }
                    }
                }
                vectors.push(v);
            }
        }
    }
    let mut index = BTreeMap::new();
    for v in &vectors {
        for key in v.keys() {
            let next = index.len();
            index.entry(*key).or_insert(next);
        }
    }
    let dense: Vec<Vec<u64>> = vectors
        .iter()
        .map(|v| {
            let mut row = vec![0u64; index.len()];
            for (key, x) in v {
                row[index[key]] = *x;
            }
            row
        })
        .collect();
    fp_rank(dense, p)
}

/// Class with the given `(j, [(τ-exponent, code)])` components.
pub fn class(k: &Arc<FiniteField>, comps: &[(u64, Vec<(i64, u32)>)]) -> PrincipalClass {
    PrincipalClass::from_components(
        k,
        comps
            .iter()
            .map(|(j, ts)| (*j, SkewLaurentPoly::from_terms(k, ts.iter().copied()))),
    )
    .unwrap()
}

/// Random row: indices `1..=max_index` prime to `p`, τ-exponents `0..=max_deg`.
pub fn random_row(rng: &mut ChaCha8Rng, k: &Arc<FiniteField>, max_index: u64, max_deg: i64) -> PrincipalClass {
    let p = k.characteristic();
    let indices: Vec<u64> = (1..=max_index).filter(|j| j % p != 0).collect();
    loop {
        let mut comps = Vec::new();
        for &j in &indices {
            if rng.gen_bool(0.5) {
                let mut terms = Vec::new();
                for n in 0..=max_deg {
                    if rng.gen_bool(0.5) {
                        terms.push((n, rng.gen_range(1..k.order())));
                    }
                }
                comps.push((j, terms));
            }
        }
        let c = class(k, &comps);
        if !c.is_zero() {
            return c;
        }
    }
}
