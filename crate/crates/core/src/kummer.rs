//! From a lattice `M ⊂ K` to the structure of the inertia image.
//!
//! The generators are pushed through `χ⁻¹` into `K^perf/O`, decomposed over
//! the basis `[π^{-j}]`, and the left `k[τ]`-module they generate is brought to
//! a skew echelon form. The pivots of that form are the breaks `S`, and every
//! reported quantity (ranks, conductor, openness, filtration table) is a
//! function of `S`, the field degree `d` and the declared lattice rank.

use std::collections::BTreeSet;
use std::sync::Arc;

use log::{debug, info};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::drinfeld::{canonical_lift, tate_rank_table, DrinfeldModuleSpec, TateRankTable};
use crate::error::{Error, Result};
use crate::ff::FiniteField;
use crate::filtration::{decompose, PrincipalClass};
use crate::laurent::{LaurentElement, Q};
use crate::linalg::{FpBasis, SparseVec};
use crate::ore::{KPoly, SkewLaurentPoly, TauSeries};

/// Generators `m_1..m_n` of the period lattice, all in `K` with `v < 0`.
#[derive(Debug, Clone)]
pub struct LatticeSpec {
    generators: Vec<LaurentElement>,
    declared_rank: usize,
    bound: usize,
}

impl LatticeSpec {
    /// `declared_rank` defaults to the number of generators; `bound` is the
    /// degree up to which `A`-independence is checked.
    pub fn new(generators: Vec<LaurentElement>, declared_rank: Option<usize>, bound: usize) -> Result<Self> {
        for (i, m) in generators.iter().enumerate() {
            if m.level() != 0 {
                return Err(Error::InvalidInput(format!(
                    "generator {i} must lie in K, found fractional exponents"
                )));
            }
            let v = m.valuation().map_err(|e| match e {
                Error::ZeroValuation => Error::InvalidInput(format!("generator {i} is zero")),
                other => other,
            })?;
            if v >= Q::from_integer(0) {
                return Err(Error::InvalidInput(format!(
                    "generator {i} has valuation {v}, expected a negative valuation"
                )));
            }
        }
        let n = generators.len();
        Ok(Self {
            generators,
            declared_rank: declared_rank.unwrap_or(n),
            bound,
        })
    }

    pub fn generators(&self) -> &[LaurentElement] {
        &self.generators
    }

    pub fn declared_rank(&self) -> usize {
        self.declared_rank
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `max_i |v(m_i)|`, zero for the empty lattice.
    pub fn max_abs_valuation(&self) -> Q {
        self.generators
            .iter()
            .map(|m| -m.valuation().unwrap())
            .max()
            .unwrap_or_else(|| Q::from_integer(0))
    }

    /// Drops generator `i`, lowering the declared rank by one.
    pub fn without(&self, i: usize) -> Self {
        let mut generators = self.generators.clone();
        generators.remove(i);
        Self {
            generators,
            declared_rank: self.declared_rank.saturating_sub(1),
            bound: self.bound,
        }
    }
}

/// Least `J ≥ 1` with `p^J·w ≥ v`; zero when the module equals its reduction.
pub fn required_depth(p: u64, w: Option<Q>, v: Q) -> usize {
    let Some(w) = w else { return 0 };
    let mut j = 1usize;
    let mut reach = w * Q::from_integer(p as i64);
    while reach < v {
        reach *= Q::from_integer(p as i64);
        j += 1;
    }
    j
}

/// `⌈v⌉ + 1`.
pub fn required_precision(v: Q) -> i64 {
    v.ceil().to_integer() + 1
}

/// The isomorphism `χ` and its inverse on classes, realized through the
/// canonical lift `x` and its inverse `y` at a fixed depth and precision.
#[derive(Debug, Clone)]
pub struct ChiMap {
    spec: DrinfeldModuleSpec,
    depth: usize,
    prec: i64,
    x: TauSeries,
    y: TauSeries,
    z: Vec<LaurentElement>,
}

impl ChiMap {
    pub fn new(spec: &DrinfeldModuleSpec, depth: usize, prec: i64) -> Result<Self> {
        let field = spec.field();
        let (x, y) = if spec.exact_reduction() {
            (TauSeries::one(field, depth), TauSeries::one(field, depth))
        } else {
            let x = canonical_lift(spec, depth, prec)?;
            let y = x.inverse(depth)?;
            (x, y)
        };
        let z = (0..=depth as i64).map(|j| y.z(-j)).collect();
        debug!("χ prepared at depth {depth}, precision {prec}");
        Ok(Self {
            spec: spec.clone(),
            depth,
            prec,
            x,
            y,
            z,
        })
    }

    /// Depth and precision chosen for classes of valuation down to `-v`.
    pub fn auto(spec: &DrinfeldModuleSpec, v: Q) -> Result<Self> {
        let depth = required_depth(spec.field().characteristic(), spec.w(), v);
        Self::new(spec, depth, required_precision(v).max(1))
    }

    pub fn spec(&self) -> &DrinfeldModuleSpec {
        &self.spec
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn lift(&self) -> &TauSeries {
        &self.x
    }

    pub fn lift_inverse(&self) -> &TauSeries {
        &self.y
    }

    /// `z_j = y_j^{p^{|j|}} ∈ O_K` for `-depth ≤ j ≤ 0`.
    pub fn z(&self, j: i64) -> &LaurentElement {
        &self.z[(-j) as usize]
    }

    fn check_depth(&self, v: Q) -> Result<()> {
        let need = required_depth(self.spec.field().characteristic(), self.spec.w(), v);
        if need > self.depth {
            return Err(Error::PrecisionExhausted(format!(
                "depth {} is too small for valuation -{v}; need {need}",
                self.depth
            )));
        }
        Ok(())
    }

    /// `χ⁻¹([ξ]) = Σ_j [(z_j ξ)^{p^j}]`.
    pub fn inverse_class(&self, xi: &LaurentElement) -> Result<PrincipalClass> {
        let field = self.spec.field();
        if xi.is_exact_zero() {
            return Ok(PrincipalClass::zero(field));
        }
        let v = xi.valuation()?;
        if v >= Q::from_integer(0) {
            return decompose(xi);
        }
        let need = required_precision(-v);
        if let Some(n) = xi.precision() {
            if n < Q::from_integer(need) {
                return Err(Error::PrecisionExhausted(format!(
                    "input known to π^{n}, need precision {need}"
                )));
            }
        }
        if self.spec.exact_reduction() {
            return decompose(xi);
        }
        self.check_depth(-v)?;
        let mut acc = LaurentElement::zero(field);
        for (i, z) in self.z.iter().enumerate() {
            let part = z.checked_mul(xi)?.principal_part()?;
            acc = acc.checked_add(&part.p_power(-(i as i64)))?;
        }
        decompose(&acc)
    }

    /// `χ([ξ]) = Σ_j [x_j ξ^{p^j}]` on a class.
    pub fn class(&self, c: &PrincipalClass) -> Result<PrincipalClass> {
        let field = self.spec.field();
        if c.is_zero() || self.spec.exact_reduction() {
            return Ok(c.clone());
        }
        let rep = c.reconstruct()?;
        self.check_depth(-rep.valuation()?)?;
        let mut acc = LaurentElement::zero(field);
        for (i, x) in self.x.coeffs().iter().enumerate() {
            let part = x.checked_mul(&rep.p_power(-(i as i64)))?.principal_part()?;
            acc = acc.checked_add(&part)?;
        }
        decompose(&acc)
    }
}

/// `χ⁻¹` of one element with automatically chosen depth and precision.
pub fn chi_inverse_class(spec: &DrinfeldModuleSpec, xi: &LaurentElement) -> Result<PrincipalClass> {
    let v = xi.valuation_lower_bound().map_or(Q::from_integer(0), |v| -v);
    let chi = ChiMap::auto(spec, v.max(Q::from_integer(0)))?;
    chi.inverse_class(xi)
}

/// Rows `χ⁻¹(m_i)` generating `M̄`.
pub fn build_mbar(chi: &ChiMap, lattice: &LatticeSpec) -> Result<Vec<PrincipalClass>> {
    lattice
        .generators()
        .iter()
        .map(|m| chi.inverse_class(m))
        .collect()
}

/// One logged row operation of the echelon reduction.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum RowOp {
    /// `row ← τ^shift · row`.
    Scale { row: usize, shift: i64 },
    /// `target ← target − q · source`.
    Eliminate {
        target: usize,
        source: usize,
        #[serde(serialize_with = "serialize_kpoly")]
        q: KPoly,
    },
}

fn apply_op(rows: &mut [PrincipalClass], op: &RowOp, inverse: bool) {
    match op {
        RowOp::Scale { row, shift } => {
            let s = if inverse { -shift } else { *shift };
            let field = rows[*row].field().clone();
            rows[*row] = rows[*row].left_mul(&SkewLaurentPoly::one(&field).shift_left(s));
        }
        RowOp::Eliminate { target, source, q } => {
            let qs = rows[*source].left_mul(&SkewLaurentPoly::from_kpoly(q));
            rows[*target] = if inverse {
                rows[*target].add(&qs)
            } else {
                rows[*target].sub(&qs)
            };
        }
    }
}

/// Skew echelon form: rows with strictly decreasing top index.
#[derive(Debug, Clone)]
pub struct EchelonForm {
    rows: Vec<PrincipalClass>,
    pivots: Vec<u64>,
    certificate: Vec<RowOp>,
    // Working-row index of each output row.
    sources: Vec<usize>,
}

impl EchelonForm {
    pub fn rows(&self) -> &[PrincipalClass] {
        &self.rows
    }

    /// Top indices, decreasing.
    pub fn pivots(&self) -> &[u64] {
        &self.pivots
    }

    pub fn certificate(&self) -> &[RowOp] {
        &self.certificate
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Runs the certificate on `input`; the nonzero results, in pivot
    /// order, are the echelon rows.
    pub fn replay(&self, input: &[PrincipalClass]) -> Vec<PrincipalClass> {
        let mut work = input.to_vec();
        for op in &self.certificate {
            apply_op(&mut work, op, false);
        }
        self.sources.iter().map(|&i| work[i].clone()).collect()
    }

    /// Undoes the certificate starting from the working rows, recovering the
    /// input. Working rows not among the output are zero.
    pub fn inverse_replay(&self, input_len: usize) -> Vec<PrincipalClass> {
        let field = self.rows.first().map(|r| r.field().clone());
        let Some(field) = field else {
            return Vec::new();
        };
        let mut work = vec![PrincipalClass::zero(&field); input_len];
        for (row, &i) in self.rows.iter().zip(&self.sources) {
            work[i] = row.clone();
        }
        for op in self.certificate.iter().rev() {
            apply_op(&mut work, op, true);
        }
        work
    }
}

fn min_tau_exponent(c: &PrincipalClass) -> Option<i64> {
    c.components().values().filter_map(|f| f.min_exponent()).min()
}

fn column_kpoly(c: &PrincipalClass, j: u64) -> KPoly {
    c.component(j).to_kpoly().expect("rows are scaled into k[τ]")
}

/// Reduces `rows` to echelon form by skew left-Euclidean elimination.
/// Rows sharing a top index are processed in input order.
pub fn skew_echelon(rows: &[PrincipalClass]) -> EchelonForm {
    let mut work = rows.to_vec();
    let mut cert = Vec::new();
    for (i, row) in work.iter_mut().enumerate() {
        if let Some(m) = min_tau_exponent(row) {
            if m != 0 {
                let op = RowOp::Scale { row: i, shift: -m };
                apply_op(std::slice::from_mut(row), &RowOp::Scale { row: 0, shift: -m }, false);
                cert.push(op);
            }
        }
    }
    loop {
        let mut by_top: std::collections::BTreeMap<u64, Vec<usize>> = Default::default();
        for (i, r) in work.iter().enumerate() {
            if let Some(t) = r.top_index() {
                by_top.entry(t).or_default().push(i);
            }
        }
        let Some((&j, idx)) = by_top.iter().rev().find(|(_, v)| v.len() > 1) else {
            break;
        };
        let (a, b) = (idx[0], idx[1]);
        // Euclid on column j until one of the two leaves it; the remainder
        // always lands in the row whose entry had the larger degree.
        while work[a].top_index() == Some(j) && work[b].top_index() == Some(j) {
            let fa = column_kpoly(&work[a], j);
            let fb = column_kpoly(&work[b], j);
            let (target, source, f, g) = if fb.degree() < fa.degree() {
                (a, b, fa, fb)
            } else {
                (b, a, fb, fa)
            };
            let (q, _) = f.left_divmod(&g).expect("column entry is nonzero");
            let op = RowOp::Eliminate { target, source, q };
            apply_op(&mut work, &op, false);
            cert.push(op);
        }
    }
    let mut order: Vec<usize> = (0..work.len()).filter(|&i| !work[i].is_zero()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(work[i].top_index().unwrap()));
    EchelonForm {
        rows: order.iter().map(|&i| work[i].clone()).collect(),
        pivots: order.iter().map(|&i| work[i].top_index().unwrap()).collect(),
        certificate: cert,
        sources: order,
    }
}

/// Outcome of the bounded search for `A`-relations among the generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndependenceCheck {
    /// Relations `Σ ψ_{a_i}(m_i) ∈ O` were searched with `deg a_i ≤ degree`.
    pub degree: usize,
    pub fp_rank: usize,
    pub candidates: usize,
    pub kernel_dim: usize,
}

impl IndependenceCheck {
    pub fn independent(&self) -> bool {
        self.kernel_dim == 0
    }
}

/// `F_p`-coordinates of the principal part of a level-0 element, keyed by
/// `(exponent, digit)`.
fn principal_coordinates(a: &LaurentElement, field: &FiniteField) -> Result<SparseVec<(i64, usize)>> {
    let pp = a.principal_part()?;
    let mut v = SparseVec::new();
    for (q, c) in pp.terms() {
        let e = q.to_integer();
        for (i, digit) in field.digits(c.code()).into_iter().enumerate() {
            if digit != 0 {
                v.insert((e, i), digit as u32);
            }
        }
    }
    Ok(v)
}

/// `F_p`-rank of the principal parts of `ψ_{t^k}(m_i)`, `k ≤ degree`.
pub fn bounded_independence(spec: &DrinfeldModuleSpec, lattice: &LatticeSpec) -> Result<IndependenceCheck> {
    let field = spec.field();
    let mut basis: FpBasis<(i64, usize), ()> = FpBasis::new(field.characteristic());
    let mut candidates = 0;
    for m in lattice.generators() {
        let mut cur = m.clone();
        for k in 0..=lattice.bound() {
            if k > 0 {
                cur = spec.apply_t(&cur)?;
            }
            candidates += 1;
            basis.insert(principal_coordinates(&cur, field)?, (), &|_, _, _| ());
        }
    }
    Ok(IndependenceCheck {
        degree: lattice.bound(),
        fp_rank: basis.rank(),
        candidates,
        kernel_dim: candidates - basis.rank(),
    })
}

/// Graded pieces of the inertia filtration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// The graded piece at `i` is free of rank `d`.
    FreeRankD,
    /// The step is nonzero but its graded piece is finite.
    Finite,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiltrationStep {
    pub i: u64,
    pub rank: usize,
    pub classification: StepKind,
}

/// Consequences of the `j`-invariants of the generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JBounds {
    /// `j`-invariants of the enumerated lattice elements; a lower bound for `|j(M)|`.
    pub j_set: Vec<u64>,
    /// `|j| ≤ rank_R ≤ declared_rank`.
    pub rank_chain_ok: bool,
    /// `|j| < rank_R`.
    pub first_inequality_strict: bool,
    /// `|j| = declared_rank`, which alone forces openness.
    pub openness_criterion_met: bool,
    /// `i` with a generator of valuation `-i`, `p ∤ i`.
    pub valuation_breaks: Vec<u64>,
    pub valuation_breaks_in_s: bool,
}

/// Ranks of the graded inertia quotients: `0` when `p | i`, `d` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedRule {
    pub p_divides_i: usize,
    pub p_not_divides_i: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct InertiaReport {
    pub d: u32,
    pub r_psi: usize,
    pub h: u32,
    pub pres: Vec<u64>,
    #[serde(serialize_with = "serialize_w")]
    pub w: Option<Q>,
    #[serde(rename = "S")]
    pub s: Vec<u64>,
    pub rank_r: usize,
    pub declared_rank: usize,
    pub conductor: u64,
    pub image_rank: usize,
    pub open: bool,
    pub filtration: Vec<FiltrationStep>,
    pub tate: TateRankTable,
    pub bounds: JBounds,
    pub graded_rule: GradedRule,
    pub independence: IndependenceCheck,
    pub depth: usize,
    pub precision: i64,
    pub mbar: Vec<PrincipalClass>,
    pub echelon: Vec<PrincipalClass>,
    pub certificate: Vec<RowOp>,
}

impl InertiaReport {
    pub fn rank_at(&self, i: u64) -> usize {
        self.filtration
            .iter()
            .find(|s| s.i == i)
            .map_or(0, |s| s.rank)
    }
}

/// Filtration table `i ↦ d·|{s ∈ S : s ≥ i}|` for `0 ≤ i ≤ conductor + 1`.
pub fn filtration_table(s: &[u64], d: u32) -> Vec<FiltrationStep> {
    let conductor = s.iter().copied().max().unwrap_or(0);
    let set: BTreeSet<u64> = s.iter().copied().collect();
    (0..=conductor + 1)
        .map(|i| {
            let rank = d as usize * set.iter().filter(|&&x| x >= i).count();
            let classification = if set.contains(&i) {
                StepKind::FreeRankD
            } else if rank > 0 {
                StepKind::Finite
            } else {
                StepKind::Zero
            };
            FiltrationStep {
                i,
                rank,
                classification,
            }
        })
        .collect()
}

/// Everything downstream of the echelon form, given `S` and the inputs.
pub fn inertia_report(spec: &DrinfeldModuleSpec, lattice: &LatticeSpec) -> Result<InertiaReport> {
    let chi = ChiMap::auto(spec, lattice.max_abs_valuation())?;
    inertia_report_with(&chi, lattice)
}

/// As [`inertia_report`], with a caller-prepared `χ`.
pub fn inertia_report_with(chi: &ChiMap, lattice: &LatticeSpec) -> Result<InertiaReport> {
    let spec = chi.spec();
    let field = spec.field();
    let p = field.characteristic();
    let d = field.degree();
    let n = lattice.generators().len();
    let declared = lattice.declared_rank();
    if declared > n {
        return Err(Error::RankInconsistent(format!(
            "declared rank {declared} exceeds the {n} generators"
        )));
    }
    let independence = bounded_independence(spec, lattice)?;
    if declared == n && !independence.independent() {
        return Err(Error::RankInconsistent(format!(
            "found {} independent relation(s) of degree ≤ {} among generators declared free",
            independence.kernel_dim, independence.degree
        )));
    }

    let mbar = build_mbar(chi, lattice)?;
    let echelon = skew_echelon(&mbar);
    let rank_r = echelon.rank();
    if declared < rank_r {
        return Err(Error::RankInconsistent(format!(
            "declared rank {declared} is below rank_R = {rank_r}"
        )));
    }
    let mut s: Vec<u64> = echelon.pivots().to_vec();
    s.sort_unstable();
    let conductor = s.last().copied().unwrap_or(0);

    let mut j_set = BTreeSet::new();
    let mut valuation_breaks = BTreeSet::new();
    for (m, row) in lattice.generators().iter().zip(&mbar) {
        let jm = decompose(m)?.j_invariant()?;
        let jrow = row.j_invariant()?;
        if jm != jrow {
            return Err(Error::CheckFailed(format!(
                "χ⁻¹ changed the j-invariant from {jm} to {jrow}"
            )));
        }
        j_set.insert(jm);
        let v = m.valuation()?;
        let i = (-v).to_integer();
        if v.is_integer() && i > 0 && !(i as u64).is_multiple_of(p) {
            valuation_breaks.insert(i as u64);
        }
    }
    let breaks_in_s = valuation_breaks.iter().all(|i| s.contains(i));
    if !breaks_in_s {
        return Err(Error::CheckFailed(format!(
            "valuation breaks {valuation_breaks:?} are not all among S = {s:?}"
        )));
    }
    let js = j_set.len();
    let bounds = JBounds {
        j_set: j_set.into_iter().collect(),
        rank_chain_ok: js <= rank_r && rank_r <= declared,
        first_inequality_strict: js < rank_r,
        openness_criterion_met: js == declared,
        valuation_breaks: valuation_breaks.into_iter().collect(),
        valuation_breaks_in_s: breaks_in_s,
    };
    info!("S = {s:?}, rank_R = {rank_r}, conductor = {conductor}");
    Ok(InertiaReport {
        d,
        r_psi: spec.rank(),
        h: spec.height(),
        pres: spec.pres().to_vec(),
        w: spec.w(),
        filtration: filtration_table(&s, d),
        s,
        rank_r,
        declared_rank: declared,
        conductor,
        image_rank: d as usize * rank_r,
        open: declared == rank_r,
        tate: tate_rank_table(spec, declared),
        bounds,
        graded_rule: GradedRule {
            p_divides_i: 0,
            p_not_divides_i: d as usize,
        },
        independence,
        depth: chi.depth(),
        precision: chi.precision(),
        mbar,
        echelon: echelon.rows().to_vec(),
        certificate: echelon.certificate().to_vec(),
    })
}

fn serialize_w<S: Serializer>(w: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match w {
        Some(q) => s.serialize_str(&q.to_string()),
        None => s.serialize_str("exact"),
    }
}

fn serialize_kpoly<S: Serializer>(q: &KPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    let terms: Vec<(usize, Vec<u64>)> = q
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.coeffs()))
        .collect();
    let mut seq = s.serialize_seq(Some(terms.len()))?;
    for t in &terms {
        seq.serialize_element(t)?;
    }
    seq.end()
}

impl Serialize for PrincipalClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.components().len()))?;
        for (j, f) in self.components() {
            let terms: Vec<(i64, Vec<u64>)> = f.terms().into_iter().map(|(n, c)| (n, c.coeffs())).collect();
            map.serialize_entry(&j.to_string(), &terms)?;
        }
        map.end()
    }
}

/// `F_p`-dimension count used by tests and `--verify`: the span of
/// `c·τ^a·row` for `c` in an `F_p`-basis of `k` and `0 ≤ a ≤ degree`.
pub fn truncated_span_dimension(rows: &[PrincipalClass], field: &Arc<FiniteField>, degree: usize) -> usize {
    let p = field.characteristic();
    let mut basis: FpBasis<(u64, i64, usize), ()> = FpBasis::new(p);
    let scalars: Vec<u32> = (0..field.degree()).map(|i| (p as u32).pow(i)).collect();
    for row in rows {
        for a in 0..=degree as i64 {
            for &c in &scalars {
                let g = SkewLaurentPoly::monomial(&crate::ff::FFElem::from_code(field, c), a);
                let moved = row.left_mul(&g);
                let mut v = SparseVec::new();
                for (j, nu, coeff) in moved.triples() {
                    for (i, digit) in coeff.coeffs().into_iter().enumerate() {
                        if digit != 0 {
                            v.insert((j, nu, i), digit as u32);
                        }
                    }
                }
                basis.insert(v, (), &|_, _, _| ());
            }
        }
    }
    basis.rank()
}
