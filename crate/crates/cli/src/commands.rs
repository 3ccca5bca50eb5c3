//! One function per subcommand. Each returns the JSON report, a short
//! human-readable summary and, when asked, a map of named checks.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use drinfeld_core::drinfeld::{canonical_lift, intertwines, tate_rank_table, DrinfeldModuleSpec};
use drinfeld_core::filtration::{decompose, PrincipalClass};
use drinfeld_core::kummer::{
    build_mbar, inertia_report_with, required_depth, required_precision, skew_echelon, ChiMap, InertiaReport,
    LatticeSpec,
};
use drinfeld_core::laurent::{LaurentElement, Q};
use drinfeld_core::ore::{OrePoly, TauSeries, TwistAction};
use drinfeld_core::uniformizer::{analytic_quotient, analytic_quotient_auto, AnalyticQuotient};

use crate::input::{Auto, Params, Resolved};
use crate::CliError;

/// Lift depth when neither a lattice nor an explicit depth fixes one.
pub const DEFAULT_LIFT_DEPTH: usize = 4;
/// Lift precision when neither a lattice nor an explicit precision fixes one.
pub const DEFAULT_LIFT_PRECISION: i64 = 16;

/// Values given on the command line, which override the document.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub depth: Option<Auto<usize>>,
    pub prec: Option<Auto<i64>>,
    pub bound: Option<Q>,
}

pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub checks: Option<BTreeMap<String, bool>>,
}

fn q_str(q: Q) -> String {
    q.to_string()
}

fn opt_q(q: Option<Q>) -> Value {
    q.map_or(Value::Null, |q| Value::String(q_str(q)))
}

fn poly_json(f: &OrePoly<LaurentElement>) -> Value {
    let map: BTreeMap<String, String> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_exact_zero())
        .map(|(i, c)| (i.to_string(), c.to_string()))
        .collect();
    json!(map)
}

fn series_json(x: &TauSeries) -> Value {
    let map: BTreeMap<String, String> = x
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_exact_zero())
        .map(|(i, c)| ((-(i as i64)).to_string(), c.to_string()))
        .collect();
    json!(map)
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn require_lattice(r: &Resolved) -> Result<&LatticeSpec, CliError> {
    r.lattice
        .as_ref()
        .ok_or_else(|| CliError::Parse("this command needs a [lattice] block".into()))
}

fn pick<T: Copy>(flag: Option<Auto<T>>, doc: Option<Auto<T>>) -> Auto<T> {
    flag.or(doc).unwrap_or(Auto::Auto)
}

/// Resolves depth and precision for classes down to valuation `-v`.
fn chi_map(spec: &DrinfeldModuleSpec, params: &Params, o: &Overrides, v: Q) -> Result<ChiMap, CliError> {
    let depth = match pick(o.depth, params.depth) {
        Auto::Auto => required_depth(spec.field().characteristic(), spec.w(), v),
        Auto::Value(d) => d,
    };
    let prec = match pick(o.prec, params.prec) {
        Auto::Auto => required_precision(v).max(1),
        Auto::Value(n) => n,
    };
    Ok(ChiMap::new(spec, depth, prec)?)
}

pub fn validate(r: &Resolved) -> Result<Outcome, CliError> {
    let spec = &r.spec;
    let field = spec.field();
    let phibar: BTreeMap<String, String> = spec
        .phibar_t()
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i.to_string(), c.to_string()))
        .collect();
    let report = json!({
        "p": field.characteristic(),
        "d": field.degree(),
        "rank": spec.rank(),
        "psi_t": poly_json(spec.psi_t()),
        "phibar_t": phibar,
        "w": spec.w().map_or(Value::String("exact".into()), |w| Value::String(q_str(w))),
        "exact_reduction": spec.exact_reduction(),
        "pres": spec.pres(),
        "height": spec.height(),
        "lattice_generators": r.lattice.as_ref().map_or(0, |l| l.generators().len()),
    });
    let summary = format!(
        "good reduction: rank {}, height {}, w = {}",
        spec.rank(),
        spec.height(),
        spec.w().map_or("exact".to_string(), q_str)
    );
    Ok(Outcome {
        report,
        summary,
        checks: None,
    })
}

pub fn lift(r: &Resolved, o: &Overrides, verify: bool) -> Result<Outcome, CliError> {
    let spec = &r.spec;
    let p = spec.field().characteristic();
    let v = r.lattice.as_ref().filter(|l| !l.is_empty()).map(|l| l.max_abs_valuation());
    let depth = match pick(o.depth, r.params.depth) {
        Auto::Auto => v.map_or(DEFAULT_LIFT_DEPTH, |v| required_depth(p, spec.w(), v)),
        Auto::Value(d) => d,
    };
    let prec = match pick(o.prec, r.params.prec) {
        Auto::Auto => v.map_or(DEFAULT_LIFT_PRECISION, required_precision).max(1),
        Auto::Value(n) => n,
    };
    let x = canonical_lift(spec, depth, prec)?;
    let y = x.inverse(depth)?;
    let report = json!({
        "depth": depth,
        "precision": prec,
        "x": series_json(&x),
        "x_inverse": series_json(&y),
        "deviation_valuation": opt_q(x.valuation_of_deviation()),
    });
    let checks = if verify {
        let n = Q::from_integer(prec);
        let mut c = BTreeMap::new();
        c.insert(
            "intertwines".into(),
            intertwines(spec.psi_t(), &spec.phibar_t().to_laurent(), &x, n)?,
        );
        let floor = spec.w().map_or(n, |w| w.min(n));
        c.insert(
            "congruent_to_one".into(),
            x.valuation_of_deviation().is_none_or(|d| d >= floor),
        );
        c.insert(
            "inverse".into(),
            x.mul(&y, depth)?.agrees_below(&TauSeries::one(spec.field(), depth), n)?,
        );
        Some(c)
    } else {
        None
    };
    Ok(Outcome {
        report,
        summary: format!("canonical lift to depth {depth} modulo π^{prec}"),
        checks,
    })
}

pub fn chi_inv(r: &Resolved, o: &Overrides, verify: bool) -> Result<Outcome, CliError> {
    let lattice = require_lattice(r)?;
    let v = if lattice.is_empty() {
        Q::from_integer(0)
    } else {
        lattice.max_abs_valuation()
    };
    let chi = chi_map(&r.spec, &r.params, o, v)?;
    let mut entries = Vec::new();
    let mut round_trip = true;
    let mut j_kept = true;
    for m in lattice.generators() {
        let class = chi.inverse_class(m)?;
        let direct = decompose(m)?;
        if verify {
            round_trip &= chi.class(&class)? == direct;
            j_kept &= class.j_invariant()? == direct.j_invariant()?;
        }
        entries.push(json!({
            "input": m.to_string(),
            "class": to_json(&class),
            "j": class.j_invariant()?,
            "valuation": q_str(class.valuation()?),
        }));
    }
    let report = json!({
        "depth": chi.depth(),
        "precision": chi.precision(),
        "classes": entries,
    });
    let checks = verify.then(|| {
        BTreeMap::from([
            ("chi_round_trip".to_string(), round_trip),
            ("j_preserved".to_string(), j_kept),
        ])
    });
    Ok(Outcome {
        report,
        summary: format!(
            "χ⁻¹ of {} generator(s) at depth {}, precision {}",
            lattice.generators().len(),
            chi.depth(),
            chi.precision()
        ),
        checks,
    })
}

fn rank_and_conductor(chi: &ChiMap, lattice: &LatticeSpec) -> Result<(usize, u64), CliError> {
    let e = skew_echelon(&build_mbar(chi, lattice)?);
    Ok((e.rank(), e.pivots().iter().copied().max().unwrap_or(0)))
}

fn analyze_checks(
    chi: &ChiMap,
    lattice: &LatticeSpec,
    report: &InertiaReport,
) -> Result<BTreeMap<String, bool>, CliError> {
    let mut c = BTreeMap::new();
    let echelon = skew_echelon(&report.mbar);
    c.insert("certificate_replay".into(), echelon.replay(&report.mbar) == report.echelon);
    let n = report.mbar.len();
    let back = echelon.inverse_replay(n);
    let inverse_ok = if back.is_empty() {
        report.mbar.iter().all(PrincipalClass::is_zero)
    } else {
        back == report.mbar
    };
    c.insert("certificate_inverse".into(), inverse_ok);
    let mut j_ok = true;
    for (m, row) in lattice.generators().iter().zip(&report.mbar) {
        j_ok &= decompose(m)?.j_invariant()? == row.j_invariant()?;
    }
    c.insert("j_preserved".into(), j_ok);
    c.insert("rank_chain".into(), report.bounds.rank_chain_ok);
    c.insert("valuation_breaks_in_s".into(), report.bounds.valuation_breaks_in_s);
    let ranks: Vec<usize> = report.filtration.iter().map(|s| s.rank).collect();
    let decreasing = ranks.windows(2).all(|w| w[0] >= w[1]);
    let ends = report.rank_at(report.conductor + 1) == 0
        && (report.s.is_empty() || report.rank_at(report.conductor) > 0);
    c.insert("filtration_shape".into(), decreasing && ends);
    let mut monotone = true;
    for i in 0..n {
        let (rank, conductor) = rank_and_conductor(chi, &lattice.without(i))?;
        monotone &= rank <= report.rank_r && conductor <= report.conductor;
    }
    c.insert("drop_generator_monotone".into(), monotone);
    Ok(c)
}

pub fn analyze(r: &Resolved, o: &Overrides, verify: bool) -> Result<Outcome, CliError> {
    let lattice = require_lattice(r)?;
    let v = if lattice.is_empty() {
        Q::from_integer(0)
    } else {
        lattice.max_abs_valuation()
    };
    let chi = chi_map(&r.spec, &r.params, o, v)?;
    let report = inertia_report_with(&chi, lattice)?;
    let checks = if verify {
        Some(analyze_checks(&chi, lattice, &report)?)
    } else {
        None
    };
    let summary = format!(
        "S = {:?}, rank_R = {}, conductor = {}, image rank = {}, open = {}",
        report.s, report.rank_r, report.conductor, report.image_rank, report.open
    );
    Ok(Outcome {
        report: to_json(&report),
        summary,
        checks,
    })
}

fn uniformize_checks(spec: &DrinfeldModuleSpec, aq: &AnalyticQuotient) -> Result<BTreeMap<String, bool>, CliError> {
    let mut c = BTreeMap::new();
    let en = &aq.exponential.lattice;
    let kp = &aq.exponential.kernel_poly;
    let mut kills = true;
    for m in &en.points {
        kills &= kp.apply(m)?.is_exact_zero();
    }
    c.insert("kernel_contains_lattice".into(), kills);
    c.insert("degree_matches_dimension".into(), aq.exponential.e.degree() == Some(en.dimension()));
    let field = spec.field();
    let offset = LaurentElement::pi_pow(field, 1);
    let mut additive = true;
    for a in en.points.iter().take(8) {
        for b in en.points.iter().take(8) {
            let a = a + &offset;
            let lhs = kp.apply(&(&a + b))?;
            let rhs = kp.apply(&a)?.checked_add(&kp.apply(b)?)?;
            additive &= lhs == rhs;
        }
    }
    c.insert("additive".into(), additive);
    c.insert(
        "constant_coefficient".into(),
        aq.phi_t.coeff(0) == spec.psi_t().coeff(0),
    );
    c.insert(
        "residual_positive".into(),
        aq.residual_valuation.is_none_or(|v| v > Q::from_integer(0)),
    );
    c.insert("enumeration_complete".into(), !en.cancellation);
    Ok(c)
}

pub fn uniformize(r: &Resolved, o: &Overrides, verify: bool) -> Result<Outcome, CliError> {
    let spec = &r.spec;
    let empty;
    let lattice = match &r.lattice {
        Some(l) => l,
        None => {
            empty = LatticeSpec::new(Vec::new(), Some(0), 0)?;
            &empty
        }
    };
    let bound = match o.bound.or(r.params.bound.map(|b| b.0)) {
        Some(b) => b,
        None if lattice.is_empty() => Q::from_integer(1),
        // One application of ψ_t past the shallowest generator.
        None => {
            let step = (spec.field().characteristic() as i64).pow(spec.rank() as u32);
            lattice
                .generators()
                .iter()
                .map(|m| -m.valuation().unwrap())
                .min()
                .unwrap()
                * Q::from_integer(step)
        }
    };
    if bound <= Q::from_integer(0) {
        return Err(CliError::Parse(format!("bound must be positive, got {bound}")));
    }
    let aq = match pick(o.prec, r.params.prec) {
        Auto::Auto => analytic_quotient_auto(spec, lattice, bound)?,
        Auto::Value(n) => analytic_quotient(spec, lattice, bound, n)?,
    };
    let en = &aq.exponential.lattice;
    let listed = !en.points.is_empty();
    let report = json!({
        "bound": q_str(bound),
        "precision": aq.precision,
        "dimension": en.dimension(),
        "enumeration_degree": en.degree,
        "cancellation": en.cancellation,
        "basis": en.basis.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "points": if listed { json!(en.points.iter().map(|b| b.to_string()).collect::<Vec<_>>()) } else { Value::Null },
        "e": poly_json(&aq.exponential.e),
        "phi_t": poly_json(&aq.phi_t),
        "phi_degree": aq.phi_t.degree(),
        "residual_valuation": opt_q(aq.residual_valuation),
        "residual_is_bound": aq.residual_is_bound,
    });
    let checks = if verify {
        Some(uniformize_checks(spec, &aq)?)
    } else {
        None
    };
    let residual = match (aq.residual_valuation, aq.residual_is_bound) {
        (None, _) => "exact".to_string(),
        (Some(v), true) => format!("≥ {v}"),
        (Some(v), false) => v.to_string(),
    };
    Ok(Outcome {
        report,
        summary: format!(
            "dim M_B = {} at B = {bound}, φ_t of τ-degree {}, residual valuation {residual}",
            en.dimension(),
            aq.phi_t.degree().unwrap_or(0)
        ),
        checks,
    })
}

pub fn tate_ranks(r: &Resolved) -> Result<Outcome, CliError> {
    let rank_m = r.lattice.as_ref().map_or(0, |l| l.declared_rank());
    let table = tate_rank_table(&r.spec, rank_m);
    let summary = format!(
        "rank {} at the residual prime, {} elsewhere",
        table.rank_at_pres, table.rank_elsewhere
    );
    Ok(Outcome {
        report: to_json(&table),
        summary,
        checks: None,
    })
}
