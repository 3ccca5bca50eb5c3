//! Property tests for the lattice pipeline and the uniformizer.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use drinfeld_core::drinfeld::DrinfeldModuleSpec;
use drinfeld_core::filtration::decompose;
use drinfeld_core::kummer::{build_mbar, inertia_report, skew_echelon, ChiMap, LatticeSpec};
use drinfeld_core::laurent::Q;
use drinfeld_core::ore::TwistAction;
use drinfeld_core::uniformizer::analytic_quotient;

use common::*;

fn setup(seed: u64) -> (DrinfeldModuleSpec, LatticeSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = [2, 3][rng.gen_range(0..2)];
    let d = rng.gen_range(1..=2);
    let r = rng.gen_range(1..=2);
    let k = random_field(&mut rng, p, d);
    let spec = random_module(&mut rng, &k, r);
    let n = rng.gen_range(1..=3);
    let gens = (0..n)
        .map(|_| {
            let pole = rng.gen_range(1..=5);
            random_pole(&mut rng, &k, pole, 0)
        })
        .collect();
    (spec, LatticeSpec::new(gens, None, 2).unwrap())
}

fn rank_and_conductor(chi: &ChiMap, lattice: &LatticeSpec) -> (usize, u64) {
    let e = skew_echelon(&build_mbar(chi, lattice).unwrap());
    (e.rank(), e.pivots().iter().copied().max().unwrap_or(0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dropping_a_generator_never_helps(seed in any::<u64>()) {
        let (spec, lattice) = setup(seed);
        let chi = ChiMap::auto(&spec, lattice.max_abs_valuation()).unwrap();
        let (rank, conductor) = rank_and_conductor(&chi, &lattice);
        for i in 0..lattice.generators().len() {
            let (r2, c2) = rank_and_conductor(&chi, &lattice.without(i));
            prop_assert!(r2 <= rank && c2 <= conductor);
        }
    }

    #[test]
    fn report_invariants(seed in any::<u64>()) {
        let (spec, lattice) = setup(seed);
        // Random generators may be A-dependent; the report then refuses.
        let Ok(rep) = inertia_report(&spec, &lattice) else { return Ok(()); };
        let p = spec.field().characteristic();
        prop_assert!(rep.bounds.j_set.len() <= rep.rank_r && rep.rank_r <= rep.declared_rank);
        prop_assert_eq!(rep.s.len(), rep.rank_r);
        for m in lattice.generators() {
            let v = -m.valuation().unwrap();
            let i = v.to_integer() as u64;
            if v.is_integer() && !i.is_multiple_of(p) {
                prop_assert!(rep.s.contains(&i));
            }
            let chi = ChiMap::auto(&spec, v).unwrap();
            let c = chi.inverse_class(m).unwrap();
            prop_assert_eq!(c.j_invariant().unwrap(), decompose(m).unwrap().j_invariant().unwrap());
        }
        let ranks: Vec<usize> = rep.filtration.iter().map(|s| s.rank).collect();
        prop_assert!(ranks.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(*ranks.last().unwrap(), 0);
        prop_assert_eq!(rep.filtration.last().unwrap().i, rep.conductor + 1);
        if !rep.s.is_empty() {
            prop_assert!(rep.rank_at(rep.conductor) > 0);
        }
        let e = skew_echelon(&rep.mbar);
        prop_assert_eq!(e.replay(&rep.mbar), rep.echelon.clone());
        prop_assert_eq!(e.inverse_replay(rep.mbar.len()), rep.mbar.clone());
    }

    #[test]
    fn exponential_is_additive_with_lattice_kernel(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = [2, 3][rng.gen_range(0..2)];
        let k = random_field(&mut rng, p, 1);
        let r = 1;
        let spec = loop {
            let s = random_module(&mut rng, &k, r);
            if s.psi_t().coeffs().iter().all(|c| c.is_exact()) {
                break s;
            }
        };
        let pole = rng.gen_range(1..=2);
        let lattice = LatticeSpec::new(vec![random_pole(&mut rng, &k, pole, 0)], Some(1), 1).unwrap();
        let bound = Q::from_integer(pole * p as i64);
        let aq = analytic_quotient(&spec, &lattice, bound, 24);
        // A too-coarse precision is reported as an error, not a wrong answer.
        let Ok(aq) = aq else { return Ok(()); };
        let kp = &aq.exponential.kernel_poly;
        for m in &aq.exponential.lattice.points {
            prop_assert!(kp.apply(m).unwrap().is_exact_zero());
        }
        let a = random_pole(&mut rng, &k, 4, 0);
        let b = random_integral(&mut rng, &k, 3, false);
        let lhs = kp.apply(&(&a + &b)).unwrap();
        let rhs = &kp.apply(&a).unwrap() + &kp.apply(&b).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(aq.phi_t.coeff(0), spec.psi_t().coeff(0));
        prop_assert!(aq.residual_valuation.is_none_or(|v| v > Q::from_integer(0)));
    }
}
