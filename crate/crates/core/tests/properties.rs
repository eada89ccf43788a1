//! Invariants of the public API under random inputs.

use ifl_core::catalog;
use ifl_core::field::{ExtensionPolicy, SampledField};
use ifl_core::heat1d::Kernel1D;
use ifl_core::operator::{ifl_bracket, uniform_bound_constant};
use ifl_core::scheme::{SchemeState, Stepper};
use ifl_core::{check_order, cs_constant, GridSpec, OperatorConfig, SchemeConfig, ScalarField};
use proptest::prelude::*;
use std::sync::OnceLock;

fn small_scheme(s: f64, far: f64) -> SchemeConfig {
    let grid = GridSpec::cube(2, -3.0, 3.0, 12).unwrap();
    let op = OperatorConfig::new(s, 0.4, 2, grid.diameter()).unwrap().with_directions(16).unwrap();
    SchemeConfig::new(op, grid, far, 0.1).unwrap()
}

fn sampled(cfg: &SchemeConfig, values: Vec<f64>, far: f64) -> SampledField {
    SampledField::new(cfg.grid.clone(), values, ExtensionPolicy::ConstantFarField(far)).unwrap()
}

fn kernel() -> &'static Kernel1D {
    static K: OnceLock<Kernel1D> = OnceLock::new();
    K.get_or_init(|| Kernel1D::with_defaults(0.75).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn order_validation(s in -1.0f64..2.0) {
        let inside = s > 0.5 && s < 1.0;
        prop_assert_eq!(check_order(s).is_ok(), inside);
        if inside {
            prop_assert!(cs_constant(s).unwrap() > 0.0);
            prop_assert!(uniform_bound_constant(s).unwrap().is_finite());
        }
    }

    #[test]
    fn bracket_is_ordered(s in 0.55f64..0.95, x0 in -1.5f64..1.5, x1 in -1.5f64..1.5) {
        let f = catalog::tilted_bump(2);
        let cfg = OperatorConfig::new(s, 0.1, 2, 8.0).unwrap().with_directions(32).unwrap();
        let (lo, mid, hi) = ifl_bracket(&f, &[x0, x1], &cfg).unwrap();
        prop_assert!(lo <= mid + 1e-8 && mid <= hi + 1e-8, "{lo} {mid} {hi}");
    }

    #[test]
    fn kernel_is_even_positive_and_self_similar(x in -30.0f64..30.0, t in 0.05f64..4.0) {
        let k = kernel();
        let p = k.eval(x, t).unwrap();
        prop_assert!(p > 0.0);
        prop_assert_eq!(p, k.eval(-x, t).unwrap());
        let scale = t.powf(-1.0 / 1.5);
        let expected = scale * k.profile(x.abs() * scale);
        prop_assert!((p - expected).abs() <= 1e-12 * expected.max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn one_step_preserves_order_and_contracts(
        seed_values in prop::collection::vec(-1.0f64..1.0, 144),
        bumps in prop::collection::vec(0.0f64..0.5, 144),
        s in 0.55f64..0.95,
    ) {
        let cfg = small_scheme(s, 0.0);
        let stepper = Stepper::new(&cfg).unwrap();
        let u = sampled(&cfg, seed_values.clone(), 0.0);
        let v = sampled(&cfg, seed_values.iter().zip(&bumps).map(|(a, b)| a + b).collect(), 0.0);
        let u1 = stepper.step(&SchemeState::from_sampled(u, &cfg).unwrap()).unwrap().u;
        let v1 = stepper.step(&SchemeState::from_sampled(v, &cfg).unwrap()).unwrap().u;
        let gap0 = bumps.iter().cloned().fold(0.0, f64::max);
        for (a, b) in u1.values().iter().zip(v1.values()) {
            prop_assert!(a <= &(b + 1e-12), "comparison: {a} > {b}");
            prop_assert!(b - a <= gap0 + 1e-12, "contraction: {} > {gap0}", b - a);
        }
        let max0 = seed_values.iter().cloned().fold(0.0, f64::max);
        let min0 = seed_values.iter().cloned().fold(0.0, f64::min);
        for a in u1.values() {
            prop_assert!(*a <= max0 + 1e-12 && *a >= min0 - 1e-12);
        }
    }

    #[test]
    fn constants_are_steady(c in -5.0f64..5.0) {
        let cfg = small_scheme(0.75, c);
        let stepper = Stepper::new(&cfg).unwrap();
        let u = sampled(&cfg, vec![c; 144], c);
        let u1 = stepper.step(&SchemeState::from_sampled(u, &cfg).unwrap()).unwrap().u;
        prop_assert!(u1.values().iter().all(|v| (v - c).abs() <= 1e-12 * (1.0 + c.abs())));
    }
}

#[test]
fn sampled_datum_round_trips_through_the_field_api() {
    let cfg = small_scheme(0.75, 0.0);
    let u0 = catalog::datum("gaussian", 2, &Default::default()).unwrap();
    let s = ScalarField::sample(&u0, cfg.grid.clone(), ExtensionPolicy::ConstantFarField(0.0)).unwrap();
    let node = cfg.grid.node(&[5, 7]);
    assert_eq!(s.eval(&node), u0.eval(&node));
}
