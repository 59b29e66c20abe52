mod common;

use common::reference_spec;
use proptest::prelude::*;
use quasi_einstein::closed_form::{energy_from_kappa0, kappa0_and_sstar, ClosedForm};
use quasi_einstein::solver::boundary_defect;
use quasi_einstein::verify::{mu_of_s, residual_25, residual_26, residual_27, ProfileSample};
use quasi_einstein::{solve, validate_spec, BundleSpec, EndpointType, FactorSpec, SolverConfig};

fn factor() -> impl Strategy<Value = FactorSpec> {
    (1u32..4, 1u32..6, -4i64..5).prop_map(|(n, p, q)| FactorSpec::new(n, p, q))
}

fn endpoint() -> impl Strategy<Value = EndpointType> {
    prop_oneof![Just(EndpointType::SmoothCollapse), Just(EndpointType::Blowdown)]
}

fn any_spec() -> impl Strategy<Value = BundleSpec> {
    (prop::collection::vec(factor(), 0..4), 0.5f64..40.0, endpoint(), endpoint())
        .prop_map(|(f, m, l, r)| BundleSpec::new(f, m, l, r))
}

/// Single-factor collapse specs with `0 < |q| < p`.
fn collapse_spec() -> impl Strategy<Value = BundleSpec> {
    (1u32..4, 2u32..6, 1.2f64..10.0).prop_flat_map(|(n, p, m)| {
        (1i64..i64::from(p)).prop_map(move |q| BundleSpec::collapse(vec![FactorSpec::new(n, p, q)], m))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn validation_is_deterministic(spec in any_spec()) {
        prop_assert_eq!(validate_spec(&spec), validate_spec(&spec.clone()));
    }

    #[test]
    fn validation_ignores_the_sign_of_q(spec in any_spec()) {
        let mut flipped = spec.clone();
        for f in &mut flipped.factors {
            f.q = -f.q;
        }
        prop_assert_eq!(validate_spec(&spec).is_valid(), validate_spec(&flipped).is_valid());
    }

    #[test]
    fn collapse_interval_is_four(energy in 1e-3f64..1e4) {
        let (k0, s) = kappa0_and_sstar(energy, &reference_spec(2.0)).unwrap();
        prop_assert!(k0 > 0.0);
        prop_assert!((s - 4.0).abs() < 1e-12);
    }

    #[test]
    fn energy_increases_with_kappa0(k0 in 1e-3f64..1e3, dk in 1e-6f64..1.0) {
        let spec = reference_spec(2.0);
        prop_assert!(energy_from_kappa0(k0 + dk, &spec) > energy_from_kappa0(k0, &spec));
    }

    #[test]
    fn endpoints_are_quadratic_roots(spec in collapse_spec(), k0 in 1e-2f64..1e3) {
        let cf = ClosedForm::from_kappa0(spec, k0, 1.0, &[]).unwrap();
        let (l, r) = cf.endpoint_residuals();
        let scale = 1f64.max(cf.params.energy);
        prop_assert!(l.abs() < 1e-12 * scale && r.abs() < 1e-12 * scale, "{} {}", l, r);
    }

    #[test]
    fn ansatz_holds_pointwise(spec in collapse_spec(), k0 in 1e-2f64..1e3, t in 0.0f64..1.0) {
        let cf = ClosedForm::from_kappa0(spec, k0, 1.0, &[]).unwrap();
        let s = t * cf.s_star();
        prop_assert!(cf.ansatz_residual(0, s).abs() < 1e-12);
    }

    #[test]
    fn defect_ignores_kappa1(k0 in 0.1f64..50.0, c in 0.1f64..10.0) {
        let spec = reference_spec(2.0);
        let base = boundary_defect(k0, &spec, &SolverConfig::default()).unwrap();
        let cfg = SolverConfig { kappa1: c, ..SolverConfig::default() };
        prop_assert_eq!(base.value, boundary_defect(k0, &spec, &cfg).unwrap().value);
    }

    #[test]
    fn defect_is_continuous(k0 in 0.1f64..100.0) {
        let spec = reference_spec(2.0);
        let cfg = SolverConfig::default();
        let a = boundary_defect(k0, &spec, &cfg).unwrap();
        let b = boundary_defect(k0 * (1.0 + 1e-10), &spec, &cfg).unwrap();
        prop_assert!((a.scaled() - b.scaled()).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solved_collapse_profiles_certify_endpoints(spec in collapse_spec()) {
        let solved = solve(&spec, &SolverConfig::default()).unwrap();
        prop_assert!((solved.s_star() - 4.0).abs() < 1e-12);
        prop_assert!(solved.defect_at_root.abs() < 1e-12);
        prop_assert!((solved.profile.left_slope().unwrap() - 2.0).abs() < 1e-6);
        prop_assert!((solved.profile.right_slope().unwrap() + 2.0).abs() < 1e-6);
    }

    #[test]
    fn kappa1_scales_mu_quadratically(c in 0.1f64..10.0, t in 0.05f64..0.95) {
        let base = solve(&reference_spec(2.0), &SolverConfig::default()).unwrap();
        let scaled = solve(&reference_spec(2.0), &SolverConfig { kappa1: c, ..SolverConfig::default() }).unwrap();
        prop_assert_eq!(base.kappa0(), scaled.kappa0());
        prop_assert_eq!(base.s_star(), scaled.s_star());
        prop_assert_eq!(&base.closed().params.a, &scaled.closed().params.a);
        let s = t * base.s_star();
        let spec = base.spec();
        let mu0 = mu_of_s(&ProfileSample::at(&base, s).unwrap(), spec);
        let mu1 = mu_of_s(&ProfileSample::at(&scaled, s).unwrap(), spec);
        prop_assert!((mu1 - c * c * mu0).abs() < 1e-10 * mu1.abs().max(1.0));
        prop_assert!((scaled.closed().params.mu - c * c * base.closed().params.mu).abs() < 1e-10 * mu1.abs().max(1.0));
    }

    #[test]
    fn residuals_ignore_the_sign_of_q(t in 0.05f64..0.95) {
        let plus = solve(&reference_spec(2.0), &SolverConfig::default()).unwrap();
        let minus_spec = BundleSpec::collapse(vec![FactorSpec::new(2, 3, -1)], 2.0);
        let minus = solve(&minus_spec, &SolverConfig::default()).unwrap();
        prop_assert_eq!(plus.kappa0(), minus.kappa0());
        let s = t * plus.s_star();
        let a = ProfileSample::at(&plus, s).unwrap();
        let b = ProfileSample::at(&minus, s).unwrap();
        prop_assert_eq!(residual_25(&a, plus.spec()), residual_25(&b, &minus_spec));
        prop_assert_eq!(residual_26(&a, plus.spec()), residual_26(&b, &minus_spec));
        prop_assert_eq!(residual_27(&a, 0, plus.spec()), residual_27(&b, 0, &minus_spec));
    }
}
