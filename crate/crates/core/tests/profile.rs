mod common;

use common::{left_blowdown_spec, reference_spec};
use quasi_einstein::closed_form::RootBranch;
use quasi_einstein::metric::{arclength_consistency, t_at_nodes};
use quasi_einstein::quadrature::QuadConfig;
use quasi_einstein::solver::{chebyshev_nodes, AlphaProfile};
use quasi_einstein::verify::{residual_25, residual_26, ProfileSample};
use quasi_einstein::{
    reconstruct_t, solve, verify, BundleSpec, ClosedForm, EndpointType, Error, FactorSpec, SolverConfig,
};

fn right_blowdown_spec() -> BundleSpec {
    BundleSpec::new(
        vec![FactorSpec::new(1, 3, 1), FactorSpec::new(1, 2, 1)],
        2.0,
        EndpointType::SmoothCollapse,
        EndpointType::Blowdown,
    )
}

fn both_blowdown_spec() -> BundleSpec {
    BundleSpec::new(
        vec![FactorSpec::new(1, 2, 1), FactorSpec::new(1, 3, 1), FactorSpec::new(1, 2, 1)],
        2.0,
        EndpointType::Blowdown,
        EndpointType::Blowdown,
    )
}

#[test]
fn t_behaves_like_sqrt_2s_near_zero() {
    let solved = solve(&reference_spec(2.0), &SolverConfig::default()).unwrap();
    let (t, _) = t_at_nodes(&solved, &[0.0, 1e-8]).unwrap();
    assert_eq!(t[0], 0.0);
    let ratio = t[1] / (2e-8f64).sqrt();
    assert!((0.99..=1.01).contains(&ratio), "{ratio}");
}

#[test]
fn t_is_strictly_increasing_and_ends_at_l() {
    for spec in [reference_spec(2.0), left_blowdown_spec(2.0), right_blowdown_spec()] {
        let solved = solve(&spec, &SolverConfig::default()).unwrap();
        let metric = reconstruct_t(&solved, 65).unwrap();
        assert!(metric.samples.windows(2).all(|w| w[0].t < w[1].t));
        assert_eq!(metric.samples[0].t, 0.0);
        let last = metric.samples.last().unwrap();
        assert!((last.t - metric.total_length_l).abs() < 1e-12 * metric.total_length_l);
        assert!(metric.total_length_l.is_finite() && metric.total_length_l > 0.0);
        for s in &metric.samples {
            assert!((s.u + spec.m * s.v.ln()).abs() < 1e-12 * s.u.abs().max(1.0));
        }
    }
}

#[test]
fn ds_dt_recovers_f() {
    let solved = solve(&reference_spec(2.0), &SolverConfig::default()).unwrap();
    let gap = arclength_consistency(&solved, 32).unwrap();
    assert!(gap < 1e-6, "{gap}");
}

#[test]
fn halving_quadrature_tolerance_is_self_consistent() {
    let solved = solve(&reference_spec(2.0), &SolverConfig::default()).unwrap();
    let closed = solved.closed().clone();
    let tol = 1e-10;
    let coarse = AlphaProfile::new(closed.clone(), QuadConfig::with_rel_tol(tol));
    let fine = AlphaProfile::new(closed, QuadConfig::with_rel_tol(tol / 2.0));
    for s in chebyshev_nodes(0.01, 3.99, 64) {
        let (a, b) = (coarse.alpha(s).unwrap(), fine.alpha(s).unwrap());
        assert!((a - b).abs() < tol * a.abs().max(1.0), "s = {s}: {a} vs {b}");
    }
}

#[test]
fn collapse_profile_is_positive_inside() {
    let solved = solve(&reference_spec(2.0), &SolverConfig::default()).unwrap();
    assert_eq!(solved.profile.alpha(0.0).unwrap(), 0.0);
    for s in chebyshev_nodes(1e-6, 4.0 - 1e-6, 200) {
        assert!(solved.profile.alpha(s).unwrap() > 0.0);
    }
    assert!(solved.profile.alpha_at_end().unwrap().0.abs() < 1e-10);
}

#[test]
fn positive_root_profile_fails_positivity() {
    let solved = solve(&reference_spec(2.0), &SolverConfig::default()).unwrap();
    let cfg = SolverConfig {
        branches: vec![RootBranch::Positive],
        ..SolverConfig::default()
    };
    let closed = ClosedForm::from_kappa0(reference_spec(2.0), solved.kappa0(), 1.0, &cfg.branches).unwrap();
    assert!(closed.params.a[0] > 0.0);
    let wrong = quasi_einstein::SolvedProfile::from_closed_form(closed, cfg);
    let report = verify(&wrong, 64, 1e-3).unwrap();
    assert!(!report.positivity_ok);
    assert!(!report.certified);
}

#[test]
fn residual_difference_is_alpha_times_ansatz() {
    let solved = solve(&left_blowdown_spec(2.0), &SolverConfig::default()).unwrap();
    let report = verify(&solved, 64, 1e-3).unwrap();
    assert!(report.ansatz_split_dev < 1e-12, "{}", report.ansatz_split_dev);
    let spec = solved.spec();
    for s in [0.5, 2.0, 5.0] {
        let x = ProfileSample::at(&solved, s).unwrap();
        assert!((residual_25(&x, spec) - residual_26(&x, spec)).abs() < 1e-12);
    }
}

#[test]
fn blowdown_end_slope_is_two() {
    let solved = solve(&left_blowdown_spec(2.0), &SolverConfig::default()).unwrap();
    assert!((solved.profile.left_slope().unwrap() - 2.0).abs() < 1e-6);
    assert!((solved.profile.right_slope().unwrap() + 2.0).abs() < 1e-6);
}

#[test]
fn right_and_double_blowdowns_certify() {
    let rb = solve(&right_blowdown_spec(), &SolverConfig::default()).unwrap();
    let b = rb.closed().beta(1, rb.s_star());
    assert_eq!(b.value, 0.0);
    assert!((b.prime + 1.0).abs() < 1e-12);
    assert!(verify(&rb, 256, 1e-3).unwrap().certified);

    let bb = solve(&both_blowdown_spec(), &SolverConfig::default()).unwrap();
    assert!((bb.s_star() - 8.0).abs() < 1e-12);
    let report = verify(&bb, 256, 1e-3).unwrap();
    assert!(report.certified, "{:?}", report.failed_checks());
}

#[test]
fn single_blown_down_factor_has_no_root() {
    let spec = BundleSpec::new(
        vec![FactorSpec::new(1, 2, 1)],
        2.0,
        EndpointType::Blowdown,
        EndpointType::SmoothCollapse,
    );
    assert!(matches!(
        solve(&spec, &SolverConfig::default()),
        Err(Error::NoSignChange { .. })
    ));
}

#[test]
fn narrow_bracket_reports_the_scan() {
    let cfg = SolverConfig {
        bracket: (0.1, 1.0),
        scan_points: 8,
        ..SolverConfig::default()
    };
    match solve(&reference_spec(2.0), &cfg) {
        Err(Error::NoSignChange { scan, .. }) => {
            assert_eq!(scan.len(), 8);
            assert!(scan.iter().all(|p| p.defect.unwrap() < 0.0));
        }
        other => panic!("{other:?}"),
    }
}
