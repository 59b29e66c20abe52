mod common;

use common::*;
use quasi_einstein::closed_form::ClosedForm;
use quasi_einstein::quadrature::QuadConfig;
use quasi_einstein::solver::{boundary_defect, scan_grid, AlphaProfile};
use quasi_einstein::{solve, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn frozen_reference_root() {
    let solved = solve(&reference_spec(2.0), &SolverConfig::default()).unwrap();
    assert!(
        (solved.kappa0() - KAPPA0_REFERENCE_M2).abs() < 1e-10,
        "{} vs {}",
        solved.kappa0(),
        KAPPA0_REFERENCE_M2
    );
    assert_eq!(solved.roots.len(), 1);
}

#[test]
fn frozen_left_blowdown_root() {
    let solved = solve(&left_blowdown_spec(2.0), &SolverConfig::default()).unwrap();
    assert!((solved.kappa0() - KAPPA0_LEFT_BLOWDOWN_M2).abs() < 1e-10);
}

#[test]
fn frozen_roots_across_m() {
    for (m, k0) in KAPPA0_REFERENCE_SWEEP {
        let solved = solve(&reference_spec(m), &SolverConfig::default()).unwrap();
        assert!((solved.kappa0() - k0).abs() < 1e-10 * k0.max(1.0), "m = {m}");
    }
    for (m, k0) in KAPPA0_LEFT_BLOWDOWN_SWEEP {
        let solved = solve(&left_blowdown_spec(m), &SolverConfig::default()).unwrap();
        assert!((solved.kappa0() - k0).abs() < 1e-10 * k0.max(1.0), "m = {m}");
    }
}

#[test]
fn double_precision_simpson_reproduces_frozen_roots() {
    let k0 = simpson_root(&reference_spec(2.0), 5.0, 12.0);
    assert!((k0 - KAPPA0_REFERENCE_M2).abs() < 1e-10, "{k0}");
    let k0 = simpson_root(&left_blowdown_spec(2.0), 15.0, 30.0);
    assert!((k0 - KAPPA0_LEFT_BLOWDOWN_M2).abs() < 1e-10, "{k0}");
}

#[test]
fn defect_matches_simpson_over_scan_grid() {
    let cfg = SolverConfig::default();
    for spec in [reference_spec(2.0), left_blowdown_spec(2.0), reference_spec(4.0)] {
        for k0 in scan_grid(&cfg) {
            let Ok(d) = boundary_defect(k0, &spec, &cfg) else {
                continue;
            };
            let (simpson, l1) = simpson_defect(k0, &spec);
            assert!(
                (d.value - simpson).abs() <= 1e-9 * l1,
                "kappa0 = {k0}: {} vs {simpson} (l1 {l1})",
                d.value
            );
        }
    }
}

#[test]
fn alpha_matches_exact_antiderivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in [2.0, 3.0, 4.0] {
        for spec in [reference_spec(m), left_blowdown_spec(m)] {
            let k0 = solve(&spec, &SolverConfig::default()).unwrap().kappa0();
            let closed = ClosedForm::from_kappa0(spec.clone(), k0, 1.0, &[]).unwrap();
            let s_star = closed.s_star();
            let profile = AlphaProfile::new(closed, QuadConfig::default());
            for _ in 0..20 {
                let s = rng.gen_range(0.01..0.99) * s_star;
                let exact = exact_alpha(k0, &spec, s);
                let got = profile.alpha(s).unwrap();
                assert!(
                    ((got - exact) / exact).abs() < 1e-10,
                    "m = {m}, s = {s}: {got} vs {exact}"
                );
            }
        }
    }
}

#[test]
fn independent_setup_agrees_with_closed_form() {
    for spec in [reference_spec(2.0), left_blowdown_spec(2.0)] {
        for k0 in [0.3, 2.0, 17.0] {
            let (e, s_star, a) = setup(k0, &spec);
            let cf = ClosedForm::from_kappa0(spec.clone(), k0, 1.0, &[]).unwrap();
            assert!((cf.params.energy - e).abs() < 1e-12 * e);
            assert!((cf.params.s_star - s_star).abs() < 1e-12 * s_star);
            for (x, y) in cf.params.a.iter().zip(&a) {
                assert!((x - y).abs() < 1e-12 * y.abs());
            }
        }
    }
}
