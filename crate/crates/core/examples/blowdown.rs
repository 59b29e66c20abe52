//! Blow-down endpoints: one on the left, one on the right, and both.

use quasi_einstein::{solve, verify, BundleSpec, EndpointType, FactorSpec, SolverConfig};

fn main() -> anyhow::Result<()> {
    use EndpointType::{Blowdown, SmoothCollapse};
    let cases = [
        ("left", BundleSpec::new(vec![FactorSpec::new(1, 2, 1), FactorSpec::new(1, 3, 1)], 2.0, Blowdown, SmoothCollapse)),
        ("right", BundleSpec::new(vec![FactorSpec::new(1, 3, 1), FactorSpec::new(1, 2, 1)], 2.0, SmoothCollapse, Blowdown)),
        (
            "both",
            BundleSpec::new(
                vec![FactorSpec::new(1, 2, 1), FactorSpec::new(1, 3, 1), FactorSpec::new(1, 2, 1)],
                2.0,
                Blowdown,
                Blowdown,
            ),
        ),
    ];
    for (name, spec) in &cases {
        let solved = solve(spec, &SolverConfig::default())?;
        let report = verify(&solved, 256, 1e-3)?;
        println!(
            "{name:>5}: kappa0 = {:.15}, s_* = {:.15}, A = {:?}, certified = {}",
            solved.kappa0(),
            solved.s_star(),
            solved.closed().params.a,
            report.certified
        );
    }
    Ok(())
}
