//! Residual certification of a solved profile.

use quasi_einstein::{solve, verify, verify_t_system, BundleSpec, FactorSpec, SolverConfig};

fn main() -> anyhow::Result<()> {
    let spec = BundleSpec::collapse(vec![FactorSpec::new(2, 3, 1)], 2.0);
    let solved = solve(&spec, &SolverConfig::default())?;
    let report = verify(&solved, 512, 1e-3)?;
    for c in &report.checks {
        println!("{} {:<28} {:.3e} (tol {:.0e})", if c.pass { "ok  " } else { "FAIL" }, c.name, c.value, c.tolerance);
    }
    println!("t-system residual: {:.3e}", verify_t_system(&solved, 512)?);
    println!("certified: {}", report.certified);
    Ok(())
}
