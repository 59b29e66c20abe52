//! kappa0 as a function of m for the CP^2 instance.

use quasi_einstein::{solve, BundleSpec, FactorSpec, SolverConfig};

fn main() -> anyhow::Result<()> {
    println!("{:>6} {:>22} {:>22}", "m", "kappa0", "E");
    for m in [1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 32.0] {
        let spec = BundleSpec::collapse(vec![FactorSpec::new(2, 3, 1)], m);
        let solved = solve(&spec, &SolverConfig::default())?;
        println!("{m:>6} {:>22.15} {:>22.15}", solved.kappa0(), solved.closed().params.energy);
    }
    Ok(())
}
