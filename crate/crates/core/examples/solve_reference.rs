//! Solve the single-factor CP^2 instance and print the closed-form data.

use quasi_einstein::{solve, BundleSpec, FactorSpec, SolverConfig};

fn main() -> anyhow::Result<()> {
    let spec = BundleSpec::collapse(vec![FactorSpec::new(2, 3, 1)], 2.0);
    let solved = solve(&spec, &SolverConfig::default())?;
    let p = &solved.closed().params;
    println!("kappa0 = {:.17e}", solved.kappa0());
    println!("E      = {:.17e}", p.energy);
    println!("mu     = {:.17e}", p.mu);
    println!("s_*    = {:.17e}", solved.s_star());
    println!("A_1    = {:.17e}", p.a[0]);
    println!("defect = {:.3e}", solved.defect_at_root);
    for s in [0.5, 1.0, 2.0, 3.0, 3.5] {
        println!("alpha({s}) = {:.12}", solved.profile.alpha(s)?);
    }
    Ok(())
}
