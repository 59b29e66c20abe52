//! Write the solution JSON, profile CSV and SVG plot into a directory.
//!
//! Usage: cargo run --example profile_export -- [out_dir]

use std::fs;
use std::path::PathBuf;

use quasi_einstein::export::{profile_rows, render_svg, write_csv};
use quasi_einstein::{solve, verify, BundleSpec, FactorSpec, SolutionFile, SolverConfig};

fn main() -> anyhow::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "profile_out".into()));
    fs::create_dir_all(&dir)?;

    let spec = BundleSpec::collapse(vec![FactorSpec::new(2, 3, 1)], 2.0);
    let solved = solve(&spec, &SolverConfig::default())?;
    fs::write(dir.join("sol.json"), SolutionFile::from_profile(&solved).to_json())?;

    let (rows, metric) = profile_rows(&solved, 257)?;
    write_csv(fs::File::create(dir.join("profile.csv"))?, spec.rank(), &rows)?;
    let report = verify(&solved, 128, 1e-3)?;
    fs::write(dir.join("profile.svg"), render_svg(&solved, &rows, &report))?;

    println!("total length l = {:.15}", metric.total_length_l);
    println!("wrote {}", dir.display());
    Ok(())
}
