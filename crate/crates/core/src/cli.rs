//! Implementation of the `qe` command. Each `run_*` returns the process exit
//! code; diagnostics go to standard error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::export::{profile_rows, render_svg, write_csv, ReportFile, SolutionFile};
use crate::reproduce::{self, Case};
use crate::solver::{solve, SolverConfig};
use crate::spec::{validate_spec, BundleSpec};
use crate::verify::{tol, verify, verify_t_system, Check};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INVALID_SPEC: i32 = 2;
pub const EXIT_NO_ROOT: i32 = 3;
pub const EXIT_NOT_CERTIFIED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "qe", version, about = "Quasi-Einstein profiles on sphere bundles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a spec file against the existence hypotheses.
    Validate { spec: PathBuf },
    /// Locate kappa0 and write the solution.
    Solve {
        spec: PathBuf,
        /// Overrides `m` from the spec file.
        #[arg(long)]
        m: Option<f64>,
        /// Search interval for kappa0 as `lo:hi`.
        #[arg(long, value_parser = parse_bracket, default_value = "0.001:1000")]
        bracket: (f64, f64),
        /// Absolute tolerance on kappa0.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Certify a solution by its residuals.
    Verify {
        solution: PathBuf,
        #[arg(long, default_value_t = 512)]
        grid: usize,
        /// Distance of the grid from the ends, as a fraction of s_*.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Export the sampled metric as CSV and a plot as SVG.
    Profile {
        solution: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 257)]
        grid: usize,
    },
    /// Print a closed-form reproduction table.
    Reproduce { case: Case },
}

pub fn parse_bracket(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {text:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound {lo:?}: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound {hi:?}: {e}"))?;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(format!("need 0 < lo < hi, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INTERNAL } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Validate { spec } => run_validate(&spec),
        Command::Solve {
            spec,
            m,
            bracket,
            tol,
            output,
        } => {
            let config = SolverConfig {
                bracket,
                root_tol: tol,
                ..SolverConfig::default()
            };
            run_solve(&spec, m, &config, output.as_deref())
        }
        Command::Verify {
            solution,
            grid,
            delta,
            output,
        } => run_verify(&solution, grid, delta, output.as_deref()),
        Command::Profile { solution, csv, svg, grid } => run_profile(&solution, csv.as_deref(), svg.as_deref(), grid),
        Command::Reproduce { case } => run_reproduce(case),
    }
}

fn write_output(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn load_spec(path: &Path) -> Result<BundleSpec, i32> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: reading {}: {e}", path.display());
        EXIT_INTERNAL
    })?;
    BundleSpec::from_json_str(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_INVALID_SPEC
    })
}

fn load_solution(path: &Path) -> Result<SolutionFile, i32> {
    if let Err(e) = fs::metadata(path) {
        eprintln!("error: reading {}: {e}", path.display());
        return Err(EXIT_INTERNAL);
    }
    SolutionFile::read(path).map_err(|e| {
        eprintln!("error: {e:#}");
        EXIT_INVALID_SPEC
    })
}

pub fn run_validate(path: &Path) -> i32 {
    let spec = match load_spec(path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let report = validate_spec(&spec);
    if report.is_valid() {
        println!("valid: r = {}, m = {}, left = {:?}, right = {:?}", spec.rank(), spec.m, spec.left, spec.right);
        EXIT_OK
    } else {
        eprint!("{report}");
        EXIT_INVALID_SPEC
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidSpec(_) => EXIT_INVALID_SPEC,
        Error::NoSignChange { .. } => EXIT_NO_ROOT,
        Error::PositivityFailure { .. } | Error::NonPositiveAlpha { .. } => EXIT_NOT_CERTIFIED,
        _ => EXIT_INTERNAL,
    }
}

pub fn run_solve(path: &Path, m: Option<f64>, config: &SolverConfig, output: Option<&Path>) -> i32 {
    let mut spec = match load_spec(path) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if let Some(m) = m {
        spec.m = m;
    }
    match solve(&spec, config) {
        Ok(solved) => {
            let file = SolutionFile::from_profile(&solved);
            eprintln!(
                "kappa0 = {:.17e}, s_* = {:.17e}, E = {:.17e}, {} sign change(s)",
                file.kappa0,
                file.s_star,
                file.energy,
                file.sign_changes.len()
            );
            match write_output(output, &file.to_json()) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: writing solution: {e}");
                    EXIT_INTERNAL
                }
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            match &err {
                Error::InvalidSpec(report) => eprint!("{report}"),
                Error::NoSignChange { scan, .. } => {
                    eprintln!("{:>24} {:>24}  note", "kappa0", "scaled defect");
                    for p in scan {
                        let d = p.defect.map_or("-".to_string(), |d| format!("{d:.6e}"));
                        eprintln!("{:>24.6e} {:>24}  {}", p.kappa0, d, p.note.as_deref().unwrap_or(""));
                    }
                    eprintln!("widen the bracket with --bracket lo:hi");
                }
                _ => {}
            }
            exit_code(&err)
        }
    }
}

pub fn run_verify(path: &Path, grid: usize, delta: f64, output: Option<&Path>) -> i32 {
    let file = match load_solution(path) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let profile = match file.to_profile() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_INVALID_SPEC;
        }
    };
    let report = match verify(&profile, grid, delta) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                Error::InvalidArgument(_) => EXIT_INTERNAL,
                _ => exit_code(&e),
            };
        }
    };
    let t_residual = match verify_t_system(&profile, grid) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: t-system check: {e}");
            return exit_code(&e);
        }
    };
    let t_system = Check {
        name: "t_system".into(),
        value: t_residual,
        tolerance: tol::T_SYSTEM,
        pass: t_residual < tol::T_SYSTEM,
    };
    let certified = report.certified && t_system.pass;
    for c in report.checks.iter().chain(std::iter::once(&t_system)) {
        eprintln!(
            "{:<22} {:>10.3e} < {:<8.0e} {}",
            c.name,
            c.value,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    let out = ReportFile {
        kappa0: file.kappa0,
        s_star: file.s_star,
        grid_size: grid,
        delta,
        report,
        t_system,
        certified,
    };
    if let Err(e) = write_output(output, &out.to_json()) {
        eprintln!("error: writing report: {e}");
        return EXIT_INTERNAL;
    }
    if certified {
        EXIT_OK
    } else {
        EXIT_NOT_CERTIFIED
    }
}

pub fn run_profile(path: &Path, csv: Option<&Path>, svg: Option<&Path>, grid: usize) -> i32 {
    let file = match load_solution(path) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let result = (|| -> anyhow::Result<()> {
        let profile = file.to_profile()?;
        let (rows, _) = profile_rows(&profile, grid)?;
        let rank = profile.spec().rank();
        match csv {
            Some(p) => write_csv(fs::File::create(p)?, rank, &rows)?,
            None => write_csv(std::io::stdout().lock(), rank, &rows)?,
        }
        if let Some(p) = svg {
            let report = verify(&profile, 128, 1e-3)?;
            fs::write(p, render_svg(&profile, &rows, &report))?;
        }
        Ok(())
    })();
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(err) => exit_code(err),
                None => EXIT_INTERNAL,
            }
        }
    }
}

pub fn run_reproduce(case: Case) -> i32 {
    let table = reproduce::run(case);
    print!("{table}");
    if table.all_pass() {
        EXIT_OK
    } else {
        EXIT_NOT_CERTIFIED
    }
}
