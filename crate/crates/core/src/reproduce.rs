//! Closed-form reproduction tables: interval length without blowdowns, the
//! two-blowdown interval formula, and the blowdown normalisation at `s = 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closed_form::{endpoint_quadratic_roots, energy_from_kappa0, energy_identity, kappa0_and_sstar, SolutionParams};
use crate::spec::{BundleSpec, EndpointType, FactorSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    NoBlowdownLength,
    IntervalFormula,
    BlowdownConsistency,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::NoBlowdownLength, Case::IntervalFormula, Case::BlowdownConsistency];

    pub fn name(self) -> &'static str {
        match self {
            Case::NoBlowdownLength => "no-blowdown-length",
            Case::IntervalFormula => "hall-interval-formula",
            Case::BlowdownConsistency => "blowdown-consistency",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Case::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown case {s:?}; expected one of no-blowdown-length, hall-interval-formula, blowdown-consistency"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub expected: f64,
    pub computed: f64,
    /// Absolute or relative error, as stated by `relative`.
    pub error: f64,
    pub relative: bool,
    pub tolerance: f64,
    pub pass: bool,
}

impl Row {
    fn absolute(label: String, expected: f64, computed: f64, tolerance: f64) -> Self {
        let error = (computed - expected).abs();
        Self {
            label,
            expected,
            computed,
            error,
            relative: false,
            tolerance,
            pass: error < tolerance,
        }
    }

    fn relative(label: String, expected: f64, computed: f64, tolerance: f64) -> Self {
        let error = (computed - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        Self {
            label,
            expected,
            computed,
            error,
            relative: true,
            tolerance,
            pass: error < tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub case: Case,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case: {}", self.case)?;
        writeln!(
            f,
            "{:<40} {:>24} {:>24} {:>10} {:>8} {:>4}",
            "row", "expected", "computed", "error", "tol", "ok"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<40} {:>24.17e} {:>24.17e} {:>10.2e} {:>8.0e} {:>4}",
                r.label,
                r.expected,
                r.computed,
                r.error,
                r.tolerance,
                if r.pass { "PASS" } else { "FAIL" }
            )?;
        }
        let passed = self.rows.iter().filter(|r| r.pass).count();
        writeln!(f, "{passed}/{} rows pass", self.rows.len())
    }
}

pub const ENERGY_SWEEP: [f64; 4] = [0.1, 1.0, 10.0, 100.0];
pub const KAPPA0_GRID: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
pub const N_GRID: [u32; 3] = [0, 1, 2];

/// Interval length for two blowdowns, as the closed expression
/// `sqrt(k0 (4 (n1 + 1) + k0) + 4 (nr + 1)^2) - k0 + 2 (nr + 1)`.
pub fn literal_interval_length(kappa0: f64, n1: u32, nr: u32) -> f64 {
    let a = 4.0 * (f64::from(n1) + 1.0);
    let b = 2.0 * (f64::from(nr) + 1.0);
    (kappa0 * (a + kappa0) + b * b).sqrt() - kappa0 + b
}

/// The same length from the endpoint quadratics.
pub fn unified_interval_length(kappa0: f64, n1: u32, nr: u32) -> crate::Result<f64> {
    let spec = two_blowdown_spec(n1, nr);
    let energy = energy_from_kappa0(kappa0, &spec);
    Ok(kappa0_and_sstar(energy, &spec)?.1)
}

fn two_blowdown_spec(n1: u32, nr: u32) -> BundleSpec {
    BundleSpec::new(
        vec![FactorSpec::new(n1, n1 + 1, 1), FactorSpec::new(nr, nr + 1, 1)],
        2.0,
        EndpointType::Blowdown,
        EndpointType::Blowdown,
    )
}

fn left_blowdown_spec(n1: u32) -> BundleSpec {
    BundleSpec::new(
        vec![FactorSpec::new(n1, n1 + 1, 1), FactorSpec::new(1, 3, 1)],
        2.0,
        EndpointType::Blowdown,
        EndpointType::SmoothCollapse,
    )
}

fn no_blowdown_length() -> Vec<Row> {
    let spec = BundleSpec::collapse(vec![FactorSpec::new(1, 2, 1)], 2.0);
    let mut rows = Vec::new();
    for e in ENERGY_SWEEP {
        let computed = kappa0_and_sstar(e, &spec).map_or(f64::NAN, |(_, s)| s);
        rows.push(Row::absolute(format!("s_* at E = {e}"), 4.0, computed, 1e-12));
    }
    rows
}

fn interval_formula_rows() -> Vec<Row> {
    let mut rows = Vec::new();
    for k0 in KAPPA0_GRID {
        for n1 in N_GRID {
            for nr in N_GRID {
                let computed = unified_interval_length(k0, n1, nr).unwrap_or(f64::NAN);
                rows.push(Row::relative(
                    format!("s_* at k0 = {k0}, n1 = {n1}, nr = {nr}"),
                    literal_interval_length(k0, n1, nr),
                    computed,
                    1e-12,
                ));
            }
        }
    }
    rows
}

fn blowdown_consistency() -> Vec<Row> {
    let mut rows = Vec::new();
    for k0 in KAPPA0_GRID {
        for n1 in N_GRID {
            let spec = left_blowdown_spec(n1);
            let params = match SolutionParams::from_kappa0(k0, 1.0, &spec, &[]) {
                Ok(p) => p,
                Err(_) => {
                    rows.push(Row::absolute(format!("k0 = {k0}, n1 = {n1}: params"), 0.0, f64::NAN, 0.0));
                    continue;
                }
            };
            let a1 = params.a[0];
            let p1 = f64::from(spec.factors[0].p);
            let eps = spec.epsilon;
            rows.push(Row::relative(
                format!("A_1 at k0 = {k0}, n1 = {n1}"),
                1.0 / (2.0 * k0),
                a1,
                1e-14,
            ));
            // E-identity solved for q^2 with A_1 and p_1 = n1 + 1 fixed.
            let q2 = (8.0 * a1 * p1 - 8.0 * a1 * a1 * params.energy) / eps;
            rows.push(Row::absolute(format!("q_1^2 forced at k0 = {k0}, n1 = {n1}"), 1.0, q2, 1e-12));
            let expected_e = 0.5 * k0 * (4.0 * (f64::from(n1) + 1.0) + k0);
            rows.push(Row::relative(
                format!("E round trip at k0 = {k0}, n1 = {n1}"),
                expected_e,
                energy_identity(a1, p1, 1.0, eps),
                1e-12,
            ));
        }
    }
    let e = energy_from_kappa0(2.0, &left_blowdown_spec(0));
    rows.push(Row::absolute("E at k0 = 2, n1 = 0".into(), 6.0, e, 1e-15));
    let root = endpoint_quadratic_roots(e, 0).map_or(f64::NAN, |r| r.large);
    rows.push(Row::absolute("large root at E = 6, n = 0".into(), 2.0, root, 1e-14));
    rows
}

pub fn run(case: Case) -> Table {
    let rows = match case {
        Case::NoBlowdownLength => no_blowdown_length(),
        Case::IntervalFormula => interval_formula_rows(),
        Case::BlowdownConsistency => blowdown_consistency(),
    };
    Table { case, rows }
}
