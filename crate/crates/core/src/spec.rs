//! Problem statement: base factors, endpoint configuration and the
//! hypotheses under which a compactified metric is expected to exist.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// One Fano Kähler–Einstein factor `M_i` of the base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    /// Complex dimension.
    pub n: u32,
    /// Fano index, `c_1(M_i) = p * alpha_i`.
    pub p: u32,
    /// Twisting of the circle bundle. Only `q^2` enters the equations.
    pub q: i64,
}

impl FactorSpec {
    pub fn new(n: u32, p: u32, q: i64) -> Self {
        Self { n, p, q }
    }

    pub fn q_squared(&self) -> f64 {
        (self.q as f64).powi(2)
    }

    /// `p = n + 1` and `|q| = 1`: the factor is a projective space that can be
    /// collapsed together with the circle fibre.
    pub fn is_blowdown_compatible(&self) -> bool {
        self.p == self.n + 1 && self.q.unsigned_abs() == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EndpointType {
    /// The circle fibre collapses: `alpha = 0`, `|alpha'| = 2`.
    #[serde(rename = "collapse")]
    SmoothCollapse,
    /// The end factor collapses with the fibre: `beta = 0`, `|beta'| = 1`.
    #[serde(rename = "blowdown")]
    Blowdown,
}

fn default_epsilon() -> f64 {
    -1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    pub factors: Vec<FactorSpec>,
    pub m: f64,
    /// Fixed to -1; kept so sign conventions stay explicit in the formulas.
    #[serde(skip, default = "default_epsilon")]
    pub epsilon: f64,
    pub left: EndpointType,
    pub right: EndpointType,
}

impl BundleSpec {
    pub fn new(factors: Vec<FactorSpec>, m: f64, left: EndpointType, right: EndpointType) -> Self {
        Self {
            factors,
            m,
            epsilon: -1.0,
            left,
            right,
        }
    }

    /// Both ends collapse the circle fibre.
    pub fn collapse(factors: Vec<FactorSpec>, m: f64) -> Self {
        Self::new(factors, m, EndpointType::SmoothCollapse, EndpointType::SmoothCollapse)
    }

    pub fn with_m(mut self, m: f64) -> Self {
        self.m = m;
        self
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Dimension entering the left endpoint quadratic (0 for a collapse).
    pub fn n_left(&self) -> u32 {
        match self.left {
            EndpointType::Blowdown => self.factors.first().map_or(0, |f| f.n),
            EndpointType::SmoothCollapse => 0,
        }
    }

    pub fn n_right(&self) -> u32 {
        match self.right {
            EndpointType::Blowdown => self.factors.last().map_or(0, |f| f.n),
            EndpointType::SmoothCollapse => 0,
        }
    }

    /// Index of the factor collapsed at `s = 0`, if any.
    pub fn left_blowdown_factor(&self) -> Option<usize> {
        (self.left == EndpointType::Blowdown && !self.factors.is_empty()).then_some(0)
    }

    pub fn right_blowdown_factor(&self) -> Option<usize> {
        (self.right == EndpointType::Blowdown && !self.factors.is_empty())
            .then(|| self.factors.len() - 1)
    }

    pub fn from_json_str(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Ok(Self::from_json_str(&text)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialises")
    }
}

/// The hypothesis a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// Shape of the data: `r >= 1`, `n, p >= 1`, `q != 0`.
    Structural,
    /// `m > 1`, `epsilon = -1`.
    Parameter,
    /// `0 < |q_i| < p_i` for every factor (no blowdown).
    TwistBelowIndex,
    /// `|q_i| (n_end + 1) < p_i` for the factors not blown down.
    TwistBound,
    /// The blown-down factor must be `CP^n` with `|q| = 1`.
    BlowdownLeft,
    BlowdownRight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub clause: Clause,
    pub factor: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, clause: Clause, factor: Option<usize>, message: String) {
        self.violations.push(Violation {
            clause,
            factor,
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for v in &self.violations {
            match v.factor {
                Some(i) => writeln!(f, "[{:?}, factor {}] {}", v.clause, i + 1, v.message)?,
                None => writeln!(f, "[{:?}] {}", v.clause, v.message)?,
            }
        }
        Ok(())
    }
}

/// Checks every structural and existence hypothesis; violations are data.
pub fn validate_spec(spec: &BundleSpec) -> ValidationReport {
    use EndpointType::*;

    let mut report = ValidationReport::default();
    let r = spec.factors.len();

    if r == 0 {
        report.push(Clause::Structural, None, "at least one factor is required".into());
        return report;
    }
    for (i, f) in spec.factors.iter().enumerate() {
        if f.n < 1 {
            report.push(Clause::Structural, Some(i), format!("n = {} must be >= 1", f.n));
        }
        if f.p < 1 {
            report.push(Clause::Structural, Some(i), format!("p = {} must be >= 1", f.p));
        }
        if f.q == 0 {
            report.push(Clause::Structural, Some(i), "q must be nonzero".into());
        }
    }
    if !(spec.m.is_finite() && spec.m > 1.0) {
        report.push(Clause::Parameter, None, format!("m = {} must satisfy m > 1", spec.m));
    }
    if spec.epsilon != -1.0 {
        report.push(Clause::Parameter, None, format!("epsilon = {} must be -1", spec.epsilon));
    }

    if spec.left == Blowdown {
        let f = spec.factors[0];
        if f.p != f.n + 1 {
            report.push(
                Clause::BlowdownLeft,
                Some(0),
                format!("blown-down factor needs p = n + 1 ({} != {})", f.p, f.n + 1),
            );
        }
        if f.q.unsigned_abs() != 1 {
            report.push(Clause::BlowdownLeft, Some(0), format!("blown-down factor needs |q| = 1 (q = {})", f.q));
        }
    }
    if spec.right == Blowdown {
        let f = spec.factors[r - 1];
        if f.p != f.n + 1 {
            report.push(
                Clause::BlowdownRight,
                Some(r - 1),
                format!("blown-down factor needs p = n + 1 ({} != {})", f.p, f.n + 1),
            );
        }
        if f.q.unsigned_abs() != 1 {
            report.push(
                Clause::BlowdownRight,
                Some(r - 1),
                format!("blown-down factor needs |q| = 1 (q = {})", f.q),
            );
        }
    }

    match (spec.left, spec.right) {
        (SmoothCollapse, SmoothCollapse) => {
            for (i, f) in spec.factors.iter().enumerate() {
                if f.q != 0 && f.q.unsigned_abs() >= u64::from(f.p) {
                    report.push(Clause::TwistBelowIndex, Some(i), format!("requires 0 < |q| < p (|q| = {}, p = {})", f.q.abs(), f.p));
                }
            }
        }
        (Blowdown, SmoothCollapse) => {
            let scale = u64::from(spec.factors[0].n) + 1;
            for (i, f) in spec.factors.iter().enumerate().skip(1) {
                if f.q.unsigned_abs() * scale >= u64::from(f.p) {
                    report.push(
                        Clause::TwistBound,
                        Some(i),
                        format!("requires |q|(n_1 + 1) < p ({} >= {})", f.q.unsigned_abs() * scale, f.p),
                    );
                }
            }
        }
        (SmoothCollapse, Blowdown) => {
            let scale = u64::from(spec.factors[r - 1].n) + 1;
            for (i, f) in spec.factors.iter().enumerate().take(r - 1) {
                if f.q.unsigned_abs() * scale >= u64::from(f.p) {
                    report.push(
                        Clause::TwistBound,
                        Some(i),
                        format!("requires |q|(n_r + 1) < p ({} >= {})", f.q.unsigned_abs() * scale, f.p),
                    );
                }
            }
        }
        (Blowdown, Blowdown) => {
            if r < 2 {
                report.push(
                    Clause::Structural,
                    None,
                    "blowdown at both ends needs two distinct end factors (r >= 2)".into(),
                );
            }
        }
    }

    report
}
