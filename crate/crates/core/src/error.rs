use thiserror::Error;

use crate::solver::ScanPoint;
use crate::spec::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which quantity lost positivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Alpha,
    Beta,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    InvalidSpec(ValidationReport),

    #[error("negative discriminant {discriminant} in endpoint quadratic (E = {energy}, n = {n_end})")]
    NegativeDiscriminant { energy: f64, n_end: u32, discriminant: f64 },

    #[error("left endpoint root kappa0 = {kappa0} is not positive (E = {energy})")]
    NonPositiveKappa0 { energy: f64, kappa0: f64 },

    #[error("V vanishes at s = {s}")]
    SingularV { s: f64 },

    #[error("prefactor V^-1 (s+kappa0)^(1-m) is singular at s = {s}; one-sided limit {extrapolated}")]
    SingularPrefactor { s: f64, extrapolated: f64 },

    #[error("positivity failure: {quantity:?} (factor {factor:?}) = {value} at s = {s}")]
    PositivityFailure {
        s: f64,
        factor: Option<usize>,
        quantity: Quantity,
        value: f64,
    },

    #[error("boundary defect never changes sign on [{lo}, {hi}] ({} scan points)", scan.len())]
    NoSignChange { lo: f64, hi: f64, scan: Vec<ScanPoint> },

    #[error("alpha = {value} is not positive at s = {s}")]
    NonPositiveAlpha { s: f64, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
