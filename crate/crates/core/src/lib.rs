//! Quasi-Einstein metrics on sphere bundles over products of Fano
//! Kähler–Einstein manifolds.
//!
//! The cohomogeneity-one reduction leaves a profile `alpha(s)` for the circle
//! fibre, profiles `beta_i(s)` for the base factors and a linear potential
//! profile `phi(s)`. Under the quadratic ansatz for `beta_i` everything is in
//! closed form except for one scalar, `kappa0`, which is fixed numerically by
//! the boundary condition at the far end of the interval.
//!
//! - [`spec`]: problem data and hypothesis checks.
//! - [`closed_form`]: endpoint quadratics, `E`, `s_*`, `A_i`, `beta_i`, `phi`, `V`.
//! - [`solver`]: `alpha` by adaptive quadrature and the `kappa0` shooting problem.
//! - [`verify`]: residual certification of the full reduced system.
//! - [`metric`]: reconstruction of the arclength coordinate `t`.
//! - [`export`]: JSON, CSV and SVG output.
//! - [`reproduce`]: closed-form reproduction tables.
//! - [`cli`]: the `qe` command implementation.

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod export;
pub mod metric;
pub mod quadrature;
pub mod reproduce;
pub mod solver;
pub mod spec;
pub mod verify;

pub use closed_form::{ClosedForm, QuadraticRoots, RootBranch, SolutionParams};
pub use error::{Error, Result};
pub use export::{ReportFile, SolutionFile};
pub use metric::{reconstruct_t, MetricProfile};
pub use solver::{solve, AlphaProfile, SolvedProfile, SolverConfig};
pub use spec::{validate_spec, BundleSpec, EndpointType, FactorSpec, ValidationReport};
pub use verify::{verify, verify_t_system, ResidualReport};
