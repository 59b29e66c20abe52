//! Closed-form `alpha` by quadrature, and the shooting problem in `kappa0`.
//!
//! With `beta_i` and `phi` fixed by the ansatz, `alpha` solves a linear
//! first-order ODE whose integrating factor is `V (s + kappa0)^(m-1)`:
//!
//! ```text
//! alpha(s) = V(s)^-1 (s + kappa0)^(1-m) ∫_0^s V(r) (r + kappa0)^(m-2) (E + epsilon (r + kappa0)^2 / 2) dr
//! ```
//!
//! `alpha(0) = 0` holds by construction; the remaining boundary condition
//! `alpha(s_*) = 0` is the zero of the bare integral `D(kappa0)` over the
//! whole interval, which stays finite even when `V(s_*) = 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::{ClosedForm, RootBranch};
use crate::error::{Error, Quantity, Result};
use crate::quadrature::{integrate, QuadConfig};
use crate::spec::{validate_spec, BundleSpec, EndpointType};

/// Relative offset from an endpoint used for one-sided limits.
pub const ENDPOINT_DELTA: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Search interval for `kappa0`, `0 < lo < hi`.
    pub bracket: (f64, f64),
    pub scan_points: usize,
    /// Absolute tolerance on `kappa0`.
    pub root_tol: f64,
    pub quad_rel_tol: f64,
    pub max_subdivisions: usize,
    /// Scale of `phi`; does not affect the geometry.
    pub kappa1: f64,
    /// Per-factor root choice for non-blown-down factors (default negative).
    #[serde(default)]
    pub branches: Vec<RootBranch>,
    pub max_bisections: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            bracket: (1e-3, 1e3),
            scan_points: 64,
            root_tol: 1e-12,
            quad_rel_tol: 1e-10,
            max_subdivisions: 200,
            kappa1: 1.0,
            branches: Vec::new(),
            max_bisections: 200,
        }
    }
}

impl SolverConfig {
    pub fn quad(&self) -> QuadConfig {
        QuadConfig {
            rel_tol: self.quad_rel_tol,
            abs_tol: 0.0,
            max_subdivisions: self.max_subdivisions,
        }
    }

    fn check(&self) -> Result<()> {
        let (lo, hi) = self.bracket;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::InvalidArgument(format!("bracket ({lo}, {hi}) must satisfy 0 < lo < hi")));
        }
        if self.scan_points < 2 {
            return Err(Error::InvalidArgument("scan_points must be >= 2".into()));
        }
        if !(self.root_tol > 0.0 && self.quad_rel_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// `alpha` with its first two derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaValue {
    pub value: f64,
    pub prime: f64,
    pub second: f64,
}

/// Evaluates `alpha` and its derivatives for fixed closed-form data.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaProfile {
    pub closed: ClosedForm,
    pub quad: QuadConfig,
    /// `D = ∫_0^{s_*}` of the integrand.
    pub total: f64,
    /// `∫_0^{s_*}` of its absolute value.
    pub total_l1: f64,
}

impl AlphaProfile {
    pub fn new(closed: ClosedForm, quad: QuadConfig) -> Self {
        let s_star = closed.s_star();
        let r = integrate(|x| closed.alpha_integrand(x), 0.0, s_star, &quad);
        Self {
            closed,
            quad,
            total: r.value,
            total_l1: r.l1,
        }
    }

    pub fn s_star(&self) -> f64 {
        self.closed.s_star()
    }

    /// `∫_0^s` of the integrand; taken as `D - ∫_s^{s_*}` on the right half to
    /// keep the cancellation near `s_*` out of the quadrature.
    pub fn partial_integral(&self, s: f64) -> f64 {
        self.partial_integral_from(s, self.right_anchor())
    }

    fn partial_integral_from(&self, s: f64, total: f64) -> f64 {
        let s_star = self.s_star();
        let f = |x| self.closed.alpha_integrand(x);
        if s <= 0.5 * s_star {
            integrate(f, 0.0, s, &self.quad).value
        } else {
            total - integrate(f, s, s_star, &self.quad).value
        }
    }

    /// Value of the full integral used on the right half. At a right
    /// blowdown `V(s_*) = 0` would amplify any nonzero `D` without bound, so
    /// the root condition `D = 0` is imposed there instead.
    fn right_anchor(&self) -> f64 {
        match self.closed.spec.right {
            EndpointType::Blowdown => 0.0,
            EndpointType::SmoothCollapse => self.total,
        }
    }

    fn check_range(&self, s: f64) -> Result<()> {
        if !(0.0..=self.s_star()).contains(&s) {
            return Err(Error::InvalidArgument(format!(
                "s = {s} outside [0, {}]",
                self.s_star()
            )));
        }
        Ok(())
    }

    pub fn alpha(&self, s: f64) -> Result<f64> {
        self.check_range(s)?;
        if s == 0.0 {
            return Ok(0.0);
        }
        let weight = self.closed.integrating_factor(s);
        if !(weight > 0.0) {
            if s == self.s_star() {
                return Err(Error::SingularPrefactor {
                    s,
                    extrapolated: self.right_alpha_limit()?,
                });
            }
            return Err(Error::SingularV { s });
        }
        Ok(self.partial_integral(s) / weight)
    }

    /// `alpha` with `D = 0` imposed on the right half, so that both end
    /// conditions hold exactly. Used where `alpha` enters under a square root
    /// arbitrarily close to `s_*`.
    pub fn alpha_imposed(&self, s: f64) -> Result<f64> {
        self.check_range(s)?;
        if s == 0.0 || s == self.s_star() {
            return Ok(0.0);
        }
        let weight = self.closed.integrating_factor(s);
        if !(weight > 0.0) {
            return Err(Error::SingularV { s });
        }
        Ok(self.partial_integral_from(s, 0.0) / weight)
    }

    /// `alpha(s_*)`, by the one-sided limit when `V(s_*) = 0`. The flag is
    /// `true` when the value was extrapolated.
    pub fn alpha_at_end(&self) -> Result<(f64, bool)> {
        match self.alpha(self.s_star()) {
            Ok(v) => Ok((v, false)),
            Err(Error::SingularPrefactor { extrapolated, .. }) => Ok((extrapolated, true)),
            Err(e) => Err(e),
        }
    }

    /// `alpha`, `alpha'`, `alpha''` from the first-order ODE
    /// `alpha' + P alpha = RHS`, `P = (log V)' + (m-1)/x`, `RHS = epsilon x / 2 + E / x`.
    pub fn derivatives(&self, s: f64) -> Result<AlphaValue> {
        let alpha = self.alpha(s)?;
        let (lv1, lv2) = self.closed.log_volume_derivatives(s)?;
        Ok(self.derivatives_from(s, alpha, lv1, lv2))
    }

    fn derivatives_from(&self, s: f64, alpha: f64, lv1: f64, lv2: f64) -> AlphaValue {
        let m = self.closed.m();
        let eps = self.closed.epsilon();
        let e = self.closed.params.energy;
        let x = self.closed.params.x(s);

        let p = lv1 + (m - 1.0) / x;
        let p_prime = lv2 - (m - 1.0) / (x * x);
        let rhs = 0.5 * eps * x + e / x;
        let rhs_prime = 0.5 * eps - e / (x * x);

        let prime = rhs - p * alpha;
        let second = rhs_prime - p_prime * alpha - p * prime;
        AlphaValue {
            value: alpha,
            prime,
            second,
        }
    }

    pub fn alpha_prime(&self, s: f64) -> Result<f64> {
        self.derivatives(s).map(|d| d.prime)
    }

    pub fn alpha_second(&self, s: f64) -> Result<f64> {
        self.derivatives(s).map(|d| d.second)
    }

    fn endpoint_step(&self) -> f64 {
        ENDPOINT_DELTA * self.s_star()
    }

    /// Second-order Richardson limit from samples at `h, 2h, 4h`.
    fn richardson(f1: f64, f2: f64, f4: f64) -> f64 {
        (8.0 * f1 - 6.0 * f2 + f4) / 3.0
    }

    fn extrapolate<F: Fn(f64) -> Result<f64>>(&self, f: F) -> Result<f64> {
        let h = self.endpoint_step();
        Ok(Self::richardson(f(h)?, f(2.0 * h)?, f(4.0 * h)?))
    }

    /// `alpha'(0+)`.
    pub fn left_slope(&self) -> Result<f64> {
        self.extrapolate(|h| self.alpha_prime(h))
    }

    /// `alpha'(s_*-)`.
    pub fn right_slope(&self) -> Result<f64> {
        let s_star = self.s_star();
        self.extrapolate(|h| self.alpha_prime(s_star - h))
    }

    fn right_alpha_limit(&self) -> Result<f64> {
        let s_star = self.s_star();
        self.extrapolate(|h| self.alpha(s_star - h))
    }
}

/// Checks `beta_i > 0` at `points` interior nodes.
fn check_beta_positive(closed: &ClosedForm, points: usize) -> Result<()> {
    let s_star = closed.s_star();
    for k in 1..points {
        let s = s_star * k as f64 / points as f64;
        for i in 0..closed.spec.rank() {
            let b = closed.beta(i, s).value;
            if !(b > 0.0) {
                return Err(Error::PositivityFailure {
                    s,
                    factor: Some(i),
                    quantity: Quantity::Beta,
                    value: b,
                });
            }
        }
    }
    Ok(())
}

/// Value of the boundary defect at one `kappa0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defect {
    pub kappa0: f64,
    /// `D(kappa0)`.
    pub value: f64,
    /// `∫|integrand|`, the natural scale of `D`.
    pub l1: f64,
}

impl Defect {
    pub fn scaled(&self) -> f64 {
        if self.l1 > 0.0 {
            self.value / self.l1
        } else {
            self.value
        }
    }
}

/// `D(kappa0) = ∫_0^{s_*} V(r) (r + kappa0)^(m-2) (E + epsilon (r + kappa0)^2 / 2) dr`,
/// with `E`, `s_*` and `A_i` rebuilt from `kappa0`.
pub fn boundary_defect(kappa0: f64, spec: &BundleSpec, config: &SolverConfig) -> Result<Defect> {
    let closed = ClosedForm::from_kappa0(spec.clone(), kappa0, config.kappa1, &config.branches)?;
    check_beta_positive(&closed, 16)?;
    let s_star = closed.s_star();
    let r = integrate(|x| closed.alpha_integrand(x), 0.0, s_star, &config.quad());
    Ok(Defect {
        kappa0,
        value: r.value,
        l1: r.l1,
    })
}

/// One row of the `kappa0` scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub kappa0: f64,
    /// Scaled defect `D / ∫|integrand|`, absent where the profile is not admissible.
    pub defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn scan_grid(config: &SolverConfig) -> Vec<f64> {
    let (lo, hi) = config.bracket;
    let n = config.scan_points;
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| match k {
            0 => lo,
            k if k == n - 1 => hi,
            k => (llo + (lhi - llo) * k as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

pub fn scan_defect(spec: &BundleSpec, config: &SolverConfig) -> Vec<ScanPoint> {
    scan_grid(config)
        .into_par_iter()
        .map(|kappa0| match boundary_defect(kappa0, spec, config) {
            Ok(d) => ScanPoint {
                kappa0,
                defect: Some(d.scaled()),
                note: None,
            },
            Err(e) => ScanPoint {
                kappa0,
                defect: None,
                note: Some(e.to_string()),
            },
        })
        .collect()
}

/// Consecutive admissible scan points where the defect changes sign.
pub fn sign_changes(scan: &[ScanPoint]) -> Vec<(f64, f64)> {
    scan.windows(2)
        .filter_map(|w| match (w[0].defect, w[1].defect) {
            (Some(a), Some(b)) if a == 0.0 || a * b < 0.0 => Some((w[0].kappa0, w[1].kappa0)),
            _ => None,
        })
        .collect()
}

/// Bisection on `D` inside a sign-change interval.
pub fn bisect_defect(spec: &BundleSpec, config: &SolverConfig, (mut lo, mut hi): (f64, f64)) -> Result<f64> {
    let mut f_lo = boundary_defect(lo, spec, config)?.value;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    for _ in 0..config.max_bisections {
        if hi - lo <= config.root_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = boundary_defect(mid, spec, config)?.value;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Chebyshev–Lobatto nodes mapped onto `[a, b]`, increasing.
pub fn chebyshev_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n)
        .map(|k| {
            let theta = std::f64::consts::PI * k as f64 / (n - 1) as f64;
            let t = 0.5 * (1.0 - theta.cos());
            match k {
                0 => a,
                k if k == n - 1 => b,
                _ => a + (b - a) * t,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolvedProfile {
    pub profile: AlphaProfile,
    /// `D(kappa0*) / ∫|integrand|`.
    pub defect_at_root: f64,
    pub bracket_used: (f64, f64),
    pub all_sign_changes: Vec<(f64, f64)>,
    /// Bisected root inside each sign change, in increasing order.
    pub roots: Vec<f64>,
    pub config: SolverConfig,
}

impl SolvedProfile {
    /// Rebuilds a profile from stored parameters (no root finding).
    pub fn from_closed_form(closed: ClosedForm, config: SolverConfig) -> Self {
        let profile = AlphaProfile::new(closed, config.quad());
        let kappa0 = profile.closed.params.kappa0;
        let defect_at_root = if profile.total_l1 > 0.0 {
            profile.total / profile.total_l1
        } else {
            profile.total
        };
        Self {
            profile,
            defect_at_root,
            bracket_used: config.bracket,
            all_sign_changes: Vec::new(),
            roots: vec![kappa0],
            config,
        }
    }

    pub fn closed(&self) -> &ClosedForm {
        &self.profile.closed
    }

    pub fn spec(&self) -> &BundleSpec {
        &self.profile.closed.spec
    }

    pub fn kappa0(&self) -> f64 {
        self.profile.closed.params.kappa0
    }

    pub fn s_star(&self) -> f64 {
        self.profile.s_star()
    }

    /// `alpha > 0` and `beta_i > 0` at interior Chebyshev nodes.
    pub fn check_positivity(&self, points: usize) -> Result<()> {
        let s_star = self.s_star();
        let delta = ENDPOINT_DELTA * s_star;
        for s in chebyshev_nodes(delta, s_star - delta, points) {
            for i in 0..self.spec().rank() {
                let b = self.closed().beta(i, s).value;
                if !(b > 0.0) {
                    return Err(Error::PositivityFailure {
                        s,
                        factor: Some(i),
                        quantity: Quantity::Beta,
                        value: b,
                    });
                }
            }
            let a = self.profile.alpha(s)?;
            if !(a > 0.0) {
                return Err(Error::PositivityFailure {
                    s,
                    factor: None,
                    quantity: Quantity::Alpha,
                    value: a,
                });
            }
        }
        Ok(())
    }
}

/// Scans `kappa0` log-uniformly, bisects every sign change of the boundary
/// defect and returns the profile at the smallest root.
pub fn solve(spec: &BundleSpec, config: &SolverConfig) -> Result<SolvedProfile> {
    let report = validate_spec(spec);
    if !report.is_valid() {
        return Err(Error::InvalidSpec(report));
    }
    config.check()?;

    let scan = scan_defect(spec, config);
    let changes = sign_changes(&scan);
    if changes.is_empty() {
        return Err(Error::NoSignChange {
            lo: config.bracket.0,
            hi: config.bracket.1,
            scan,
        });
    }

    let roots = changes
        .par_iter()
        .map(|&interval| bisect_defect(spec, config, interval))
        .collect::<Result<Vec<f64>>>()?;

    let kappa0 = roots[0];
    let closed = ClosedForm::from_kappa0(spec.clone(), kappa0, config.kappa1, &config.branches)?;
    let mut solved = SolvedProfile::from_closed_form(closed, config.clone());
    solved.all_sign_changes = changes;
    solved.roots = roots;
    solved.check_positivity(64)?;
    Ok(solved)
}
