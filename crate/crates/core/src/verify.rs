//! Residual certification of a solved profile.
//!
//! Every equation of the reduced system in the `s` coordinate is evaluated
//! pointwise from the sampled profiles, together with the first integral
//! `mu`, the ansatz identity, the endpoint conditions and positivity. All
//! analytic derivatives are cross-checked against finite differences.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_form::ClosedForm;
use crate::error::{Error, Quantity, Result};
use crate::solver::{chebyshev_nodes, SolvedProfile};
use crate::spec::BundleSpec;

/// Step of the finite-difference cross-checks, relative to `s_*`.
pub const FD_STEP: f64 = 1e-6;

/// Tolerances applied by [`verify`]. Each check is held to the precision of
/// its weakest numerical ingredient.
pub mod tol {
    /// Roundoff-class algebraic identities.
    pub const ALGEBRAIC: f64 = 1e-12;
    /// Residuals of the reduced system and the constancy of `mu`.
    pub const RESIDUAL: f64 = 1e-8;
    /// `|alpha(s_*)|`, scaled by `max(1, max alpha)`.
    pub const ALPHA_END: f64 = 1e-10;
    /// Extrapolated endpoint slopes of `alpha`.
    pub const SLOPE: f64 = 1e-6;
    /// Analytic derivatives against central differences.
    pub const FINITE_DIFFERENCE: f64 = 1e-6;
    /// Residual of the `t`-coordinate equation with finite-difference derivatives.
    pub const T_SYSTEM: f64 = 1e-4;
}

/// Every quantity entering the reduced system at one `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub s: f64,
    pub alpha: f64,
    pub alpha_prime: f64,
    pub alpha_second: f64,
    pub beta: Vec<f64>,
    pub beta_prime: Vec<f64>,
    pub beta_second: Vec<f64>,
    pub phi: f64,
    pub phi_prime: f64,
    #[serde(rename = "V")]
    pub volume: f64,
    #[serde(rename = "logV_prime")]
    pub log_volume_prime: f64,
    #[serde(rename = "logV_second")]
    pub log_volume_second: f64,
}

impl ProfileSample {
    /// Samples the profile at interior `s`. Fails if some `beta_i <= 0`.
    pub fn at(profile: &SolvedProfile, s: f64) -> Result<Self> {
        let closed = profile.closed();
        let r = closed.spec.rank();
        let mut beta = Vec::with_capacity(r);
        let mut beta_prime = Vec::with_capacity(r);
        let mut beta_second = Vec::with_capacity(r);
        for i in 0..r {
            let b = closed.beta(i, s);
            if !(b.value > 0.0) {
                return Err(Error::PositivityFailure {
                    s,
                    factor: Some(i),
                    quantity: Quantity::Beta,
                    value: b.value,
                });
            }
            beta.push(b.value);
            beta_prime.push(b.prime);
            beta_second.push(b.second);
        }
        let a = profile.profile.derivatives(s)?;
        let (lv1, lv2) = closed.log_volume_derivatives(s)?;
        Ok(Self {
            s,
            alpha: a.value,
            alpha_prime: a.prime,
            alpha_second: a.second,
            beta,
            beta_prime,
            beta_second,
            phi: closed.phi(s),
            phi_prime: closed.phi_prime(),
            volume: closed.volume(s),
            log_volume_prime: lv1,
            log_volume_second: lv2,
        })
    }

    /// `phi` is linear, so `phi'' = 0`.
    pub fn phi_second(&self) -> f64 {
        0.0
    }
}

/// First reduced equation (the `alpha''` equation with the `beta` curvature terms), as LHS - RHS.
pub fn residual_25(sample: &ProfileSample, spec: &BundleSpec) -> f64 {
    let m = spec.m;
    let curvature: f64 = spec
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let ratio = sample.beta_prime[i] / sample.beta[i];
            f64::from(f.n) * (sample.beta_second[i] / sample.beta[i] - 0.5 * ratio * ratio)
        })
        .sum();
    0.5 * sample.alpha_second
        + 0.5 * sample.alpha_prime * sample.log_volume_prime
        + sample.alpha * curvature
        + m * (sample.alpha * sample.phi_second() / sample.phi + sample.alpha_prime * sample.phi_prime / (2.0 * sample.phi))
        - 0.5 * spec.epsilon
}

/// Second reduced equation (the `alpha''` equation with the twisting terms).
pub fn residual_26(sample: &ProfileSample, spec: &BundleSpec) -> f64 {
    let twist: f64 = spec
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| f64::from(f.n) * f.q_squared() / (2.0 * sample.beta[i] * sample.beta[i]))
        .sum();
    0.5 * sample.alpha_second + 0.5 * sample.alpha_prime * sample.log_volume_prime - sample.alpha * twist
        + spec.m * sample.alpha_prime * sample.phi_prime / (2.0 * sample.phi)
        - 0.5 * spec.epsilon
}

/// Equation for the base factor `i`.
pub fn residual_27(sample: &ProfileSample, i: usize, spec: &BundleSpec) -> f64 {
    let f = spec.factors[i];
    let (a, a1) = (sample.alpha, sample.alpha_prime);
    let (b, b1, b2) = (sample.beta[i], sample.beta_prime[i], sample.beta_second[i]);
    let ratio = b1 / b;
    0.5 * a1 * ratio + 0.5 * a * (b2 / b - ratio * ratio) + 0.5 * a * ratio * sample.log_volume_prime
        - f64::from(f.p) / b
        + f.q_squared() * a / (2.0 * b * b)
        + spec.m * 0.5 * a * ratio * sample.phi_prime / sample.phi
        - 0.5 * spec.epsilon
}

/// Left-hand side of the first integral; constant and equal to `mu` on a solution.
pub fn mu_of_s(sample: &ProfileSample, spec: &BundleSpec) -> f64 {
    let (phi, phi1, phi2) = (sample.phi, sample.phi_prime, sample.phi_second());
    let (a, a1) = (sample.alpha, sample.alpha_prime);
    phi * (phi2 * a + 0.5 * phi1 * a1)
        + phi * phi1 * (0.5 * a1 + sample.log_volume_prime * a)
        + (spec.m - 1.0) * phi1 * phi1 * a
        - 0.5 * spec.epsilon * phi * phi
}

/// Unnormalised ansatz expression `beta''/beta - (beta'/beta)^2 / 2 + q^2 / (2 beta^2)`.
fn ansatz_raw(sample: &ProfileSample, i: usize, spec: &BundleSpec) -> f64 {
    let (b, b1, b2) = (sample.beta[i], sample.beta_prime[i], sample.beta_second[i]);
    b2 / b - 0.5 * (b1 / b).powi(2) + spec.factors[i].q_squared() / (2.0 * b * b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDefects {
    pub alpha_at_0: f64,
    pub alpha_at_sstar: f64,
    /// `alpha(s_*)` came from a one-sided limit (`V(s_*) = 0`).
    pub alpha_at_sstar_extrapolated: bool,
    pub alpha_at_sstar_scaled: f64,
    pub slope_at_0_minus_2: f64,
    pub slope_at_sstar_plus_2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_left_at_0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_left_slope_minus_1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_right_at_sstar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_right_slope_plus_1: Option<f64>,
    /// Left endpoint quadratic at `kappa0`, over `max(1, E)`.
    pub quadratic_left: f64,
    /// Right endpoint quadratic at `-(s_* + kappa0)`, over `max(1, E)`.
    pub quadratic_right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdCheck {
    pub alpha_prime: f64,
    pub alpha_second: f64,
    #[serde(rename = "logV_prime")]
    pub log_volume_prime: f64,
    #[serde(rename = "logV_second")]
    pub log_volume_second: f64,
}

impl FdCheck {
    pub fn max(&self) -> f64 {
        self.alpha_prime
            .max(self.alpha_second)
            .max(self.log_volume_prime)
            .max(self.log_volume_second)
    }
}

/// A named pass/fail line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn below(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            pass: value.abs() < tolerance,
        }
    }

    fn flag(name: &str, ok: bool) -> Self {
        Self {
            name: name.to_string(),
            value: if ok { 1.0 } else { 0.0 },
            tolerance: 1.0,
            pass: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub grid: Vec<f64>,
    pub res_25: Vec<f64>,
    pub res_26: Vec<f64>,
    /// `res_27[k][i]`: sample `k`, factor `i`.
    pub res_27: Vec<Vec<f64>>,
    pub mu_samples: Vec<f64>,
    /// `max |mu(s) - E kappa1^2| / max(1, |mu|)`.
    pub mu_dev: f64,
    pub ansatz_res: Vec<Vec<f64>>,
    /// `max |res_25 - res_26 - alpha sum_i n_i ansatz_i|`.
    pub ansatz_split_dev: f64,
    pub boundary: BoundaryDefects,
    pub positivity_ok: bool,
    pub fd_check: f64,
    pub fd_detail: FdCheck,
    pub checks: Vec<Check>,
    pub certified: bool,
}

impl ResidualReport {
    pub fn max_abs(values: &[f64]) -> f64 {
        values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_res_25(&self) -> f64 {
        Self::max_abs(&self.res_25)
    }

    pub fn max_res_26(&self) -> f64 {
        Self::max_abs(&self.res_26)
    }

    pub fn max_res_27(&self) -> f64 {
        self.res_27.iter().map(|r| Self::max_abs(r)).fold(0.0, f64::max)
    }

    pub fn max_ansatz(&self) -> f64 {
        self.ansatz_res.iter().map(|r| Self::max_abs(r)).fold(0.0, f64::max)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }
}

/// Fourth-order central difference.
fn central_difference<F: Fn(f64) -> Result<f64>>(f: F, s: f64, h: f64) -> Result<f64> {
    let d1 = f(s + h)? - f(s - h)?;
    let d2 = f(s + 2.0 * h)? - f(s - 2.0 * h)?;
    Ok((8.0 * d1 - d2) / (12.0 * h))
}

fn rel_gap(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / 1f64.max(analytic.abs())
}

fn fd_at(profile: &SolvedProfile, sample: &ProfileSample, h: f64) -> Result<FdCheck> {
    let alpha = &profile.profile;
    let closed = profile.closed();
    let log_v = |s: f64| -> Result<f64> {
        Ok((0..closed.spec.rank())
            .map(|i| f64::from(closed.spec.factors[i].n) * closed.beta(i, s).value.ln())
            .sum())
    };
    let s = sample.s;
    let h = h.min(0.25 * s.min(profile.s_star() - s));
    Ok(FdCheck {
        alpha_prime: rel_gap(sample.alpha_prime, central_difference(|x| alpha.alpha(x), s, h)?),
        alpha_second: rel_gap(sample.alpha_second, central_difference(|x| alpha.alpha_prime(x), s, h)?),
        log_volume_prime: rel_gap(sample.log_volume_prime, central_difference(log_v, s, h)?),
        log_volume_second: rel_gap(
            sample.log_volume_second,
            central_difference(|x| closed.log_volume_prime(x), s, h)?,
        ),
    })
}

fn boundary_defects(profile: &SolvedProfile, max_alpha: f64) -> Result<BoundaryDefects> {
    let closed: &ClosedForm = profile.closed();
    let s_star = profile.s_star();
    let (alpha_end, extrapolated) = profile.profile.alpha_at_end()?;
    let (q_left, q_right) = closed.endpoint_residuals();
    let scale = 1f64.max(closed.params.energy);

    let left = closed.spec.left_blowdown_factor().map(|i| closed.beta(i, 0.0));
    let right = closed.spec.right_blowdown_factor().map(|i| closed.beta(i, s_star));

    Ok(BoundaryDefects {
        alpha_at_0: profile.profile.alpha(0.0)?,
        alpha_at_sstar: alpha_end,
        alpha_at_sstar_extrapolated: extrapolated,
        // At a right blowdown alpha(s_*) = 0 is imposed through D = 0, so the
        // scaled defect is what gets measured.
        alpha_at_sstar_scaled: (alpha_end.abs() / 1f64.max(max_alpha)).max(if extrapolated {
            profile.defect_at_root.abs()
        } else {
            0.0
        }),
        slope_at_0_minus_2: profile.profile.left_slope()? - 2.0,
        slope_at_sstar_plus_2: profile.profile.right_slope()? + 2.0,
        beta_left_at_0: left.map(|b| b.value),
        beta_left_slope_minus_1: left.map(|b| b.prime - 1.0),
        beta_right_at_sstar: right.map(|b| b.value),
        beta_right_slope_plus_1: right.map(|b| b.prime + 1.0),
        quadratic_left: q_left / scale,
        quadratic_right: q_right / scale,
    })
}

/// Certifies `profile` on `grid_size` Chebyshev nodes spanning
/// `[delta, s_* - delta]`, `delta = delta_frac * s_*`.
///
/// `beta_i <= 0` at a node is an error; `alpha <= 0` is reported through
/// `positivity_ok` (the residuals are still defined there).
pub fn verify(profile: &SolvedProfile, grid_size: usize, delta_frac: f64) -> Result<ResidualReport> {
    if grid_size < 16 {
        return Err(Error::InvalidArgument(format!("grid_size = {grid_size} must be >= 16")));
    }
    if !(delta_frac > 0.0 && delta_frac < 0.1) {
        return Err(Error::InvalidArgument(format!("delta = {delta_frac} must lie in (0, 0.1)")));
    }
    let spec = profile.spec();
    let closed = profile.closed();
    let s_star = profile.s_star();
    let delta = delta_frac * s_star;
    let h = FD_STEP * s_star;
    let grid = chebyshev_nodes(delta, s_star - delta, grid_size);
    let r = spec.rank();

    let samples = grid
        .par_iter()
        .map(|&s| ProfileSample::at(profile, s))
        .collect::<Result<Vec<_>>>()?;

    let fd = samples
        .par_iter()
        .map(|sample| fd_at(profile, sample, h))
        .collect::<Result<Vec<_>>>()?;
    let fd_detail = fd.iter().fold(
        FdCheck {
            alpha_prime: 0.0,
            alpha_second: 0.0,
            log_volume_prime: 0.0,
            log_volume_second: 0.0,
        },
        |acc, c| FdCheck {
            alpha_prime: acc.alpha_prime.max(c.alpha_prime),
            alpha_second: acc.alpha_second.max(c.alpha_second),
            log_volume_prime: acc.log_volume_prime.max(c.log_volume_prime),
            log_volume_second: acc.log_volume_second.max(c.log_volume_second),
        },
    );

    let res_25: Vec<f64> = samples.iter().map(|x| residual_25(x, spec)).collect();
    let res_26: Vec<f64> = samples.iter().map(|x| residual_26(x, spec)).collect();
    let res_27: Vec<Vec<f64>> = samples
        .iter()
        .map(|x| (0..r).map(|i| residual_27(x, i, spec)).collect())
        .collect();
    let mu_samples: Vec<f64> = samples.iter().map(|x| mu_of_s(x, spec)).collect();
    let mu = closed.params.energy * closed.params.kappa1.powi(2);
    let mu_dev = mu_samples
        .iter()
        .map(|v| (v - mu).abs())
        .fold(0.0, f64::max)
        / 1f64.max(mu.abs());
    let ansatz_res: Vec<Vec<f64>> = grid
        .iter()
        .map(|&s| (0..r).map(|i| closed.ansatz_residual(i, s)).collect())
        .collect();
    let ansatz_split_dev = samples
        .iter()
        .zip(res_25.iter().zip(&res_26))
        .map(|(x, (a, b))| {
            let weighted: f64 = (0..r)
                .map(|i| f64::from(spec.factors[i].n) * ansatz_raw(x, i, spec))
                .sum();
            (a - b - x.alpha * weighted).abs()
        })
        .fold(0.0, f64::max);

    let positivity_ok = samples.iter().all(|x| x.alpha > 0.0);
    let max_alpha = samples.iter().map(|x| x.alpha).fold(0.0, f64::max);
    let boundary = boundary_defects(profile, max_alpha)?;
    let fd_check = fd_detail.max();

    let mut report = ResidualReport {
        grid,
        res_25,
        res_26,
        res_27,
        mu_samples,
        mu_dev,
        ansatz_res,
        ansatz_split_dev,
        boundary,
        positivity_ok,
        fd_check,
        fd_detail,
        checks: Vec::new(),
        certified: false,
    };
    report.checks = certification_checks(&report);
    report.certified = report.checks.iter().all(|c| c.pass);
    Ok(report)
}

fn certification_checks(report: &ResidualReport) -> Vec<Check> {
    let b = &report.boundary;
    let mut checks = vec![
        Check::below("residual_25", report.max_res_25(), tol::RESIDUAL),
        Check::below("residual_26", report.max_res_26(), tol::RESIDUAL),
        Check::below("residual_27", report.max_res_27(), tol::RESIDUAL),
        Check::below("mu_constancy", report.mu_dev, tol::RESIDUAL),
        Check::below("ansatz_identity", report.max_ansatz(), tol::ALGEBRAIC),
        Check::below("ansatz_split", report.ansatz_split_dev, tol::RESIDUAL),
        Check::below("quadratic_left", b.quadratic_left, tol::ALGEBRAIC),
        Check::below("quadratic_right", b.quadratic_right, tol::ALGEBRAIC),
        Check::flag("alpha_at_0", b.alpha_at_0 == 0.0),
        Check::below("alpha_at_sstar", b.alpha_at_sstar_scaled, tol::ALPHA_END),
        Check::below("slope_at_0", b.slope_at_0_minus_2, tol::SLOPE),
        Check::below("slope_at_sstar", b.slope_at_sstar_plus_2, tol::SLOPE),
        Check::flag("positivity", report.positivity_ok),
        Check::below("finite_difference", report.fd_check, tol::FINITE_DIFFERENCE),
    ];
    let optional = [
        ("beta_left_at_0", b.beta_left_at_0),
        ("beta_left_slope", b.beta_left_slope_minus_1),
        ("beta_right_at_sstar", b.beta_right_at_sstar),
        ("beta_right_slope", b.beta_right_slope_plus_1),
    ];
    for (name, value) in optional {
        if let Some(v) = value {
            checks.push(Check::below(name, v, tol::ALGEBRAIC));
        }
    }
    checks
}

/// Maximum residual of the `t`-coordinate equation for `alpha = f^2` on the
/// reconstructed arclength grid. Derivatives in `t` are finite differences.
pub fn verify_t_system(profile: &SolvedProfile, grid_size: usize) -> Result<f64> {
    Ok(crate::metric::t_system_residuals(profile, grid_size)?
        .into_iter()
        .map(|(_, r)| r.abs())
        .fold(0.0, f64::max))
}
