//! Algebraically determined part of the solution: endpoint quadratics,
//! the interval length, the base-factor coefficients and the closed-form
//! profiles `beta_i`, `phi`, `V`.
//!
//! Everything is parameterised by `x = s + kappa0`. Under the ansatz
//! `beta_i = A_i x^2 - q_i^2 / (4 A_i)` and `phi = kappa1 x`, consistency of
//! the reduced system pins a single constant
//! `E = (8 A_i p_i - epsilon q_i^2) / (8 A_i^2)` shared by all factors, and
//! both ends of the interval are roots of `x^2 / 2 + 2 (n_end + 1) x - E`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spec::BundleSpec;

/// The two real roots of `x^2 / 2 + 2 (n + 1) x - E`, `small <= large`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticRoots {
    pub small: f64,
    pub large: f64,
}

pub fn endpoint_quadratic(x: f64, energy: f64, n_end: u32) -> f64 {
    0.5 * x * x + 2.0 * (f64::from(n_end) + 1.0) * x - energy
}

pub fn endpoint_quadratic_roots(energy: f64, n_end: u32) -> Result<QuadraticRoots> {
    let b = 2.0 * (f64::from(n_end) + 1.0);
    let discriminant = b * b + 2.0 * energy;
    if !(discriminant >= 0.0) {
        return Err(Error::NegativeDiscriminant {
            energy,
            n_end,
            discriminant,
        });
    }
    let root = discriminant.sqrt();
    let large = if b >= 0.0 && energy != 0.0 {
        // Avoid cancellation in -b + sqrt(b^2 + 2E) when E is small.
        2.0 * energy / (b + root)
    } else {
        -b + root
    };
    Ok(QuadraticRoots {
        small: -b - root,
        large,
    })
}

/// `E(kappa0)` on the left end: `kappa0^2 / 2 + 2 (n_L + 1) kappa0`.
pub fn energy_from_kappa0(kappa0: f64, spec: &BundleSpec) -> f64 {
    0.5 * kappa0 * kappa0 + 2.0 * (f64::from(spec.n_left()) + 1.0) * kappa0
}

/// `kappa0` (the large left root) and `s_*` (from the small right root).
pub fn kappa0_and_sstar(energy: f64, spec: &BundleSpec) -> Result<(f64, f64)> {
    let left = endpoint_quadratic_roots(energy, spec.n_left())?;
    let kappa0 = left.large;
    if !(kappa0 > 0.0) {
        return Err(Error::NonPositiveKappa0 { energy, kappa0 });
    }
    let s_star = right_end_x(energy, spec)? - kappa0;
    Ok((kappa0, s_star))
}

/// `s_* + kappa0 = -(small root of the right-end quadratic)`.
pub fn right_end_x(energy: f64, spec: &BundleSpec) -> Result<f64> {
    Ok(-endpoint_quadratic_roots(energy, spec.n_right())?.small)
}

/// Which solution of `8 E A^2 - 8 p A + epsilon q^2 = 0` to take for a factor
/// that is not blown down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootBranch {
    /// `A < 0`: `beta` decreases along the interval. This is the branch on
    /// which `|q| < p` gives positivity at both ends.
    Negative,
    Positive,
}

/// How a coefficient `A_i` was fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientKind {
    LeftBlowdown,
    RightBlowdown,
    Root(RootBranch),
}

/// Root of `8 E A^2 - 8 p A + epsilon q^2 = 0` on the requested branch.
pub fn coefficient_root(energy: f64, p: f64, q_squared: f64, epsilon: f64, branch: RootBranch) -> f64 {
    // Roots: (p ± sqrt(p^2 - E epsilon q^2 / 2)) / (2E). For epsilon = -1 the
    // product of roots is negative, so exactly one is positive (p >= 1).
    let disc = (p * p - 0.5 * energy * epsilon * q_squared).sqrt();
    let positive = (p + disc) / (2.0 * energy);
    match branch {
        RootBranch::Positive => positive,
        // Vieta form keeps full precision when E q^2 << p^2.
        RootBranch::Negative => epsilon * q_squared / (8.0 * energy) / positive,
    }
}

pub fn coefficient_kinds(spec: &BundleSpec, branches: &[RootBranch]) -> Vec<CoefficientKind> {
    let left = spec.left_blowdown_factor();
    let right = spec.right_blowdown_factor();
    (0..spec.rank())
        .map(|i| {
            if Some(i) == left {
                CoefficientKind::LeftBlowdown
            } else if Some(i) == right {
                CoefficientKind::RightBlowdown
            } else {
                CoefficientKind::Root(branches.get(i).copied().unwrap_or(RootBranch::Negative))
            }
        })
        .collect()
}

/// Coefficients `A_i`. Blown-down factors are fixed by their endpoint
/// normalisation; the rest solve the `E`-identity on the requested branch
/// (missing entries in `branches` default to [`RootBranch::Negative`]).
pub fn coefficients_a(
    energy: f64,
    kappa0: f64,
    s_star: f64,
    spec: &BundleSpec,
    branches: &[RootBranch],
) -> Vec<f64> {
    coefficient_kinds(spec, branches)
        .into_iter()
        .zip(&spec.factors)
        .map(|(kind, f)| match kind {
            CoefficientKind::LeftBlowdown => 1.0 / (2.0 * kappa0),
            CoefficientKind::RightBlowdown => -1.0 / (2.0 * (s_star + kappa0)),
            CoefficientKind::Root(branch) => coefficient_root(energy, f64::from(f.p), f.q_squared(), spec.epsilon, branch),
        })
        .collect()
}

/// `(8 A p - epsilon q^2) / (8 A^2)`.
pub fn energy_identity(a: f64, p: f64, q_squared: f64, epsilon: f64) -> f64 {
    (8.0 * a * p - epsilon * q_squared) / (8.0 * a * a)
}

/// The solved scalars. Together with the [`BundleSpec`] they determine every profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionParams {
    pub kappa0: f64,
    pub kappa1: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub mu: f64,
    pub s_star: f64,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
}

impl SolutionParams {
    /// Assembles every algebraic quantity from the free parameter `kappa0`.
    pub fn from_kappa0(kappa0: f64, kappa1: f64, spec: &BundleSpec, branches: &[RootBranch]) -> Result<Self> {
        if !(kappa0 > 0.0 && kappa0.is_finite()) {
            return Err(Error::NonPositiveKappa0 {
                energy: f64::NAN,
                kappa0,
            });
        }
        let energy = energy_from_kappa0(kappa0, spec);
        let s_star = right_end_x(energy, spec)? - kappa0;
        let a = coefficients_a(energy, kappa0, s_star, spec, branches);
        Ok(Self {
            kappa0,
            kappa1,
            energy,
            mu: energy * kappa1 * kappa1,
            s_star,
            a,
        })
    }

    /// Same geometry with `phi` rescaled; `mu` follows as `E kappa1^2`.
    pub fn with_kappa1(&self, kappa1: f64) -> Self {
        Self {
            kappa1,
            mu: self.energy * kappa1 * kappa1,
            ..self.clone()
        }
    }

    pub fn x(&self, s: f64) -> f64 {
        s + self.kappa0
    }
}

/// `beta_i` and its first two derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaValue {
    pub value: f64,
    pub prime: f64,
    pub second: f64,
}

/// A spec together with solved parameters: evaluates the closed-form profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    pub spec: BundleSpec,
    pub params: SolutionParams,
}

impl ClosedForm {
    pub fn new(spec: BundleSpec, params: SolutionParams) -> Self {
        Self { spec, params }
    }

    pub fn from_kappa0(spec: BundleSpec, kappa0: f64, kappa1: f64, branches: &[RootBranch]) -> Result<Self> {
        let params = SolutionParams::from_kappa0(kappa0, kappa1, &spec, branches)?;
        Ok(Self { spec, params })
    }

    pub fn m(&self) -> f64 {
        self.spec.m
    }

    pub fn epsilon(&self) -> f64 {
        self.spec.epsilon
    }

    pub fn s_star(&self) -> f64 {
        self.params.s_star
    }

    pub fn beta(&self, i: usize, s: f64) -> BetaValue {
        let a = self.params.a[i];
        let x = self.params.x(s);
        let q2 = self.spec.factors[i].q_squared();
        // Blown-down factors in factored form so the end value is an exact zero.
        let value = if q2 == 1.0 && self.spec.left_blowdown_factor() == Some(i) {
            s * (x + self.params.kappa0) * a
        } else if q2 == 1.0 && self.spec.right_blowdown_factor() == Some(i) {
            let x_end = self.params.x(self.params.s_star);
            -(self.params.s_star - s) * (x + x_end) * a
        } else {
            a * x * x - q2 / (4.0 * a)
        };
        BetaValue {
            value,
            prime: 2.0 * a * x,
            second: 2.0 * a,
        }
    }

    pub fn phi(&self, s: f64) -> f64 {
        self.params.kappa1 * self.params.x(s)
    }

    pub fn phi_prime(&self) -> f64 {
        self.params.kappa1
    }

    /// `V = prod beta_i^{n_i}`.
    pub fn volume(&self, s: f64) -> f64 {
        self.spec
            .factors
            .iter()
            .enumerate()
            .map(|(i, f)| self.beta(i, s).value.powi(f.n as i32))
            .product()
    }

    /// Returns `(log V)'` and `(log V)''`.
    pub fn log_volume_derivatives(&self, s: f64) -> Result<(f64, f64)> {
        let mut first = 0.0;
        let mut second = 0.0;
        for (i, f) in self.spec.factors.iter().enumerate() {
            let b = self.beta(i, s);
            if !(b.value > 0.0) {
                return Err(Error::SingularV { s });
            }
            let n = f64::from(f.n);
            let ratio = b.prime / b.value;
            first += n * ratio;
            second += n * (b.second / b.value - ratio * ratio);
        }
        Ok((first, second))
    }

    pub fn log_volume_prime(&self, s: f64) -> Result<f64> {
        self.log_volume_derivatives(s).map(|d| d.0)
    }

    pub fn log_volume_second(&self, s: f64) -> Result<f64> {
        self.log_volume_derivatives(s).map(|d| d.1)
    }

    /// Integrand of the closed-form `alpha`: `V(r) x^(m-2) (E + epsilon x^2 / 2)`.
    pub fn alpha_integrand(&self, r: f64) -> f64 {
        let x = self.params.x(r);
        self.volume(r) * x.powf(self.m() - 2.0) * (self.params.energy + 0.5 * self.epsilon() * x * x)
    }

    /// The integrating factor `V x^(m-1)`.
    pub fn integrating_factor(&self, s: f64) -> f64 {
        self.volume(s) * self.params.x(s).powf(self.m() - 1.0)
    }

    /// Residual of the ansatz ODE for factor `i`, multiplied through by
    /// `beta_i^2` and normalised by the size of its terms.
    pub fn ansatz_residual(&self, i: usize, s: f64) -> f64 {
        let b = self.beta(i, s);
        let q2 = self.spec.factors[i].q_squared();
        let t1 = b.second * b.value;
        let t2 = 0.5 * b.prime * b.prime;
        let t3 = 0.5 * q2;
        (t1 - t2 + t3) / 1f64.max(t1.abs()).max(t2).max(t3)
    }

    /// Residual of each endpoint quadratic: `(left, right)`.
    pub fn endpoint_residuals(&self) -> (f64, f64) {
        let e = self.params.energy;
        let left = endpoint_quadratic(self.params.kappa0, e, self.spec.n_left());
        let right = endpoint_quadratic(-(self.params.s_star + self.params.kappa0), e, self.spec.n_right());
        (left, right)
    }
}
