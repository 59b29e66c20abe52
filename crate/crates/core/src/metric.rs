//! Arclength coordinate `t` with `ds = f dt`, `f = sqrt(alpha)`, and the
//! metric functions `f(t)`, `g_i(t) = sqrt(beta_i)`, `v(t) = phi`.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadConfig};
use crate::solver::{chebyshev_nodes, SolvedProfile};

/// Relation assumed between the warping function `v` and the potential `u`.
pub const POTENTIAL_CONVENTION: &str = "u = -m log v (v = exp(-u/m))";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub t: f64,
    pub s: f64,
    pub f: f64,
    pub g: Vec<f64>,
    pub v: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricProfile {
    pub samples: Vec<MetricSample>,
    pub total_length_l: f64,
    pub convention: String,
}

/// `dt/ds = 1/sqrt(alpha)` integrated on `[a, b]` in the interior.
fn t_increment(profile: &SolvedProfile, a: f64, b: f64, quad: &QuadConfig) -> Result<f64> {
    let bad = Cell::new(None);
    let r = integrate(
        |s| match profile.profile.alpha_imposed(s) {
            Ok(v) if v > 0.0 => 1.0 / v.sqrt(),
            Ok(v) => {
                bad.set(Some((s, v)));
                0.0
            }
            Err(_) => {
                bad.set(Some((s, f64::NAN)));
                0.0
            }
        },
        a,
        b,
        quad,
    );
    match bad.get() {
        Some((s, value)) => Err(Error::NonPositiveAlpha { s, value }),
        None => Ok(r.value),
    }
}

/// `∫ ds / sqrt(alpha)` from the nearer endpoint, with `r = end ∓ w^2`
/// removing the `1/sqrt` singularity where `alpha ~ 2 |s - end|`.
fn t_from_end(profile: &SolvedProfile, w_lo: f64, w_hi: f64, left: bool, quad: &QuadConfig) -> Result<f64> {
    let s_star = profile.s_star();
    let bad = Cell::new(None);
    let r = integrate(
        |w| {
            let s = if left { w * w } else { s_star - w * w };
            // alpha ~ 2 |s - end| at either kind of end.
            if s <= 0.0 || s >= s_star {
                return std::f64::consts::SQRT_2;
            }
            match profile.profile.alpha_imposed(s) {
                Ok(v) if v > 0.0 => 2.0 * w / v.sqrt(),
                Ok(v) => {
                    bad.set(Some((s, v)));
                    0.0
                }
                Err(_) => {
                    bad.set(Some((s, f64::NAN)));
                    0.0
                }
            }
        },
        w_lo,
        w_hi,
        quad,
    );
    match bad.get() {
        Some((s, value)) => Err(Error::NonPositiveAlpha { s, value }),
        None => Ok(r.value),
    }
}

fn t_quad(profile: &SolvedProfile) -> QuadConfig {
    QuadConfig {
        rel_tol: profile.profile.quad.rel_tol.max(1e-12),
        abs_tol: 0.0,
        max_subdivisions: 100,
    }
}

/// `t(s)` at increasing nodes in `[0, s_*]`, plus the total length `l`.
pub fn t_at_nodes(profile: &SolvedProfile, nodes: &[f64]) -> Result<(Vec<f64>, f64)> {
    let s_star = profile.s_star();
    let half = 0.5 * s_star;
    let quad = t_quad(profile);

    let w_half = half.sqrt();
    let left_total = t_from_end(profile, 0.0, w_half, true, &quad)?;
    let right_total = t_from_end(profile, 0.0, w_half, false, &quad)?;
    let length = left_total + right_total;

    let mut t = vec![0.0; nodes.len()];
    // Left half, accumulated outward from s = 0.
    let mut w_prev = 0.0;
    let mut acc = 0.0;
    for (k, &s) in nodes.iter().enumerate().filter(|(_, &s)| s <= half) {
        let w = s.max(0.0).sqrt();
        acc += t_from_end(profile, w_prev, w, true, &quad)?;
        t[k] = acc;
        w_prev = w;
    }
    // Right half, accumulated inward from s = s_*.
    let mut w_prev = 0.0;
    let mut acc = 0.0;
    for (k, &s) in nodes.iter().enumerate().rev().filter(|(_, &s)| s > half) {
        let w = (s_star - s).max(0.0).sqrt();
        acc += t_from_end(profile, w_prev, w, false, &quad)?;
        t[k] = length - acc;
        w_prev = w;
    }
    Ok((t, length))
}

/// Reconstructs the metric on `grid_size` Chebyshev–Lobatto nodes of `[0, s_*]`.
pub fn reconstruct_t(profile: &SolvedProfile, grid_size: usize) -> Result<MetricProfile> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument("grid_size must be >= 2".into()));
    }
    let s_star = profile.s_star();
    let closed = profile.closed();
    let nodes = chebyshev_nodes(0.0, s_star, grid_size);

    for &s in &nodes[1..grid_size - 1] {
        let a = profile.profile.alpha(s)?;
        if !(a > 0.0) {
            return Err(Error::NonPositiveAlpha { s, value: a });
        }
    }

    let (t, length) = t_at_nodes(profile, &nodes)?;
    let (alpha_end, _) = profile.profile.alpha_at_end()?;
    let m = closed.m();

    let samples = nodes
        .iter()
        .zip(&t)
        .enumerate()
        .map(|(k, (&s, &t))| {
            let alpha = if k == 0 {
                0.0
            } else if k == grid_size - 1 {
                alpha_end
            } else {
                profile.profile.alpha(s)?
            };
            let v = closed.phi(s);
            Ok(MetricSample {
                t,
                s,
                f: alpha.max(0.0).sqrt(),
                g: (0..closed.spec.rank())
                    .map(|i| closed.beta(i, s).value.max(0.0).sqrt())
                    .collect(),
                v,
                u: -m * v.ln(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(MetricProfile {
        samples,
        total_length_l: length,
        convention: POTENTIAL_CONVENTION.to_string(),
    })
}

/// Three-point derivatives on a nonuniform stencil with spacings `h1`, `h2`.
fn nonuniform_derivatives(h1: f64, h2: f64, y: [f64; 3]) -> (f64, f64) {
    let first = -h2 / (h1 * (h1 + h2)) * y[0] + (h2 - h1) / (h1 * h2) * y[1] + h1 / (h2 * (h1 + h2)) * y[2];
    let second = 2.0 * (y[0] / (h1 * (h1 + h2)) - y[1] / (h1 * h2) + y[2] / (h2 * (h1 + h2)));
    (first, second)
}

/// `t`-spacings of the stencil `s - h, s, s + h`.
fn t_stencil(profile: &SolvedProfile, s: f64, h: f64) -> Result<(f64, f64)> {
    let quad = t_quad(profile);
    Ok((
        t_increment(profile, s - h, s, &quad)?,
        t_increment(profile, s, s + h, &quad)?,
    ))
}

fn stencil_step(s_star: f64, s: f64, rel: f64) -> f64 {
    (rel * s_star).min(0.25 * s.min(s_star - s))
}

/// Residual of the `f`-equation in the `t` coordinate
/// (`f''/f + sum(2 n f' g_i'/(f g_i) - n q^2 f^2 / (2 g_i^4)) + m f' v'/(f v) = epsilon/2`)
/// at interior Chebyshev nodes, derivatives by nonuniform finite differences.
pub fn t_system_residuals(profile: &SolvedProfile, grid_size: usize) -> Result<Vec<(f64, f64)>> {
    let s_star = profile.s_star();
    let closed = profile.closed();
    let spec = &closed.spec;
    let delta = 1e-2 * s_star;
    let nodes = chebyshev_nodes(delta, s_star - delta, grid_size.max(2));

    nodes
        .iter()
        .map(|&s| {
            let h = stencil_step(s_star, s, 1e-4);
            let (h1, h2) = t_stencil(profile, s, h)?;
            let pts = [s - h, s, s + h];
            let mut f = [0.0; 3];
            let mut v = [0.0; 3];
            for (j, &x) in pts.iter().enumerate() {
                f[j] = profile.profile.alpha(x)?.sqrt();
                v[j] = closed.phi(x);
            }
            let (f1, f2) = nonuniform_derivatives(h1, h2, f);
            let (v1, _) = nonuniform_derivatives(h1, h2, v);
            let f0 = f[1];

            let mut lhs = f2 / f0 + spec.m * f1 * v1 / (f0 * v[1]);
            for (i, factor) in spec.factors.iter().enumerate() {
                let mut g = [0.0; 3];
                for (j, &x) in pts.iter().enumerate() {
                    g[j] = closed.beta(i, x).value.sqrt();
                }
                let (g1, _) = nonuniform_derivatives(h1, h2, g);
                let n = f64::from(factor.n);
                lhs += 2.0 * n * f1 * g1 / (f0 * g[1]) - 0.5 * n * factor.q_squared() * f0 * f0 / g[1].powi(4);
            }
            Ok((s, lhs - 0.5 * spec.epsilon))
        })
        .collect()
}

/// `max |ds/dt / sqrt(alpha) - 1|` at interior nodes, `ds/dt` from differencing `t(s)`.
pub fn arclength_consistency(profile: &SolvedProfile, grid_size: usize) -> Result<f64> {
    let s_star = profile.s_star();
    let delta = 1e-2 * s_star;
    let mut worst: f64 = 0.0;
    for s in chebyshev_nodes(delta, s_star - delta, grid_size.max(2)) {
        let h = stencil_step(s_star, s, 1e-5);
        let (h1, h2) = t_stencil(profile, s, h)?;
        let (ds_dt, _) = nonuniform_derivatives(h1, h2, [s - h, s, s + h]);
        let f = profile.profile.alpha(s)?.sqrt();
        worst = worst.max((ds_dt / f - 1.0).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonuniform_stencil_exact_on_quadratics() {
        let f = |x: f64| 3.0 * x * x - 2.0 * x + 1.0;
        let (h1, h2) = (0.1, 0.17);
        let (d1, d2) = nonuniform_derivatives(h1, h2, [f(0.5 - h1), f(0.5), f(0.5 + h2)]);
        assert!((d1 - 1.0).abs() < 1e-12);
        assert!((d2 - 6.0).abs() < 1e-10);
    }
}
