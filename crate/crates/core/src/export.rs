//! File formats: solution and report JSON, the sampled profile as CSV, and a
//! static SVG plot.
//!
//! Output is byte-deterministic for fixed inputs. JSON floats use the
//! shortest representation that parses back to the same `f64`; CSV floats are
//! written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use crate::closed_form::{coefficient_kinds, ClosedForm, CoefficientKind, RootBranch, SolutionParams};
use crate::metric::{reconstruct_t, MetricProfile, POTENTIAL_CONVENTION};
use crate::solver::{SolvedProfile, SolverConfig};
use crate::spec::BundleSpec;
use crate::verify::{Check, ResidualReport};

/// Everything needed to rebuild a [`SolvedProfile`] without root finding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub spec: BundleSpec,
    pub epsilon: f64,
    pub kappa0: f64,
    pub kappa1: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub mu: f64,
    pub s_star: f64,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub coefficients: Vec<CoefficientKind>,
    /// `D(kappa0) / ∫|integrand|` at the returned root.
    pub defect: f64,
    pub bracket: (f64, f64),
    pub sign_changes: Vec<(f64, f64)>,
    pub roots: Vec<f64>,
    pub solver: SolverConfig,
    /// Relation between `v` and the potential `u` used by the profile export.
    pub convention: String,
}

impl SolutionFile {
    pub fn from_profile(profile: &SolvedProfile) -> Self {
        let closed = profile.closed();
        let p = &closed.params;
        Self {
            spec: closed.spec.clone(),
            epsilon: closed.spec.epsilon,
            kappa0: p.kappa0,
            kappa1: p.kappa1,
            energy: p.energy,
            mu: p.mu,
            s_star: p.s_star,
            a: p.a.clone(),
            coefficients: coefficient_kinds(&closed.spec, &profile.config.branches),
            defect: profile.defect_at_root,
            bracket: profile.bracket_used,
            sign_changes: profile.all_sign_changes.clone(),
            roots: profile.roots.clone(),
            solver: profile.config.clone(),
            convention: POTENTIAL_CONVENTION.to_string(),
        }
    }

    pub fn params(&self) -> SolutionParams {
        SolutionParams {
            kappa0: self.kappa0,
            kappa1: self.kappa1,
            energy: self.energy,
            mu: self.mu,
            s_star: self.s_star,
            a: self.a.clone(),
        }
    }

    /// Rebuilds the profile. The stored scalars must agree with what
    /// `kappa0` implies, otherwise the file is rejected.
    pub fn to_profile(&self) -> anyhow::Result<SolvedProfile> {
        let branches: Vec<RootBranch> = self
            .coefficients
            .iter()
            .map(|k| match k {
                CoefficientKind::Root(b) => *b,
                _ => RootBranch::Negative,
            })
            .collect();
        let rebuilt = SolutionParams::from_kappa0(self.kappa0, self.kappa1, &self.spec, &branches)?;
        let stored = self.params();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * 1f64.max(a.abs());
        if !(close(rebuilt.energy, stored.energy)
            && close(rebuilt.s_star, stored.s_star)
            && close(rebuilt.mu, stored.mu)
            && rebuilt.a.len() == stored.a.len()
            && rebuilt.a.iter().zip(&stored.a).all(|(x, y)| close(*x, *y)))
        {
            bail!("stored E, mu, s_* or A disagree with kappa0 = {}", self.kappa0);
        }
        let mut config = self.solver.clone();
        config.branches = branches;
        let mut solved = SolvedProfile::from_closed_form(ClosedForm::new(self.spec.clone(), stored), config);
        solved.bracket_used = self.bracket;
        solved.all_sign_changes = self.sign_changes.clone();
        solved.roots = self.roots.clone();
        Ok(solved)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn read(path: impl AsRef<Path>) -> anyhow::Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Verification output as written by `qe verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub kappa0: f64,
    pub s_star: f64,
    pub grid_size: usize,
    pub delta: f64,
    pub report: ResidualReport,
    /// Residual of the `t`-coordinate equation.
    pub t_system: Check,
    pub certified: bool,
}

impl ReportFile {
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn read(path: impl AsRef<Path>) -> anyhow::Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_header(rank: usize) -> Vec<String> {
    let mut h = vec!["s".to_string(), "alpha".into(), "alpha_prime".into()];
    h.extend((1..=rank).map(|i| format!("beta_{i}")));
    h.extend(["phi", "V", "t", "f"].map(String::from));
    h.extend((1..=rank).map(|i| format!("g_{i}")));
    h.extend(["v", "u"].map(String::from));
    h
}

/// One CSV row per sample of the reconstructed metric.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub s: f64,
    pub alpha: f64,
    pub alpha_prime: f64,
    pub beta: Vec<f64>,
    pub phi: f64,
    pub volume: f64,
    pub t: f64,
    pub f: f64,
    pub g: Vec<f64>,
    pub v: f64,
    pub u: f64,
}

impl ProfileRow {
    fn fields(&self) -> Vec<f64> {
        let mut out = vec![self.s, self.alpha, self.alpha_prime];
        out.extend(&self.beta);
        out.extend([self.phi, self.volume, self.t, self.f]);
        out.extend(&self.g);
        out.extend([self.v, self.u]);
        out
    }
}

/// Samples the profile on `grid_size` Chebyshev–Lobatto nodes of `[0, s_*]`.
/// Endpoint values of `alpha` and `alpha'` are the one-sided limits.
pub fn profile_rows(profile: &SolvedProfile, grid_size: usize) -> anyhow::Result<(Vec<ProfileRow>, MetricProfile)> {
    let metric = reconstruct_t(profile, grid_size)?;
    let closed = profile.closed();
    let last = metric.samples.len() - 1;
    let rows = metric
        .samples
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let (alpha, alpha_prime) = if k == 0 {
                (0.0, profile.profile.left_slope()?)
            } else if k == last {
                (profile.profile.alpha_at_end()?.0, profile.profile.right_slope()?)
            } else {
                let d = profile.profile.derivatives(m.s)?;
                (d.value, d.prime)
            };
            Ok(ProfileRow {
                s: m.s,
                alpha,
                alpha_prime,
                beta: (0..closed.spec.rank()).map(|i| closed.beta(i, m.s).value).collect(),
                phi: closed.phi(m.s),
                volume: closed.volume(m.s),
                t: m.t,
                f: m.f,
                g: m.g.clone(),
                v: m.v,
                u: m.u,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok((rows, metric))
}

pub fn write_csv<W: std::io::Write>(out: W, rank: usize, rows: &[ProfileRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(rank))?;
    for row in rows {
        w.write_record(row.fields().into_iter().map(fmt_f64))?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a profile CSV back into its header and numeric rows.
pub fn read_csv<R: std::io::Read>(input: R) -> anyhow::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| {
            rec?.iter()
                .map(|x| x.parse::<f64>().with_context(|| format!("bad float {x:?}")))
                .collect()
        })
        .collect::<anyhow::Result<Vec<Vec<f64>>>>()?;
    Ok((header, rows))
}

const WIDTH: f64 = 800.0;
const PANEL: f64 = 300.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Series<'a> {
    label: String,
    color: &'a str,
    points: Vec<(f64, f64)>,
}

fn polyline(out: &mut String, series: &Series, x: impl Fn(f64) -> f64, y: impl Fn(f64) -> f64) {
    let pts: Vec<String> = series
        .points
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|&(s, v)| format!("{:.3},{:.3}", x(s), y(v)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
        series.color,
        pts.join(" ")
    );
}

fn panel(out: &mut String, top: f64, title: &str, y_label: &str, s_star: f64, series: &[Series]) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in series.iter().flat_map(|s| &s.points).filter(|p| p.1.is_finite()) {
        lo = lo.min(p.1);
        hi = hi.max(p.1);
    }
    if !(lo < hi) {
        lo -= 1.0;
        hi += 1.0;
    }
    let left = MARGIN;
    let right = WIDTH - MARGIN;
    let bottom = top + PANEL;
    let x = |s: f64| left + (right - left) * s / s_star;
    let y = |v: f64| bottom - PANEL * (v - lo) / (hi - lo);

    let _ = writeln!(
        out,
        r#"<rect x="{left:.3}" y="{top:.3}" width="{:.3}" height="{PANEL:.3}" fill="none" stroke="black"/>"#,
        right - left
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" font-size="14">{title}</text>"#,
        0.5 * WIDTH,
        top - 8.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" font-size="11" text-anchor="end">{}</text>"#,
        left - 4.0,
        top + 10.0,
        fmt_tick(hi)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{bottom:.3}" font-size="11" text-anchor="end">{}</text>"#,
        left - 4.0,
        fmt_tick(lo)
    );
    let _ = writeln!(
        out,
        r#"<text x="{left:.3}" y="{:.3}" font-size="11">0</text>"#,
        bottom + 14.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{right:.3}" y="{:.3}" font-size="11" text-anchor="end">s = {}</text>"#,
        bottom + 14.0,
        fmt_tick(s_star)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.3}" font-size="11" transform="rotate(-90 14 {:.3})" text-anchor="middle">{y_label}</text>"#,
        top + 0.5 * PANEL,
        top + 0.5 * PANEL
    );
    for (k, s) in series.iter().enumerate() {
        polyline(out, s, x, y);
        let ly = top + 16.0 + 14.0 * k as f64;
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{ly:.3}" font-size="11" fill="{}" text-anchor="end">{}</text>"#,
            right - 6.0,
            s.color,
            s.label
        );
    }
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Two stacked panels: `alpha`, `beta_i` against `s`, and `log10` of the
/// absolute residuals on the verification grid.
pub fn render_svg(profile: &SolvedProfile, rows: &[ProfileRow], report: &ResidualReport) -> String {
    let s_star = profile.s_star();
    let rank = profile.spec().rank();

    let mut top = vec![Series {
        label: "alpha".into(),
        color: COLORS[0],
        points: rows.iter().map(|r| (r.s, r.alpha)).collect(),
    }];
    for i in 0..rank {
        top.push(Series {
            label: format!("beta_{}", i + 1),
            color: COLORS[(i + 1) % COLORS.len()],
            points: rows.iter().map(|r| (r.s, r.beta[i])).collect(),
        });
    }

    let log = |v: f64| v.abs().max(1e-18).log10();
    let mut bottom = vec![
        Series {
            label: "residual_25".into(),
            color: COLORS[0],
            points: report.grid.iter().zip(&report.res_25).map(|(&s, &v)| (s, log(v))).collect(),
        },
        Series {
            label: "residual_26".into(),
            color: COLORS[1],
            points: report.grid.iter().zip(&report.res_26).map(|(&s, &v)| (s, log(v))).collect(),
        },
    ];
    for i in 0..rank {
        bottom.push(Series {
            label: format!("residual_27[{}]", i + 1),
            color: COLORS[(i + 2) % COLORS.len()],
            points: report
                .grid
                .iter()
                .zip(&report.res_27)
                .map(|(&s, r)| (s, log(r[i])))
                .collect(),
        });
    }

    let height = 2.0 * PANEL + 3.0 * MARGIN;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    panel(&mut out, MARGIN, "profiles", "value", s_star, &top);
    panel(&mut out, 2.0 * MARGIN + PANEL, "residuals", "log10 |residual|", s_star, &bottom);
    out.push_str("</svg>\n");
    out
}
