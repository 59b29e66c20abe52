//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! The stopping rule is measured against the integral of `|f|` rather than
//! `|∫f|`: the boundary defect is driven to zero by the root finder, and a
//! relative criterion on a vanishing integral would never be met.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_614_442,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Weights of the embedded 10-point Gauss rule at `XGK[1], XGK[3], ..., XGK[9]`.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 200,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    /// Estimate of the integral of `|f|`.
    pub l1: f64,
    pub intervals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    l1: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_k = f_center * WGK[10];
    let mut res_abs = res_k.abs();
    let mut res_g = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half.abs();
    let value = res_k * half;
    let l1 = res_abs * scale;
    let error = rescale_error((res_k - res_g) * half, l1, res_asc * scale);
    Panel { a, b, value, error, l1 }
}

/// Integrates `f` over `[a, b]` (either orientation).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            abs_error: 0.0,
            l1: 0.0,
            intervals: 0,
            converged: true,
        };
    }

    let first = gk21(&f, a, b);
    let mut error = first.error;
    let mut l1 = first.l1;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    let target = |l1: f64| cfg.abs_tol.max(cfg.rel_tol * l1);

    while error > target(l1) && heap.len() < cfg.max_subdivisions.max(1) {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        // Interval can no longer be split in floating point.
        if mid == worst.a || mid == worst.b {
            heap.push(worst);
            break;
        }
        let left = gk21(&f, worst.a, mid);
        let right = gk21(&f, mid, worst.b);

        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the panels; the running totals only drive the loop.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value_sum = panels.iter().map(|p| p.value).sum::<f64>();
    let error_sum = panels.iter().map(|p| p.error).sum::<f64>();
    let l1_sum = panels.iter().map(|p| p.l1).sum::<f64>();

    QuadResult {
        value: value_sum,
        abs_error: error_sum,
        l1: l1_sum,
        intervals: panels.len(),
        converged: error_sum <= target(l1_sum),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact_on_one_panel() {
        let r = integrate(|x| 7.0 * x.powi(6) - 3.0 * x * x + 1.0, 0.0, 2.0, &QuadConfig::default());
        assert!((r.value - (128.0 - 8.0 + 2.0)).abs() < 1e-12);
        assert_eq!(r.intervals, 1);
        assert!(r.converged);
    }

    #[test]
    fn smooth_transcendental() {
        let r = integrate(f64::exp, 0.0, 1.0, &QuadConfig::with_rel_tol(1e-13));
        assert!((r.value - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let cfg = QuadConfig {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 1000,
        };
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &cfg);
        assert!((r.value - 2.0).abs() < 1e-8, "{r:?}");
        assert!(r.intervals > 1);
    }

    #[test]
    fn reversed_orientation_negates() {
        let cfg = QuadConfig::default();
        let a = integrate(f64::sin, 0.0, 2.0, &cfg).value;
        let b = integrate(f64::sin, 2.0, 0.0, &cfg).value;
        assert_eq!(a, -b);
    }

    #[test]
    fn cancelling_integrand_uses_l1_scale() {
        // ∫ sin over a full period vanishes; the relative criterion on |f| still converges.
        let r = integrate(f64::sin, 0.0, 2.0 * std::f64::consts::PI, &QuadConfig::default());
        assert!(r.converged);
        assert!(r.value.abs() < 1e-13);
        // l1 is the Kronrod estimate of ∫|sin| = 4 from the panels actually used.
        assert!((r.l1 / 4.0 - 1.0).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn empty_interval() {
        let r = integrate(|_| panic!("not evaluated"), 1.5, 1.5, &QuadConfig::default());
        assert_eq!(r.value, 0.0);
    }
}
