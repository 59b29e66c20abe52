//! Reference implementations that share no numerical code with the library:
//! a fixed-grid Simpson rule with bisection for the boundary defect, and the
//! exact polynomial antiderivative of the `alpha` integrand for integer `m`.
#![allow(dead_code)]

use quasi_einstein::{BundleSpec, EndpointType, FactorSpec};

/// `kappa0*` from the 40-digit Simpson + bisection script in `tests/oracles`.
pub const KAPPA0_REFERENCE_M2: f64 = 8.277821245768487;
pub const KAPPA0_LEFT_BLOWDOWN_M2: f64 = 20.842223363326086;

/// Further roots from the same script, `(m, kappa0*)`.
pub const KAPPA0_REFERENCE_SWEEP: [(f64, f64); 6] = [
    (1.5, 6.566820245574194),
    (2.0, 8.277821245768487),
    (3.0, 11.52864296778085),
    (4.0, 14.661814895260683),
    (8.0, 26.774611654544102),
    (32.0, 97.54394353370994),
];
pub const KAPPA0_LEFT_BLOWDOWN_SWEEP: [(f64, f64); 5] = [
    (1.5, 17.778013176783262),
    (2.0, 20.842223363326086),
    (4.0, 33.13965554454991),
    (8.0, 57.79740116373747),
    (32.0, 205.9361579515164),
];

pub const SIMPSON_PANELS: usize = 1 << 14;

pub fn reference_spec(m: f64) -> BundleSpec {
    BundleSpec::collapse(vec![FactorSpec::new(2, 3, 1)], m)
}

pub fn left_blowdown_spec(m: f64) -> BundleSpec {
    BundleSpec::new(
        vec![FactorSpec::new(1, 2, 1), FactorSpec::new(1, 3, 1)],
        m,
        EndpointType::Blowdown,
        EndpointType::SmoothCollapse,
    )
}

/// `(E, s_*, A_i)` from the endpoint conditions, written out directly.
pub fn setup(kappa0: f64, spec: &BundleSpec) -> (f64, f64, Vec<f64>) {
    let r = spec.factors.len();
    let n_l = if spec.left == EndpointType::Blowdown { spec.factors[0].n } else { 0 } as f64;
    let n_r = if spec.right == EndpointType::Blowdown { spec.factors[r - 1].n } else { 0 } as f64;
    let e = kappa0 * kappa0 / 2.0 + 2.0 * (n_l + 1.0) * kappa0;
    let x_end = 2.0 * (n_r + 1.0) + (4.0 * (n_r + 1.0).powi(2) + 2.0 * e).sqrt();
    let a = spec
        .factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if i == 0 && spec.left == EndpointType::Blowdown {
                1.0 / (2.0 * kappa0)
            } else if i == r - 1 && spec.right == EndpointType::Blowdown {
                -1.0 / (2.0 * x_end)
            } else {
                let (p, q) = (f.p as f64, f.q as f64);
                (p - (p * p + e * q * q / 2.0).sqrt()) / (2.0 * e)
            }
        })
        .collect();
    (e, x_end - kappa0, a)
}

fn integrand(r: f64, kappa0: f64, e: f64, a: &[f64], spec: &BundleSpec) -> f64 {
    let x = r + kappa0;
    let v: f64 = spec
        .factors
        .iter()
        .zip(a)
        .map(|(f, &a)| (a * x * x - (f.q as f64).powi(2) / (4.0 * a)).powi(f.n as i32))
        .product();
    v * x.powf(spec.m - 2.0) * (e - x * x / 2.0)
}

/// Composite Simpson `D(kappa0)` and `∫|integrand|`.
pub fn simpson_defect(kappa0: f64, spec: &BundleSpec) -> (f64, f64) {
    let (e, s_star, a) = setup(kappa0, spec);
    let h = s_star / SIMPSON_PANELS as f64;
    let (mut total, mut abs) = (0.0, 0.0);
    for k in 0..=SIMPSON_PANELS {
        let w = if k == 0 || k == SIMPSON_PANELS {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let f = integrand(k as f64 * h, kappa0, e, &a, spec);
        total += w * f;
        abs += w * f.abs();
    }
    (total * h / 3.0, abs * h / 3.0)
}

pub fn simpson_root(spec: &BundleSpec, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = simpson_defect(lo, spec).0;
    assert!(f_lo * simpson_defect(hi, spec).0 < 0.0, "no sign change in [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = simpson_defect(mid, spec).0;
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Dense polynomial in `s`, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn pow(&self, n: u32) -> Poly {
        (0..n).fold(Poly(vec![1.0]), |acc, _| acc.mul(self))
    }

    pub fn antiderivative(&self) -> Poly {
        let mut out = vec![0.0];
        out.extend(self.0.iter().enumerate().map(|(k, c)| c / (k as f64 + 1.0)));
        Poly(out)
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }
}

/// `alpha(s) = ∫_0^s P / (V x^(m-1))` with `P` integrated exactly; `m` must be
/// an integer `>= 2`.
pub fn exact_alpha(kappa0: f64, spec: &BundleSpec, s: f64) -> f64 {
    let m = spec.m;
    assert!(m.fract() == 0.0 && m >= 2.0);
    let (e, _, a) = setup(kappa0, spec);
    let x = Poly(vec![kappa0, 1.0]);
    let mut p = Poly(vec![1.0]);
    for (f, &a) in spec.factors.iter().zip(&a) {
        let q2 = (f.q as f64).powi(2);
        let beta = Poly(vec![a * kappa0 * kappa0 - q2 / (4.0 * a), 2.0 * a * kappa0, a]);
        p = p.mul(&beta.pow(f.n));
    }
    let weight_poly = p.clone();
    p = p.mul(&x.pow(m as u32 - 2));
    p = p.mul(&Poly(vec![e - kappa0 * kappa0 / 2.0, -kappa0, -0.5]));
    let integral = p.antiderivative().eval(s);
    let weight = weight_poly.eval(s) * (s + kappa0).powi(m as i32 - 1);
    integral / weight
}
