//! Dilogarithm, Clausen and Lobachevsky functions.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;

const TERMS: usize = 40;

/// ζ(2k) for k = 1..=TERMS.
fn zeta_even() -> &'static [f64; TERMS + 1] {
    static Z: OnceLock<[f64; TERMS + 1]> = OnceLock::new();
    Z.get_or_init(|| {
        let mut z = [0.0; TERMS + 1];
        z[1] = PI * PI / 6.0;
        for (k, zk) in z.iter_mut().enumerate().skip(2) {
            let s = 2 * k as i32;
            let sf = s as f64;
            // partial sum plus Euler–Maclaurin tail from n = 64
            let nn = 64.0f64;
            let mut acc = nn.powi(1 - s) / (sf - 1.0) + 0.5 * nn.powi(-s) + sf * nn.powi(-s - 1) / 12.0
                - sf * (sf + 1.0) * (sf + 2.0) * nn.powi(-s - 3) / 720.0;
            for n in (1..64).rev() {
                acc += (n as f64).powi(-s);
            }
            *zk = acc;
        }
        z
    })
}

/// Coefficients `B_{2k}/(2k+1)!` of the series `Li₂(1 − e^{−u})`.
fn dilog_coeffs() -> &'static [f64; TERMS + 1] {
    static C: OnceLock<[f64; TERMS + 1]> = OnceLock::new();
    C.get_or_init(|| {
        let z = zeta_even();
        let mut c = [0.0; TERMS + 1];
        for k in 1..=TERMS {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            c[k] = sign * 2.0 * z[k] / ((2 * k + 1) as f64 * TAU.powi(2 * k as i32));
        }
        c
    })
}

/// Coefficients `|B_{2k}|/(2k(2k+1)!)` of the Clausen series.
fn clausen_coeffs() -> &'static [f64; TERMS + 1] {
    static C: OnceLock<[f64; TERMS + 1]> = OnceLock::new();
    C.get_or_init(|| {
        let z = zeta_even();
        let mut c = [0.0; TERMS + 1];
        for k in 1..=TERMS {
            let kk = (2 * k) as f64;
            c[k] = 2.0 * z[k] / (kk * (kk + 1.0) * TAU.powi(2 * k as i32));
        }
        c
    })
}

/// Series in `u = −log(1 − z)`, valid for |u| < 2π.
fn dilog_bernoulli(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let c = dilog_coeffs();
    let mut acc = u - u2 * 0.25;
    let mut p = u;
    for ck in c.iter().skip(1) {
        p *= u2;
        let t = p * *ck;
        acc += t;
        if t.norm() < 1e-18 * acc.norm() {
            break;
        }
    }
    acc
}

/// Principal branch of the dilogarithm `Li₂(z) = −∫₀^z log(1−u)/u du`.
///
/// Uses the inversion `Li₂(z) = −Li₂(1/z) − π²/6 − ½log²(−z)` outside the
/// unit disk, the reflection `Li₂(z) = π²/6 − log z·log(1−z) − Li₂(1−z)`
/// when `Re z > ½`, and a Bernoulli series otherwise. On the cut (1, ∞)
/// the value from the upper side is returned.
pub fn dilog(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if z.norm_sqr() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if (z - one).norm() == 0.0 {
        return Complex64::new(PI * PI / 6.0, 0.0);
    }
    if z.norm_sqr() > 1.0 {
        let mz = if z.im == 0.0 && z.re > 1.0 {
            // approach the cut from above: −z sits just below the negative axis
            Complex64::new(-z.re, -0.0)
        } else {
            -z
        };
        let l = mz.ln();
        return -dilog(one / z) - PI * PI / 6.0 - 0.5 * l * l;
    }
    if z.re > 0.5 {
        return PI * PI / 6.0 - z.ln() * (one - z).ln() - dilog_bernoulli(one - z);
    }
    dilog_bernoulli(z)
}

/// `Li₂(e^{2iz})`.
pub fn dilog_exp2i(z: Complex64) -> Complex64 {
    dilog((2.0 * Complex64::i() * z).exp())
}

/// Clausen function `Cl₂(φ) = Σ sin(kφ)/k²`.
pub fn clausen2(phi: f64) -> f64 {
    let mut x = phi.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    if x == 0.0 {
        return 0.0;
    }
    let c = clausen_coeffs();
    let x2 = x * x;
    let mut acc = x - x * x.abs().ln();
    let mut p = x;
    for ck in c.iter().skip(1) {
        p *= x2;
        let t = ck * p;
        acc += t;
        if t.abs() < 1e-18 {
            break;
        }
    }
    acc
}

/// Lobachevsky function `Λ(θ) = −∫₀^θ log|2 sin t| dt = ½ Cl₂(2θ)`.
pub fn lobachevsky(theta: f64) -> f64 {
    0.5 * clausen2(2.0 * theta)
}

/// Volume of the regular ideal octahedron, `8Λ(π/4)`.
pub fn v8() -> f64 {
    8.0 * lobachevsky(PI / 4.0)
}
