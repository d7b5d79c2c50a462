//! The single-tetrahedron potentials U (holomorphic) and V (real), their
//! gradients, and the stationary variable ξ(α).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::special::{dilog_exp2i, lobachevsky};
use crate::error::{Error, Result};
use crate::qcore::{hyperideal_angles, QUADS, TRIPLES};

pub(crate) const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Six (possibly complex) angles with derived half-sums τ (vertex triples)
/// and η (quadruples).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleSixTuple {
    pub alpha: [Complex64; 6],
}

impl AngleSixTuple {
    pub fn new(alpha: [Complex64; 6]) -> Self {
        AngleSixTuple { alpha }
    }

    pub fn real(alpha: [f64; 6]) -> Self {
        AngleSixTuple {
            alpha: alpha.map(c),
        }
    }

    pub fn tau(&self) -> [Complex64; 4] {
        TRIPLES.map(|t| 0.5 * (self.alpha[t[0]] + self.alpha[t[1]] + self.alpha[t[2]]))
    }

    pub fn eta(&self) -> [Complex64; 3] {
        QUADS.map(|q| 0.5 * (self.alpha[q[0]] + self.alpha[q[1]] + self.alpha[q[2]] + self.alpha[q[3]]))
    }

    pub fn re(&self) -> [f64; 6] {
        self.alpha.map(|a| a.re)
    }
}

/// `d/dx Li₂(e^{2ix}) = −2i log(1 − e^{2ix})`.
pub fn dlog_term(x: Complex64) -> Complex64 {
    -2.0 * I * (c(1.0) - (2.0 * I * x).exp()).ln()
}

/// Second derivative `−4e^{2ix}/(1 − e^{2ix})`.
pub fn d2log_term(x: Complex64) -> Complex64 {
    let e = (2.0 * I * x).exp();
    -4.0 * e / (c(1.0) - e)
}

/// `(Re α, Re ξ)` lies in the closure of the hyperideal domain B_H.
pub fn in_domain(a: &AngleSixTuple, xi: Complex64) -> bool {
    let re = a.re();
    if !hyperideal_angles(&re) {
        return false;
    }
    let tmax = a.tau().iter().map(|t| t.re).fold(f64::MIN, f64::max);
    let emin = a.eta().iter().map(|e| e.re).fold(2.0 * PI, f64::min);
    let tol = 1e-12;
    xi.re >= tmax - tol && xi.re <= emin + tol
}

/// U(α, ξ) without domain checks.
pub fn u_value(a: &AngleSixTuple, xi: Complex64) -> Complex64 {
    let tau = a.tau();
    let eta = a.eta();
    let pi = c(PI);
    let mut v = c(PI * PI) + (xi - pi) * (xi - pi) - c(PI * PI / 3.0);
    for t in &tau {
        v -= 0.5 * (t - pi) * (t - pi);
        v -= (xi - t) * (xi - t);
        v += 0.5 * dilog_exp2i(t - pi);
        v += dilog_exp2i(xi - t);
        for e in &eta {
            v += 0.5 * (e - t) * (e - t);
            v -= 0.5 * dilog_exp2i(e - t);
        }
    }
    for e in &eta {
        v -= (e - xi) * (e - xi);
        v += dilog_exp2i(e - xi);
    }
    v - dilog_exp2i(xi - pi)
}

/// U(α, ξ) with a check that (Re α, Re ξ) is in the domain.
pub fn u_potential(a: &AngleSixTuple, xi: Complex64) -> Result<Complex64> {
    if !in_domain(a, xi) {
        return Err(Error::Domain(format!("U at α = {:?}, ξ = {xi}", a.alpha)));
    }
    Ok(u_value(a, xi))
}

/// `∂U/∂ξ`.
pub fn u_dxi(a: &AngleSixTuple, xi: Complex64) -> Complex64 {
    let pi = c(PI);
    let mut g = 2.0 * (xi - pi) - dlog_term(xi - pi);
    for t in &a.tau() {
        g += -2.0 * (xi - t) + dlog_term(xi - t);
    }
    for e in &a.eta() {
        g += 2.0 * (e - xi) - dlog_term(e - xi);
    }
    g
}

/// `∂²U/∂ξ²`.
pub fn u_dxi2(a: &AngleSixTuple, xi: Complex64) -> Complex64 {
    let pi = c(PI);
    let mut h = c(-12.0) - d2log_term(xi - pi);
    for t in &a.tau() {
        h += d2log_term(xi - t);
    }
    for e in &a.eta() {
        h += d2log_term(e - xi);
    }
    h
}

/// `∂U/∂α_k` for k = 1..6 (ξ held fixed).
pub fn u_dalpha(a: &AngleSixTuple, xi: Complex64) -> [Complex64; 6] {
    let tau = a.tau();
    let eta = a.eta();
    let pi = c(PI);
    let mut dtau = [c(0.0); 4];
    let mut deta = [c(0.0); 3];
    for (i, t) in tau.iter().enumerate() {
        let mut d = -(t - pi) + 2.0 * (xi - t) + 0.5 * dlog_term(t - pi) - dlog_term(xi - t);
        for e in &eta {
            d += -(e - t) + 0.5 * dlog_term(e - t);
        }
        dtau[i] = d;
    }
    for (j, e) in eta.iter().enumerate() {
        let mut d = -2.0 * (e - xi) + dlog_term(e - xi);
        for t in &tau {
            d += (e - t) - 0.5 * dlog_term(e - t);
        }
        deta[j] = d;
    }
    let mut g = [c(0.0); 6];
    for (i, tr) in TRIPLES.iter().enumerate() {
        for &k in tr {
            g[k] += 0.5 * dtau[i];
        }
    }
    for (j, qd) in QUADS.iter().enumerate() {
        for &k in qd {
            g[k] += 0.5 * deta[j];
        }
    }
    g
}

fn delta(x: f64, y: f64, z: f64) -> f64 {
    -0.5 * lobachevsky((x + y - z) / 2.0) - 0.5 * lobachevsky((y + z - x) / 2.0)
        - 0.5 * lobachevsky((z + x - y) / 2.0)
        + 0.5 * lobachevsky((x + y + z) / 2.0)
}

/// The real potential V, with `U = 2π² + 2iV` on real points of the domain.
pub fn v_value(alpha: &[f64; 6], xi: f64) -> f64 {
    let a = AngleSixTuple::real(*alpha);
    let mut v: f64 = TRIPLES
        .iter()
        .map(|t| delta(alpha[t[0]], alpha[t[1]], alpha[t[2]]))
        .sum();
    v -= lobachevsky(xi);
    for t in &a.tau() {
        v += lobachevsky(xi - t.re);
    }
    for e in &a.eta() {
        v += lobachevsky(e.re - xi);
    }
    v
}

/// V with a domain check.
pub fn v_potential(alpha: &[f64; 6], xi: f64) -> Result<f64> {
    let a = AngleSixTuple::real(*alpha);
    if !in_domain(&a, c(xi)) {
        return Err(Error::Domain(format!("V at α = {alpha:?}, ξ = {xi}")));
    }
    Ok(v_value(alpha, xi))
}

/// The stationary point ξ(α) of U in ξ, found by Newton's method from the
/// middle of the admissible interval.
pub fn xi_of_alpha(a: &AngleSixTuple) -> Result<Complex64> {
    let guard = 0.3;
    if !hyperideal_angles(&a.re()) || a.alpha.iter().any(|x| x.im.abs() > guard) {
        return Err(Error::Domain(format!(
            "ξ(α) needs hyperideal Re α and |Im α| ≤ {guard}: {:?}",
            a.alpha
        )));
    }
    let tmax = a.tau().iter().map(|t| t.re).fold(f64::MIN, f64::max);
    let emin = a.eta().iter().map(|e| e.re).fold(2.0 * PI, f64::min);
    let im_seed = a.alpha.iter().map(|x| x.im).sum::<f64>() / 6.0 * 1.5;
    let mut xi = Complex64::new(0.5 * (tmax + emin), im_seed);
    for _ in 0..100 {
        let g = u_dxi(a, xi);
        if g.norm() <= 1e-14 {
            break;
        }
        let mut step = -g / u_dxi2(a, xi);
        // keep the real part inside the admissible interval
        let mut lambda = 1.0;
        loop {
            let trial = xi + step * lambda;
            if trial.re > tmax && trial.re < emin && u_dxi(a, trial).norm() < g.norm() {
                xi = trial;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                step = c(0.0);
                break;
            }
        }
        if step == c(0.0) {
            break;
        }
    }
    let res = u_dxi(a, xi).norm();
    if res > 1e-10 {
        return Err(Error::NoConvergence(format!("ξ(α) residual {res:.3e}")));
    }
    Ok(xi)
}

/// Volume and edge lengths of a truncated hyperideal tetrahedron.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TetVolume {
    pub volume: f64,
    pub edge_lengths: [f64; 6],
    pub xi: f64,
    /// Some dihedral angle is zero, so that edge degenerates to a cusp and
    /// its length is reported as the limiting derivative.
    pub degenerate: bool,
}

/// Volume of the truncated hyperideal tetrahedron with dihedral angles θ.
///
/// Uses `α_i = π − θ_i`, so `V(α, ξ(α))` is the volume of the tetrahedron
/// with angles `|α − π| = θ`, and the edge lengths `l_i = −2∂U/∂u_i` with
/// `u_i = 2iθ_i` satisfy the Schläfli formula `∂Vol/∂θ_i = −l_i/2`.
pub fn tet_volume(theta: &[f64; 6]) -> Result<TetVolume> {
    if theta.iter().any(|&t| !(0.0..=PI).contains(&t)) {
        return Err(Error::Domain(format!("dihedral angles {theta:?} out of [0, π]")));
    }
    let alpha = theta.map(|t| PI - t);
    if !hyperideal_angles(&alpha) {
        return Err(Error::Domain(format!("angles {theta:?} are not of hyperideal type")));
    }
    let a = AngleSixTuple::real(alpha);
    let xi = xi_of_alpha(&a)?;
    let grad = u_dalpha(&a, xi);
    Ok(TetVolume {
        volume: v_value(&alpha, xi.re),
        // l = −2 ∂U/∂u, ∂U/∂u = −(∂U/∂α)/(2i)
        edge_lengths: grad.map(|g| (-I * g).re),
        xi: xi.re,
        degenerate: theta.iter().any(|&t| t < 1e-12),
    })
}

/// Finite-difference second partials of V at (π,…,π, 7π/4), indexed
/// (α_1, …, α_6, ξ).
#[derive(Clone, Debug, Serialize)]
pub struct HessianProbe {
    pub matrix: [[f64; 7]; 7],
    /// ∂²V/∂α_1².
    pub alpha_alpha: f64,
    /// ∂²V/∂α_1∂α_2 (two edges sharing a vertex).
    pub alpha_pair: f64,
    /// ∂²V/∂α_1∂ξ.
    pub alpha_xi: f64,
    /// ∂²V/∂ξ².
    pub xi_xi: f64,
}

/// Second partials of V at the symmetric point by central differences.
pub fn hessian_probe() -> HessianProbe {
    let mut x0 = [PI; 7];
    x0[6] = 7.0 * PI / 4.0;
    let f = |x: &[f64; 7]| {
        let alpha = [x[0], x[1], x[2], x[3], x[4], x[5]];
        v_value(&alpha, x[6])
    };
    let h = 1e-3;
    let mut m = [[0.0; 7]; 7];
    // Richardson-refined central differences: (4·D(h/2) − D(h))/3
    let second = |i: usize, j: usize, h: f64| -> f64 {
        let at = |si: f64, sj: f64| {
            let mut x = x0;
            x[i] += si;
            x[j] += sj;
            f(&x)
        };
        if i == j {
            (at(h, 0.0) - 2.0 * f(&x0) + at(-h, 0.0)) / (h * h)
        } else {
            (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h)
        }
    };
    for i in 0..7 {
        for j in i..7 {
            let d = (4.0 * second(i, j, h / 2.0) - second(i, j, h)) / 3.0;
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    HessianProbe {
        matrix: m,
        alpha_alpha: m[0][0],
        alpha_pair: m[0][1],
        alpha_xi: m[0][6],
        xi_xi: m[6][6],
    }
}
