//! The quantum dilogarithm φ_r, defined for −π/r < Re z < π + π/r by
//!
//! ```text
//! φ_r(z) = (4πi/r) ∫_Ω exp((2z − π)x) / (4x sinh(πx) sinh(2πx/r)) dx
//! ```
//!
//! where Ω runs along the real line and passes above the origin on a small
//! semicircle. Values elsewhere come from the shift recursion, which makes
//! φ_r meromorphic on ℂ.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qcore::RootContext;
use crate::quad;

/// Default radius of the semicircle around the origin.
pub const DEFAULT_RADIUS: f64 = 0.5;
/// Minimum distance from the edge of the principal strip for direct quadrature.
pub const STRIP_MARGIN: f64 = 1e-6;
/// Minimum distance from a pole for the extended function.
pub const POLE_GUARD: f64 = 1e-8;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn ci(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Principal branch of `log(1 − e^{2iz})`.
pub fn log_one_minus_e2i(z: Complex64) -> Complex64 {
    (ci(1.0) - (2.0 * I * z).exp()).ln()
}

/// Check strip membership with the direct-quadrature margin.
pub fn in_strip(r: u32, z: Complex64) -> bool {
    let rf = r as f64;
    z.re > -PI / rf + STRIP_MARGIN && z.re < PI + PI / rf - STRIP_MARGIN
}

/// φ_r(z) by quadrature, radius [`DEFAULT_RADIUS`].
pub fn phi_r(ctx: &RootContext, z: Complex64) -> Result<Complex64> {
    phi_r_radius(ctx.r(), z, DEFAULT_RADIUS)
}

/// φ_r(z) with an explicit semicircle radius in (0, 1).
pub fn phi_r_radius(r: u32, z: Complex64, eps: f64) -> Result<Complex64> {
    if !in_strip(r, z) {
        return Err(Error::OutsideStrip(format!("{z}")));
    }
    let rf = r as f64;
    let w = 2.0 * z - ci(PI);
    let k = PI + 2.0 * PI / rf;
    // integral scale is O(r); aim for 1e-13 absolute on φ_r itself
    let abs_tol = 1e-13 * rf / (4.0 * PI);
    let rel_tol = 1e-14;

    // Both rays folded onto [eps, ∞). With the sinh factors written as
    // exponentials, the integrand is
    // (e^{(w−k)x} − e^{−(w+k)x}) / (x (1 − e^{−2πx}) (1 − e^{−4πx/r})).
    let ray = |x: f64| -> Complex64 {
        let num = ((w - k) * x).exp() - ((-w - k) * x).exp();
        let den = x * (-(-2.0 * PI * x).exp_m1()) * (-(-4.0 * PI * x / rf).exp_m1());
        num / den
    };
    let decay = (k - w.re.abs()).max(1e-300);
    let mut rays = Complex64::new(0.0, 0.0);
    let (mut a, mut b) = (eps, 1.0f64.max(2.0 * eps));
    loop {
        let (v, _) = quad::integrate(&ray, a, b, abs_tol, rel_tol)?;
        rays += v;
        // remaining tail is bounded by ∫_b^∞ e^{−decay x}/x dx·(prefactor ≤ 2/((1−e^{−2πε})(1−e^{−4πε/r})))
        let pref = 2.0 / ((-(-2.0 * PI * eps).exp_m1()) * (-(-4.0 * PI * b / rf).exp_m1()));
        let tail = pref * (-decay * b).exp() / (decay * b);
        if tail < abs_tol * 1e-2 {
            break;
        }
        if b > 1e12 {
            return Err(Error::Quadrature(format!(
                "ray tail bound {tail:.3e} not met for z = {z}"
            )));
        }
        a = b;
        b *= 2.0;
    }

    let f = |x: Complex64| -> Complex64 {
        (w * x).exp() / (4.0 * x * (PI * x).sinh() * (2.0 * PI * x / rf).sinh())
    };
    // upper semicircle from −eps to eps: x = eps·e^{iθ}, θ from π down to 0
    let arc = |t: f64| -> Complex64 {
        let x = Complex64::from_polar(eps, t);
        -(f(x) * I * x)
    };
    let (arc_val, _) = quad::integrate(&arc, 0.0, PI, abs_tol, rel_tol)?;

    Ok(4.0 * PI * I / rf * (rays + arc_val))
}

/// Distance from `z` to the nearest pole of the extended φ_r.
///
/// Poles sit at `(a+1)π + bπ/r` and `−aπ − bπ/r` for a ≥ 0 and odd b > 0,
/// that is at `jπ/r` for integers `j ≥ r+1` with `j − r(a+1)` odd, and
/// `j ≤ −1` with `−j − ra` odd.
pub fn pole_distance(r: u32, z: Complex64) -> f64 {
    let ri = r as i64;
    let rf = r as f64;
    let j0 = (z.re * rf / PI).round() as i64;
    let mut best = f64::INFINITY;
    for j in (j0 - 2)..=(j0 + 2) {
        if is_pole_index(ri, j) {
            let p = Complex64::new(j as f64 * PI / rf, 0.0);
            best = best.min((z - p).norm());
        }
    }
    best
}

fn is_pole_index(r: i64, j: i64) -> bool {
    if j >= r + 1 {
        // j = r(a+1) + b with b odd, 1 ≤ b; some a ≥ 0 with j − r(a+1) ≥ 1 odd
        let mut a1 = 1;
        while r * a1 < j {
            if (j - r * a1) % 2 == 1 {
                return true;
            }
            a1 += 1;
        }
        false
    } else if j <= -1 {
        let m = -j;
        let mut a = 0;
        while r * a < m {
            if (m - r * a) % 2 == 1 {
                return true;
            }
            a += 1;
        }
        false
    } else {
        false
    }
}

/// Meromorphic continuation of φ_r to ℂ.
///
/// Points with `0 ≤ Re z ≤ π` are evaluated directly. Points to the right
/// are shifted left by `2nπ/r` into `(π − 2π/r, π]` and use
/// `φ(z) = φ(z − 2nπ/r) − (4πi/r) Σ_{k=1}^{n} log(1 − e^{2i(z − (2k−1)π/r)})`;
/// points to the left are shifted right by the same recursion.
pub fn phi_r_extended(ctx: &RootContext, z: Complex64) -> Result<Complex64> {
    phi_extended_with(ctx.r(), z, |w| phi_r_radius(ctx.r(), w, DEFAULT_RADIUS))
}

pub(crate) fn phi_extended_with<F>(r: u32, z: Complex64, direct: F) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let d = pole_distance(r, z);
    if d < POLE_GUARD {
        return Err(Error::NearPole {
            point: format!("{z}"),
            dist: d,
        });
    }
    let rf = r as f64;
    let step = 2.0 * PI / rf;
    let pref = 4.0 * PI * I / rf;
    if z.re > PI {
        let n = ((z.re - PI) / step).ceil() as i64;
        let base = direct(z - step * n as f64)?;
        let s: Complex64 = (1..=n)
            .map(|k| log_one_minus_e2i(z - (2 * k - 1) as f64 * PI / rf))
            .sum();
        Ok(base - pref * s)
    } else if z.re < 0.0 {
        let n = (-z.re / step).ceil() as i64;
        let zp = z + step * n as f64;
        let base = direct(zp)?;
        let s: Complex64 = (1..=n)
            .map(|k| log_one_minus_e2i(zp - (2 * k - 1) as f64 * PI / rf))
            .sum();
        Ok(base + pref * s)
    } else {
        direct(z)
    }
}

/// φ_r at the lattice points `jπ/r`, `0 ≤ j ≤ r`, computed once.
#[derive(Clone, Debug)]
pub struct PhiTable {
    r: u32,
    values: Vec<Complex64>,
}

impl PhiTable {
    pub fn new(ctx: &RootContext) -> Result<PhiTable> {
        let r = ctx.r();
        let values: Result<Vec<Complex64>> = (0..=r as i64)
            .into_par_iter()
            .map(|j| phi_r_radius(r, ci(j as f64 * PI / r as f64), DEFAULT_RADIUS))
            .collect();
        Ok(PhiTable { r, values: values? })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// φ_r(jπ/r); indices outside `0..=r` use the recursion.
    pub fn at(&self, j: i64) -> Result<Complex64> {
        let ri = self.r as i64;
        if (0..=ri).contains(&j) {
            return Ok(self.values[j as usize]);
        }
        let z = ci(j as f64 * PI / self.r as f64);
        phi_extended_with(self.r, z, |w| {
            let jj = (w.re * self.r as f64 / PI).round() as i64;
            if (0..=ri).contains(&jj) {
                Ok(self.values[jj as usize])
            } else {
                phi_r_radius(self.r, w, DEFAULT_RADIUS)
            }
        })
    }
}

/// Residual of `1 − e^{2iz} = exp((r/4πi)(φ_r(z − π/r) − φ_r(z + π/r)))`
/// for `0 < Re z < π`.
pub fn fund_residual(ctx: &RootContext, z: Complex64) -> Result<f64> {
    let rf = ctx.r() as f64;
    let a = phi_r(ctx, z - PI / rf)?;
    let b = phi_r(ctx, z + PI / rf)?;
    let rhs = (rf / (4.0 * PI * I) * (a - b)).exp();
    let lhs = ci(1.0) - (2.0 * I * z).exp();
    Ok((lhs - rhs).norm())
}

/// Residual of `1 + e^{irz} = exp((r/4πi)(φ_r(z) − φ_r(z + π)))` for
/// `−π/r < Re z < π/r`.
pub fn f2_residual(ctx: &RootContext, z: Complex64) -> Result<f64> {
    let rf = ctx.r() as f64;
    let a = phi_r(ctx, z)?;
    let b = phi_r(ctx, z + PI)?;
    let rhs = (rf / (4.0 * PI * I) * (a - b)).exp();
    let lhs = ci(1.0) + (I * rf * z).exp();
    Ok((lhs - rhs).norm())
}

/// Outcome of comparing `(q)_n = ∏_{k≤n}(1 − q^{2k})` with its φ_r forms.
#[derive(Clone, Copy, Debug)]
pub struct PochhammerCheck {
    pub direct: Complex64,
    /// |direct − φ_r form| for the form valid when 0 ≤ n ≤ r−2.
    pub abs_residual: f64,
    /// The same, divided by |direct|.
    pub rel_residual: f64,
    /// Relative residual of the shifted form, defined for (r−1)/2 ≤ n ≤ r−2.
    pub shifted_rel_residual: Option<f64>,
    pub shifted_abs_residual: Option<f64>,
}

/// Compare the q-Pochhammer symbol with both φ_r representations.
pub fn qpochhammer_check(ctx: &RootContext, table: &PhiTable, n: i64) -> Result<PochhammerCheck> {
    let r = ctx.ri();
    if n < 0 || n > r - 2 {
        return Err(Error::OutOfRange { index: n, max: r - 2 });
    }
    let rf = r as f64;
    let q = ctx.q();
    let mut direct = ci(1.0);
    for k in 1..=n {
        direct *= ci(1.0) - q.powi((2 * k) as i32);
    }
    let c = rf / (4.0 * PI * I);
    let p1 = table.at(1)?;
    let form1 = (c * (p1 - table.at(2 * n + 1)?)).exp();
    let abs1 = (direct - form1).norm();
    let (sh_abs, sh_rel) = if 2 * n >= r - 1 {
        let form2 = 2.0 * (c * (p1 - table.at(2 * n + 1 - r)?)).exp();
        let a = (direct - form2).norm();
        (Some(a), Some(a / direct.norm()))
    } else {
        (None, None)
    };
    Ok(PochhammerCheck {
        direct,
        abs_residual: abs1,
        rel_residual: abs1 / direct.norm(),
        shifted_rel_residual: sh_rel,
        shifted_abs_residual: sh_abs,
    })
}
