//! Saddle-point estimates of `∫ g e^{r f}` over a neighbourhood of a
//! nondegenerate critical point of a holomorphic f in several variables.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::PotentialSpec;
use crate::linalg::{self, CMatrix, CVector};
use crate::qcore::LogComplex;
use crate::quad;

/// A holomorphic function of several complex variables with its gradient.
pub trait Holomorphic: Sync {
    fn dim(&self) -> usize;
    fn value(&self, z: &[Complex64]) -> Complex64;
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64>;

    /// Central differences of the gradient (step 1e−5), one Richardson
    /// refinement, symmetrized.
    fn hessian(&self, z: &[Complex64]) -> CMatrix {
        let n = self.dim();
        let fd = |h: f64| {
            let mut m = CMatrix::zeros(n, n);
            for j in 0..n {
                let mut zp = z.to_vec();
                let mut zm = z.to_vec();
                zp[j] += h;
                zm[j] -= h;
                let gp = self.gradient(&zp);
                let gm = self.gradient(&zm);
                for i in 0..n {
                    m[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
                }
            }
            m
        };
        let h = 1e-5;
        let m = (fd(h / 2.0) * Complex64::new(4.0, 0.0) - fd(h)) / Complex64::new(3.0, 0.0);
        (&m + m.transpose()) * Complex64::new(0.5, 0.0)
    }
}

/// A function given by closures for its value and gradient.
pub struct FnHolomorphic<F, G> {
    pub dim: usize,
    pub f: F,
    pub grad: G,
}

impl<F, G> Holomorphic for FnHolomorphic<F, G>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
    G: Fn(&[Complex64]) -> Vec<Complex64> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, z: &[Complex64]) -> Complex64 {
        (self.f)(z)
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        (self.grad)(z)
    }
}

impl Holomorphic for PotentialSpec {
    fn dim(&self) -> usize {
        PotentialSpec::dim(self)
    }
    fn value(&self, z: &[Complex64]) -> Complex64 {
        PotentialSpec::value(self, z)
    }
    fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        PotentialSpec::gradient(self, z)
    }
    fn hessian(&self, z: &[Complex64]) -> CMatrix {
        PotentialSpec::hessian(self, z)
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Damped Newton iteration on the gradient until its norm is at most `tol`.
pub fn find_critical(f: &dyn Holomorphic, x0: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
    let mut z = x0.to_vec();
    let mut g = f.gradient(&z);
    let mut gn = norm(&g);
    for _ in 0..100 {
        if gn <= tol {
            return Ok(z);
        }
        let h = f.hessian(&z);
        let rhs = CVector::from_iterator(g.len(), g.iter().map(|x| -x));
        let step = linalg::solve(&h, &rhs)?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<Complex64> = z.iter().zip(step.iter()).map(|(a, d)| a + d * lambda).collect();
            let gt = f.gradient(&trial);
            let gtn = norm(&gt);
            if gtn.is_finite() && gtn < gn {
                z = trial;
                g = gt;
                gn = gtn;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                return Err(Error::NoConvergence(format!("Newton stalled at |∇f| = {gn:.3e}")));
            }
        }
    }
    if gn <= tol {
        Ok(z)
    } else {
        Err(Error::NoConvergence(format!("|∇f| = {gn:.3e} after 100 steps")))
    }
}

/// The integrand data at a critical point.
pub struct SaddleProblem<'a> {
    pub f: &'a dyn Holomorphic,
    pub g: &'a (dyn Fn(&[Complex64]) -> Complex64 + Sync),
    pub r: f64,
    pub critical: Vec<Complex64>,
}

/// Leading-order value with the pieces that went into it.
#[derive(Clone, Debug, Serialize)]
pub struct SaddleEstimate {
    pub value: LogComplex,
    /// √det(−Hess f), continued from the principal root of det(Re(−Hess f)).
    pub sqrt_det: [f64; 2],
    pub hess_det: [f64; 2],
    pub gradient_residual: f64,
    pub branch: &'static str,
}

pub const BRANCH_RULE: &str = "continued from det(Re(-H)) along det(Re(-H) + t i Im(-H)), t in [0,1]";

/// `(2π/r)^{n/2} g(c) e^{r f(c)} / √det(−Hess f(c))`.
pub fn saddle_estimate(p: &SaddleProblem) -> Result<SaddleEstimate> {
    let n = p.f.dim();
    let residual = norm(&p.f.gradient(&p.critical));
    if residual > 1e-10 {
        return Err(Error::NoConvergence(format!("gradient residual {residual:.3e} at supplied point")));
    }
    let h = p.f.hessian(&p.critical);
    let minus_h = -h;
    let det = linalg::det(&minus_h);
    if det.norm() < 1e-300 || !det.is_finite() {
        return Err(Error::SingularHessian);
    }
    let s = linalg::sqrt_det_continued(&minus_h);
    let log_value = (n as f64 / 2.0) * (2.0 * PI / p.r).ln() + p.r * p.f.value(&p.critical);
    let value = LogComplex::exp(log_value) * LogComplex::from_complex((p.g)(&p.critical) / s);
    Ok(SaddleEstimate {
        value,
        sqrt_det: [s.re, s.im],
        hess_det: [det.re, det.im],
        gradient_residual: residual,
        branch: BRANCH_RULE,
    })
}

/// `∫_{−ε}^{ε} z² e^{−rz²} dz − ½√(π/r³)`.
pub fn verify_second_moment(r: f64, eps: f64) -> Result<f64> {
    let f = |x: f64| Complex64::new(x * x * (-r * x * x).exp(), 0.0);
    // even integrand; split where the peak ends so wide intervals see it
    let knee = eps.min(8.0 / r.sqrt());
    let (a, _) = quad::integrate(&f, 0.0, knee, 1e-15, 1e-14)?;
    let (b, _) = if eps > knee { quad::integrate(&f, knee, eps, 1e-15, 1e-14)? } else { Default::default() };
    Ok(2.0 * (a.re + b.re) - 0.5 * (PI / r.powi(3)).sqrt())
}

/// Gaussian check `f = −z²`, `g = 1`: the estimate, the integral over
/// `[−ε, ε]`, and their difference.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GaussianCheck {
    pub estimate: f64,
    pub integral: f64,
    pub closed_form: f64,
    pub residual: f64,
}

pub fn gaussian_check(r: f64, eps: f64) -> Result<GaussianCheck> {
    let f = FnHolomorphic {
        dim: 1,
        f: |z: &[Complex64]| -z[0] * z[0],
        grad: |z: &[Complex64]| vec![-2.0 * z[0]],
    };
    let g = |_: &[Complex64]| Complex64::new(1.0, 0.0);
    let c = find_critical(&f, &[Complex64::new(0.3, 0.0)], 1e-14)?;
    let est = saddle_estimate(&SaddleProblem { f: &f, g: &g, r, critical: c })?.value.to_complex();
    let h = |x: f64| Complex64::new((-r * x * x).exp(), 0.0);
    let (v, _) = quad::integrate(&h, -eps, eps, 1e-16, 1e-15)?;
    Ok(GaussianCheck {
        estimate: est.re,
        integral: v.re,
        closed_form: (PI / r).sqrt(),
        residual: (est.re - v.re).abs().max(est.im.abs()),
    })
}

/// `|estimate/exact − 1|` for `∫₀^∞ e^{r(log z − z)} dz = Γ(r+1)/r^{r+1}`,
/// integer r.
pub fn stirling_error(r: u32) -> Result<f64> {
    let f = FnHolomorphic {
        dim: 1,
        f: |z: &[Complex64]| z[0].ln() - z[0],
        grad: |z: &[Complex64]| vec![1.0 / z[0] - 1.0],
    };
    let g = |_: &[Complex64]| Complex64::new(1.0, 0.0);
    let rf = r as f64;
    let c = find_critical(&f, &[Complex64::new(0.7, 0.0)], 1e-14)?;
    let est = saddle_estimate(&SaddleProblem { f: &f, g: &g, r: rf, critical: c })?.value;
    let ln_exact = (1..=r).map(|k| (k as f64).ln()).sum::<f64>() - (rf + 1.0) * rf.ln();
    Ok(((est.logmag - ln_exact).exp() - 1.0).abs())
}

/// `|estimate/exact − 1|` for `∫ (1 + z²) e^{−rz²} dz = √(π/r)(1 + 1/(2r))`.
pub fn weighted_gaussian_error(r: f64) -> Result<f64> {
    let f = FnHolomorphic {
        dim: 1,
        f: |z: &[Complex64]| -z[0] * z[0],
        grad: |z: &[Complex64]| vec![-2.0 * z[0]],
    };
    let g = |z: &[Complex64]| 1.0 + z[0] * z[0];
    let est = saddle_estimate(&SaddleProblem { f: &f, g: &g, r, critical: vec![Complex64::new(0.0, 0.0)] })?;
    let exact = (PI / r).sqrt() * (1.0 + 0.5 / r);
    Ok((est.value.to_complex().re / exact - 1.0).abs())
}
