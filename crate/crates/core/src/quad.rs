//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands
//! of a real variable.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel: the estimate and |Kronrod − Gauss|.
pub fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

struct Panel {
    a: f64,
    b: f64,
    val: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive integration on `[a, b]`: bisect the worst panel until
/// the summed error estimate meets `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(Complex64, f64)> {
    const MAX_PANELS: usize = 4000;
    let (v, e) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, val: v, err: e });
    let mut total = v;
    let mut err = e;
    while err > abs_tol.max(rel_tol * total.norm()) {
        if heap.len() > MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "error estimate {err:.3e} after {MAX_PANELS} panels on [{a}, {b}]"
            )));
        }
        let p = heap.pop().expect("non-empty heap");
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        total += v1 + v2 - p.val;
        err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, val: v2, err: e2 });
    }
    // resum from panels to shed the drift of the running total
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let total = panels.iter().fold(Complex64::new(0.0, 0.0), |s, p| s + p.val);
    let err = panels.iter().map(|p| p.err).sum();
    Ok((total, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = gk15(&|x: f64| Complex64::new(x.powi(9), 0.0), 0.0, 1.0);
        assert!((v.re - 0.1).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        let f = |x: f64| Complex64::new(0.0, 7.0 * x).exp();
        let (v, _) = integrate(&f, 0.0, 3.0, 1e-14, 1e-14).unwrap();
        let exact = (Complex64::new(0.0, 21.0).exp() - 1.0) / Complex64::new(0.0, 7.0);
        assert!((v - exact).norm() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let f = |x: f64| Complex64::new(x.sqrt(), 0.0);
        let (v, _) = integrate(&f, 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((v.re - 2.0 / 3.0).abs() < 1e-11);
    }
}
