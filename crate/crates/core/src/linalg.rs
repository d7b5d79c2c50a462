//! Small dense linear algebra helpers over nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Solve `a·x = b` by LU with partial pivoting.
pub fn solve(a: &CMatrix, b: &CVector) -> Result<CVector> {
    let lu = a.clone().lu();
    let d = lu.determinant();
    if !d.is_finite() || d.norm() == 0.0 {
        return Err(Error::SingularHessian);
    }
    lu.solve(b).ok_or(Error::SingularHessian)
}

pub fn det(a: &CMatrix) -> Complex64 {
    a.clone().lu().determinant()
}

/// `√det(a)` continued along `det(Re a + t·i·Im a)` for t from 0 to 1,
/// starting from the principal root at t = 0. When `Re a` is positive
/// definite this is the branch matching the product of principal roots of
/// the eigenvalues for matrices close to real.
pub fn sqrt_det_continued(a: &CMatrix) -> Complex64 {
    let re = a.map(|z| Complex64::new(z.re, 0.0));
    let im = a.map(|z| Complex64::new(0.0, z.im));
    let path = |t: f64| det(&(&re + &im * Complex64::new(t, 0.0)));
    let mut prev = path(0.0).sqrt();
    let mut t = 0.0f64;
    let mut dt: f64 = 1.0 / 64.0;
    while t < 1.0 {
        let step = dt.min(1.0 - t);
        let cand = path(t + step).sqrt();
        // principal roots ±cand; keep the one nearest the previous value
        let next = if (cand - prev).norm() <= (cand + prev).norm() { cand } else { -cand };
        let jump = (next - prev).norm();
        if jump > 0.25 * prev.norm().max(next.norm()) && step > 1e-6 {
            dt = step / 2.0;
            continue;
        }
        prev = next;
        t += step;
        dt = (dt * 1.5).min(1.0 / 16.0);
    }
    prev
}

/// Ordinary least squares `min |x·β − y|` by SVD.
/// Returns the coefficients and the residual norm.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax == 0.0 || smin <= smax * 1e-12 {
        return Err(Error::RankDeficient);
    }
    let beta = svd.solve(y, 0.0).map_err(|_| Error::RankDeficient)?;
    let res = (x * &beta - y).norm();
    Ok((beta, res))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_det_of_positive_matrix() {
        let a = CMatrix::from_row_slice(2, 2, &[
            Complex64::new(2.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(3.0, 0.0),
        ]);
        let s = sqrt_det_continued(&a);
        assert!((s - Complex64::new(5.75f64.sqrt(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn sqrt_det_follows_eigenvalue_roots() {
        // three eigenvalues e^{0.4πi}: det = e^{1.2πi}, whose principal root
        // is the negative of the product of principal roots e^{0.6πi}
        let phi = 0.4 * std::f64::consts::PI;
        let z = Complex64::from_polar(1.0, phi);
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![z, z, z]));
        let s = sqrt_det_continued(&a);
        let expect = Complex64::from_polar(1.0, 1.5 * phi);
        assert!((s - expect).norm() < 1e-12, "{s}");
        assert!((s * s - det(&a)).norm() < 1e-12);
    }

    #[test]
    fn least_squares_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let x = DMatrix::from_fn(5, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
        let y = DVector::from_fn(5, |i, _| 3.0 - 2.0 * xs[i]);
        let (b, res) = least_squares(&x, &y).unwrap();
        assert!((b[0] - 3.0).abs() < 1e-12 && (b[1] + 2.0).abs() < 1e-12);
        assert!(res < 1e-12);
        let bad = DMatrix::from_fn(5, 2, |_, _| 1.0);
        assert!(matches!(least_squares(&bad, &y), Err(Error::RankDeficient)));
    }

    #[test]
    fn singular_solve_fails() {
        let a = CMatrix::zeros(2, 2);
        let b = CVector::zeros(2);
        assert!(solve(&a, &b).is_err());
    }
}
