//! The finite-r potential 𝒲_r and the leading-order saddle prediction of
//! the change-of-pair invariant.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fsl::{rt_cop, sigma_phase, ChangeOfPairSpec, FslPresentation, GridOptions};
use crate::geom::potential::{u_value, AngleSixTuple};
use crate::geom::{sign_vectors, solve_critical, PotentialSpec};
use crate::linalg::{sqrt_det_continued, CMatrix};
use crate::qcore::{log_sum, LogComplex, RootContext};
use crate::qdilog::phi_r_extended;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn lg(x: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - (2.0 * I * x).exp()).ln()
}

/// The first-order correction κ of one block: 𝒲_r − 𝒲 contains
/// `(4πi/r)κ` besides the `log(r/2)` term.
pub fn kappa_block(a: &AngleSixTuple, xi: Complex64) -> Complex64 {
    let tau = a.tau();
    let eta = a.eta();
    let pi = Complex64::new(PI, 0.0);
    let mut k = -I * xi - I * PI - I * PI / 2.0 + 1.5 * lg(xi - pi);
    for t in &tau {
        k += 0.5 * I * t - 0.75 * lg(t - pi) - 0.5 * lg(xi - t);
        for e in &eta {
            k += 0.25 * lg(e - t);
        }
    }
    for e in &eta {
        k -= 0.5 * lg(e - xi);
    }
    k
}

/// U_r at complex arguments, each φ_r taken through its extension.
pub fn u_r(ctx: &RootContext, a: &AngleSixTuple, xi: Complex64) -> Result<Complex64> {
    let rf = ctx.r() as f64;
    let h = 2.0 * PI / rf;
    let u = PI / rf;
    let pi = Complex64::new(PI, 0.0);
    let tau = a.tau();
    let eta = a.eta();
    let phi = |z: Complex64| phi_r_extended(ctx, z);
    let mut v = pi * pi - h * h + (xi + h - pi).powi(2) - 2.0 * phi(Complex64::new(u, 0.0))?;
    for t in &tau {
        v -= 0.5 * (t + h - pi).powi(2) + (xi - t).powi(2);
        v += 0.5 * phi(t - pi + 3.0 * u)? + phi(xi - t + u)?;
        for e in &eta {
            v += 0.5 * (e - t).powi(2) - 0.5 * phi(e - t + u)?;
        }
    }
    v -= phi(xi - pi + 3.0 * u)?;
    for e in &eta {
        v -= (e - xi).powi(2);
        v += phi(e - xi + u)?;
    }
    Ok(v)
}

/// 𝒲_r: 𝒲 with every U replaced by U_r.
pub fn w_r_potential(ctx: &RootContext, spec: &PotentialSpec, z: &[Complex64]) -> Result<Complex64> {
    let (_, blocks) = spec.blocks_at(z);
    let mut w = spec.value(z);
    for (a, xi) in &blocks {
        w += u_r(ctx, a, *xi)? - u_value(a, *xi);
    }
    Ok(w)
}

/// κ summed over blocks at `z`.
pub fn kappa(spec: &PotentialSpec, z: &[Complex64]) -> Complex64 {
    spec.blocks_at(z).1.iter().map(|(a, xi)| kappa_block(a, *xi)).sum()
}

/// The pieces of `𝒲_r − 𝒲 = −(4cπi/r) log(r/2) + (4πi/r)κ + O(1/r²)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WrCheck {
    pub r: u32,
    pub w_r: [f64; 2],
    pub w: [f64; 2],
    pub kappa: [f64; 2],
    /// |𝒲_r − 𝒲 + (4cπi/r) log(r/2) − (4πi/r)κ|.
    pub remainder: f64,
}

pub fn w_r_check(ctx: &RootContext, spec: &PotentialSpec, z: &[Complex64]) -> Result<WrCheck> {
    let rf = ctx.r() as f64;
    let c = spec.pres.c() as f64;
    let wr = w_r_potential(ctx, spec, z)?;
    let w = spec.value(z);
    let k = kappa(spec, z);
    let rem = wr - w + 4.0 * c * PI * I / rf * (rf / 2.0).ln() - 4.0 * PI * I / rf * k;
    Ok(WrCheck {
        r: ctx.r(),
        w_r: [wr.re, wr.im],
        w: [w.re, w.im],
        kappa: [k.re, k.im],
        remainder: rem.norm(),
    })
}

/// The overall constant κ_r of the state sum, which for the change of pair
/// reduces to `2^{−c} i^{c−|I|} r^{(c−|I|)/2}` times unit phases from σ,
/// the framings and |I|.
pub fn kappa_r(ctx: &RootContext, spec: &PotentialSpec, sigma: i64) -> LogComplex {
    let r = ctx.ri();
    let k = spec.i_set.len() as i64;
    let c = spec.pres.c() as i64;
    let s: i64 = spec.q.iter().sum::<i64>() + spec.pres.p.iter().sum::<i64>() + 2 * k;
    let mag = LogComplex::new(
        -(c as f64) * std::f64::consts::LN_2 + (c - k) as f64 / 2.0 * (r as f64).ln(),
        (c - k) as f64 * PI / 2.0,
    );
    let framing = LogComplex::unit(-PI * (r * s).rem_euclid(8) as f64 / 4.0);
    mag * sigma_phase(ctx.r(), sigma) * framing
}

/// `C^ε` at a point: the lattice-to-integral Jacobian, the Gaussian factor,
/// `(r/2)^{−c}` and the density `g^ε`.
pub fn c_coefficient(spec: &PotentialSpec, z: &[Complex64], r: f64) -> Complex64 {
    let k = spec.i_set.len() as i32;
    let c = spec.pres.c() as i32;
    let d = (k + c) as f64;
    let (angles, _) = spec.blocks_at(z);
    let mut phase = Complex64::new(0.0, 0.0);
    for (pos, &i) in spec.i_set.iter().enumerate() {
        let beta = spec.fixed[i];
        phase += spec.q[pos] as f64 * beta + spec.eps[pos] as f64 * (angles[i] + beta);
    }
    for (j, a) in angles.iter().enumerate() {
        phase += (spec.pres.p[j] as f64 + spec.pres.iota[j] as f64 / 2.0) * a;
    }
    let g = (I * phase + kappa(spec, z)).exp();
    let scale = r.powf(d) / (2f64.powi(2 * k + c) * PI.powf(d)) * (2.0 * PI / r).powf(d / 2.0) * (r / 2.0).powi(-c);
    g * scale
}

/// The closed form of `C^ε` when every fixed angle is π.
pub fn c_symmetric_closed_form(spec: &PotentialSpec, r: f64) -> f64 {
    let k = spec.i_set.len() as f64;
    let c = spec.pres.c() as f64;
    let twice: i64 = 2 * spec.q.iter().sum::<i64>()
        + spec.pres.p.iter().map(|p| 2 * p).sum::<i64>()
        + spec.pres.iota.iter().sum::<i64>()
        + 2 * spec.pres.c() as i64;
    let sign = if (twice / 2) % 2 == 0 { 1.0 } else { -1.0 };
    sign * r.powf((k - c) / 2.0) / (2f64.powf((3.0 * k + c) / 2.0) * PI.powf((k + c) / 2.0))
}

/// One sign vector's contribution.
#[derive(Clone, Debug, Serialize)]
pub struct EpsTerm {
    pub eps: Vec<i8>,
    pub critical_value: [f64; 2],
    pub sqrt_det: [f64; 2],
    /// `C^ε / √det(−Hess(𝒲/4πi))`.
    pub coefficient: [f64; 2],
    pub term: LogComplex,
}

#[derive(Clone, Debug, Serialize)]
pub struct Prediction {
    pub r: u32,
    pub value: LogComplex,
    pub kappa_r: LogComplex,
    pub terms: Vec<EpsTerm>,
    /// |Σ_ε coefficient|, nonzero near the symmetric point.
    pub coefficient_sum: f64,
}

/// `κ_r Σ_ε C^ε e^{2πiΣε/r} / √det(−Hess(𝒲^ε/4πi)) · e^{(r/4πi)𝒲^ε(z^ε)}`.
pub fn leading_prediction(ctx: &RootContext, spec: &PotentialSpec, sigma: i64) -> Result<Prediction> {
    let rf = ctx.r() as f64;
    let scale = Complex64::new(0.0, -1.0 / (4.0 * PI)); // 1/(4πi)
    let mut terms = Vec::new();
    let mut coeff_sum = Complex64::new(0.0, 0.0);
    for eps in sign_vectors(spec.i_set.len()) {
        let s = spec.clone().with_eps(&eps);
        let res = solve_critical(&s)?;
        let a: CMatrix = -(&res.hessian * scale);
        let sq = sqrt_det_continued(&a);
        let coeff = c_coefficient(&s, &res.point, rf) / sq;
        coeff_sum += coeff;
        let eps_sum: f64 = eps.iter().map(|&e| e as f64).sum();
        let w = res.value_c();
        let term = LogComplex::from_complex(coeff)
            * LogComplex::unit(2.0 * PI * eps_sum / rf)
            * LogComplex::exp(rf * scale * w);
        terms.push(EpsTerm {
            eps,
            critical_value: res.value,
            sqrt_det: [sq.re, sq.im],
            coefficient: [coeff.re, coeff.im],
            term,
        });
    }
    let kr = kappa_r(ctx, spec, sigma);
    let parts: Vec<LogComplex> = terms.iter().map(|t| t.term).collect();
    Ok(Prediction {
        r: ctx.r(),
        value: kr * log_sum(&parts),
        kappa_r: kr,
        terms,
        coefficient_sum: coeff_sum.norm(),
    })
}

/// The prediction set against the exact invariant at one level.
#[derive(Clone, Debug, Serialize)]
pub struct PredictionComparison {
    pub r: u32,
    pub colors: Vec<i64>,
    pub predicted: LogComplex,
    pub exact: LogComplex,
    pub ratio: [f64; 2],
    /// |ratio − 1| after calibration.
    pub ratio_error: f64,
    /// The power k of i multiplying the prediction to match the exact
    /// phase; 0 means no global phase was absorbed.
    pub calibration: u8,
}

/// Compare the prediction with `rt_cop` at the coloring `colors` (one
/// color per component; entries on I are the n_i).
pub fn compare_prediction(
    ctx: &RootContext,
    pres: &FslPresentation,
    cop: &ChangeOfPairSpec,
    colors: &[i64],
    calibration: Option<u8>,
    opts: GridOptions,
) -> Result<PredictionComparison> {
    if colors.len() != pres.n() {
        return Err(Error::Arity { expected: pres.n(), got: colors.len() });
    }
    let spec = PotentialSpec::from_colors(ctx, pres, Some(cop), colors)?;
    let pred = leading_prediction(ctx, &spec, cop.sigma)?;
    let n_i: Vec<i64> = cop.i_set.iter().map(|&i| colors[i]).collect();
    let m_j: Vec<i64> = cop.j_set(pres.n()).iter().map(|&j| colors[j]).collect();
    let exact = rt_cop(ctx, pres, cop, &n_i, &m_j, opts)?.value;
    if exact.is_zero() {
        return Err(Error::ZeroInvariant(ctx.r()));
    }
    let raw = (pred.value / exact).to_complex();
    let k = calibration.unwrap_or_else(|| {
        (0..4u8)
            .min_by(|&a, &b| {
                let da = (raw * I.powi(a as i32) - 1.0).norm();
                let db = (raw * I.powi(b as i32) - 1.0).norm();
                da.total_cmp(&db)
            })
            .expect("four candidates")
    });
    let ratio = raw * I.powi(k as i32);
    Ok(PredictionComparison {
        r: ctx.r(),
        colors: colors.to_vec(),
        predicted: pred.value,
        exact,
        ratio: [ratio.re, ratio.im],
        ratio_error: (ratio - 1.0).norm(),
        calibration: k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asympt::{color_sequence, Branch};
    use crate::geom::v8;
    use crate::qcore::Precision;

    #[test]
    fn symmetric_coefficient_matches_closed_form() {
        let pres = FslPresentation::tetra1();
        let cop = ChangeOfPairSpec::plain(&pres, &[1]).unwrap();
        let spec = PotentialSpec::from_cone_angles(&pres, Some(&cop), &[0.0; 3]).unwrap();
        let z = spec.seed();
        for r in [101.0, 1001.0] {
            let c = c_coefficient(&spec, &z, r);
            let closed = c_symmetric_closed_form(&spec, r);
            assert!((c - Complex64::new(closed, 0.0)).norm() < 1e-12 * closed.abs(), "{c} vs {closed}");
        }
    }

    #[test]
    fn kappa_r_single_block() {
        let ctx = RootContext::new(101, Precision::Standard).unwrap();
        let pres = FslPresentation::tetra1();
        let cop = ChangeOfPairSpec::plain(&pres, &[1]).unwrap();
        let spec = PotentialSpec::from_cone_angles(&pres, Some(&cop), &[0.0; 3]).unwrap();
        let k = kappa_r(&ctx, &spec, 0).to_complex();
        let expect = 0.5 * Complex64::from_polar(1.0, -PI * 101.0 / 2.0);
        assert!((k - expect).norm() < 1e-13);
    }

    #[test]
    fn finite_r_potential_expansion() {
        let pres = FslPresentation::tetra1();
        let cop = ChangeOfPairSpec::plain(&pres, &[1]).unwrap();
        let spec = PotentialSpec::from_cone_angles(&pres, Some(&cop), &[0.1; 3]).unwrap();
        let z = vec![Complex64::new(3.05, 0.02), Complex64::new(5.45, -0.01)];
        let rems: Vec<f64> = [101, 201, 401]
            .iter()
            .map(|&r| {
                let ctx = RootContext::new(r, Precision::Standard).unwrap();
                w_r_check(&ctx, &spec, &z).unwrap().remainder * (r as f64).powi(2)
            })
            .collect();
        // r²·remainder stays bounded
        let c = rems.iter().cloned().fold(0.0, f64::max);
        assert!(c < 200.0, "{rems:?}");
        assert!((rems[2] / rems[1] - 1.0).abs() < 0.2, "{rems:?}");
    }

    #[test]
    fn finite_r_potential_at_symmetric_point() {
        let pres = FslPresentation::tetra1();
        let spec = PotentialSpec::from_cone_angles(&pres, None, &[0.0; 3]).unwrap();
        // the gap to 2v₈ shrinks like log r/r
        let gaps: Vec<f64> = [401, 1601]
            .iter()
            .map(|&r| {
                let ctx = RootContext::new(r, Precision::Standard).unwrap();
                let w = w_r_potential(&ctx, &spec, &spec.seed()).unwrap();
                (w.im - 2.0 * v8()).abs()
            })
            .collect();
        assert!(gaps[0] < 0.25 && gaps[1] < 0.06, "{gaps:?}");
    }

    #[test]
    fn prediction_ratio_near_one() {
        let pres = FslPresentation::tetra1();
        let cop = ChangeOfPairSpec::plain(&pres, &[1]).unwrap();
        let ctx = RootContext::new(201, Precision::Standard).unwrap();
        let colors = color_sequence(&[0.1; 3], Branch::Below, 201).unwrap().colors;
        let cmp = compare_prediction(&ctx, &pres, &cop, &colors, None, GridOptions::default()).unwrap();
        assert_eq!(cmp.calibration, 0);
        assert!(cmp.ratio_error < 0.05, "{cmp:?}");
    }
}
