//! The invariant suite behind `fslrt selftest`: twelve numbered checks,
//! each measured against a tolerance from [`crate::tolerances`].

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::asympt::{color_sequence, compare_prediction, conjecture_report, costantino_fit, r_range, Branch, GrowthOptions};
use crate::error::Result;
use crate::fsl::{poisson_check, ChangeOfPairSpec, FslPresentation, GridOptions};
use crate::geom::{cs_distance, hessian_probe, lobachevsky, solve_critical, v8, v_value, xi_of_alpha, AngleSixTuple, PotentialSpec};
use crate::qcore::{dft_kernel, Precision, RootContext};
use crate::qdilog::{f2_residual, fund_residual, qpochhammer_check, PhiTable};
use crate::saddle::{gaussian_check, stirling_error};
use crate::sixj::{random_admissible, random_hyperideal, sixj_direct, sixj_via_phir, tetrahedral_images, SixTuple};
use crate::tolerances as tol;

/// Outcome of one numbered check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    /// The quantity compared against the tolerance.
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

impl CheckResult {
    /// One line: `[PASS] 3 two-path 6j: 2.1e-9 <= 1e-6 (…)`.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {:.3e} vs {:.1e} ({}) [{:.1}s]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.tolerance,
            self.detail,
            self.seconds
        )
    }
}

pub const NAMES: [&str; 12] = [
    "kernel unitarity",
    "Parseval identity",
    "two-path 6j",
    "tetrahedral symmetry",
    "quantum dilogarithm identities",
    "factorial estimate",
    "geometry fixed points",
    "critical solve",
    "6j growth limit",
    "FSL volume conjecture",
    "change-of-pair conjecture",
    "saddle estimates",
];

struct Outcome {
    pass: bool,
    measured: f64,
    tolerance: f64,
    detail: String,
}

fn le(measured: f64, tolerance: f64, detail: String) -> Outcome {
    Outcome { pass: measured <= tolerance, measured, tolerance, detail }
}

fn odd_levels(lo: i64, hi: i64) -> Vec<i64> {
    (lo..=hi).step_by(2).collect()
}

fn ctx(r: i64) -> Result<RootContext> {
    RootContext::new(r, Precision::Standard)
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn kernel_unitarity() -> Result<Outcome> {
    let worst: Vec<f64> = odd_levels(3, 101)
        .par_iter()
        .map(|&r| {
            let c = ctx(r)?;
            let colors = c.colors();
            let mu2 = c.mu_r() * c.mu_r();
            let h: Vec<Vec<f64>> = colors.iter().map(|&m| colors.iter().map(|&n| dft_kernel(&c, m, n)).collect()).collect();
            let mut w: f64 = 0.0;
            for a in 0..colors.len() {
                for b in 0..colors.len() {
                    let s: f64 = (0..colors.len()).map(|m| h[m][a] * h[m][b]).sum();
                    let d = if a == b { 1.0 } else { 0.0 };
                    w = w.max((mu2 * s - d).abs());
                }
            }
            Ok(w)
        })
        .collect::<Result<_>>()?;
    Ok(le(max_of(worst), tol::KERNEL_UNITARITY, "odd r in 3..=101".into()))
}

fn parseval() -> Result<Outcome> {
    let pres = FslPresentation::tetra1();
    let cop = ChangeOfPairSpec::plain(&pres, &[1])?;
    let errs: Vec<f64> = odd_levels(5, 31)
        .par_iter()
        .map(|&r| Ok(poisson_check(&ctx(r)?, &pres, &cop, GridOptions::forced())?.rel_err))
        .collect::<Result<_>>()?;
    Ok(le(max_of(errs), tol::PARSEVAL, "tetra1, I = {1}, r in 5..=31".into()))
}

fn two_path() -> Result<Outcome> {
    let per_r: Vec<(f64, usize)> = odd_levels(7, 51)
        .par_iter()
        .map(|&r| {
            let c = ctx(r)?;
            let table = PhiTable::new(&c)?;
            let mut rng = ChaCha8Rng::seed_from_u64(r as u64);
            let mut worst: f64 = 0.0;
            let mut count = 0;
            for _ in 0..100 {
                let Some(six) = random_hyperideal(&c, &mut rng) else { break };
                let a = sixj_direct(&c, &six)?;
                let b = sixj_via_phir(&c, &table, &six)?;
                worst = worst.max(a.rel_diff(&b));
                count += 1;
            }
            Ok((worst, count))
        })
        .collect::<Result<_>>()?;
    let samples: usize = per_r.iter().map(|p| p.1).sum();
    let mut o = le(max_of(per_r.iter().map(|p| p.0)), tol::TWO_PATH_STANDARD, format!("{samples} tuples, r in 7..=51"));
    o.pass &= samples == 100 * per_r.len();
    Ok(o)
}

fn symmetry() -> Result<Outcome> {
    let worst: Vec<f64> = odd_levels(3, 51)
        .par_iter()
        .map(|&r| {
            let c = ctx(r)?;
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + r as u64);
            let mut w: f64 = 0.0;
            for _ in 0..100 {
                let six = random_admissible(&c, &mut rng);
                let base = sixj_direct(&c, &six)?;
                for img in tetrahedral_images(&six.m) {
                    let v = sixj_direct(&c, &SixTuple::new(&c, img)?)?;
                    w = w.max(base.rel_diff(&v));
                }
            }
            Ok(w)
        })
        .collect::<Result<_>>()?;
    Ok(le(max_of(worst), tol::SYMMETRY, "24 images, 100 tuples per odd r <= 51".into()))
}

fn qdilog_identities() -> Result<Outcome> {
    let per_r: Vec<[f64; 3]> = odd_levels(3, 101)
        .par_iter()
        .map(|&r| {
            let c = ctx(r)?;
            let rf = r as f64;
            let mut fund: f64 = 0.0;
            let mut f2: f64 = 0.0;
            for k in 0..25 {
                let t = (k as f64 + 0.5) / 25.0;
                for im in [0.0, 0.25] {
                    let z = Complex64::new(PI / rf + t * (PI - 3.0 * PI / rf), im);
                    fund = fund.max(fund_residual(&c, z)?);
                    let w = Complex64::new((2.0 * t - 1.0) * 0.9 * PI / rf, im);
                    f2 = f2.max(f2_residual(&c, w)?);
                }
            }
            let table = PhiTable::new(&c)?;
            let mut fact: f64 = 0.0;
            for n in 0..=r - 2 {
                let p = qpochhammer_check(&c, &table, n)?;
                fact = fact.max(p.rel_residual);
                if let Some(s) = p.shifted_rel_residual {
                    fact = fact.max(s);
                }
            }
            Ok([fund, f2, fact])
        })
        .collect::<Result<_>>()?;
    let m: [f64; 3] = std::array::from_fn(|i| max_of(per_r.iter().map(|p| p[i])));
    Ok(le(
        max_of(m),
        tol::QDILOG_IDENTITY,
        format!("fund {:.1e}, f2 {:.1e}, factorial {:.1e}; odd r <= 101", m[0], m[1], m[2]),
    ))
}

/// The smallest C with `|log|{n}!| + (r/2π)Λ(2πn/r)| ≤ C log r` over all
/// `0 ≤ n ≤ r−1` and odd `r` in the range.
pub fn factorial_estimate_constant(r_max: i64) -> Result<f64> {
    let c: Vec<f64> = odd_levels(3, r_max)
        .par_iter()
        .map(|&r| {
            let c = ctx(r)?;
            let rf = r as f64;
            let mut w: f64 = 0.0;
            for n in 0..r {
                let lhs = c.qfact_brace(n)?.logmag + rf / (2.0 * PI) * lobachevsky(2.0 * PI * n as f64 / rf);
                w = w.max(lhs.abs() / rf.ln());
            }
            Ok(w)
        })
        .collect::<Result<_>>()?;
    Ok(max_of(c))
}

fn factorial_estimate() -> Result<Outcome> {
    Ok(le(factorial_estimate_constant(1001)?, tol::FACTORIAL_ESTIMATE_C, "odd r <= 1001".into()))
}

fn fixed_points() -> Result<Outcome> {
    let xi = xi_of_alpha(&AngleSixTuple::real([PI; 6]))?;
    let e_xi = (xi - Complex64::new(7.0 * PI / 4.0, 0.0)).norm();
    let e_v = (v_value(&[PI; 6], 7.0 * PI / 4.0) - v8()).abs();
    let h = hessian_probe();
    let probes = [
        ("d2/da2", h.alpha_alpha, -2.0),
        ("d2/dada'", h.alpha_pair, -1.0),
        ("d2/dadxi", h.alpha_xi, 2.0),
        ("d2/dxi2", h.xi_xi, -8.0),
    ];
    let mut detail = format!("xi err {e_xi:.1e}, V err {e_v:.1e}");
    let mut worst_probe: f64 = 0.0;
    for (name, got, want) in probes {
        let e = (got - want).abs();
        worst_probe = worst_probe.max(e);
        detail.push_str(&format!(", {name} = {got:.6} (want {want})"));
    }
    let pass = e_xi <= tol::FIXED_POINT && e_v <= tol::FIXED_POINT && worst_probe <= tol::HESSIAN_PROBE;
    Ok(Outcome { pass, measured: worst_probe.max(e_xi).max(e_v), tolerance: tol::HESSIAN_PROBE, detail })
}

fn critical_solve() -> Result<Outcome> {
    let pres = FslPresentation::tetra1();
    let cc = pres.c() as f64;
    let expect = Complex64::new(2.0 * cc * PI * PI, 2.0 * cc * v8());
    let mut value_err: f64 = 0.0;
    let plain = PotentialSpec::from_cone_angles(&pres, None, &[0.0; 3])?;
    value_err = value_err.max((solve_critical(&plain)?.value_c() - expect).norm());
    let cop = ChangeOfPairSpec::plain(&pres, &[1])?;
    let with_cop = PotentialSpec::from_cone_angles(&pres, Some(&cop), &[0.0; 3])?;
    value_err = value_err.max((solve_critical(&with_cop)?.value_c() - expect).norm());

    let mut twisted = pres.clone();
    twisted.iota[0] = 1;
    let spec = PotentialSpec::from_cone_angles(&twisted, None, &[0.0; 3])?;
    let cs_err = cs_distance(solve_critical(&spec)?.cs, PI * PI / 2.0);

    let mut dehn: f64 = 0.0;
    for ids in [vec![1], vec![1, 2]] {
        let cop = ChangeOfPairSpec::plain(&pres, &ids)?;
        for eps in crate::geom::sign_vectors(ids.len()) {
            let spec = PotentialSpec::from_cone_angles(&pres, Some(&cop), &[0.1; 3])?.with_eps(&eps);
            dehn = dehn.max(max_of(solve_critical(&spec)?.dehn_residuals));
        }
    }
    let measured = value_err.max(cs_err).max(dehn);
    Ok(Outcome {
        pass: value_err <= tol::CRITICAL_VALUE && cs_err <= tol::CRITICAL_VALUE && dehn <= tol::DEHN_RESIDUAL,
        measured,
        tolerance: tol::CRITICAL_VALUE,
        detail: format!("value {value_err:.1e}, CS with twist {cs_err:.1e}, Dehn {dehn:.1e}"),
    })
}

fn costantino() -> Result<Outcome> {
    let rs: Vec<u32> = (0..10).map(|k| 101 + 100 * k).collect();
    let f = costantino_fit(&rs, Precision::Standard)?;
    Ok(le(f.gap, tol::COSTANTINO_LIMIT, format!("limit {:.6} vs v8 {:.6}", f.limit, f.reference)))
}

fn fsl_conjecture() -> Result<Outcome> {
    let pres = FslPresentation::tetra1();
    let rs = r_range(101, 1001, 8)?;
    let rep = conjecture_report(&pres, None, &[0.0; 3], &rs, GrowthOptions::default())?;
    let re_gap = (rep.fit.limit[0] - 2.0 * v8()).abs();
    let im_gap = cs_distance(rep.fit.limit[1], 0.0);
    Ok(Outcome {
        pass: re_gap <= tol::FSL_LIMIT && im_gap <= tol::FSL_LIMIT,
        measured: re_gap.max(im_gap),
        tolerance: tol::FSL_LIMIT,
        detail: format!("Re {:.6} vs 2v8, Im gap {im_gap:.1e} mod pi^2, {} rows", rep.fit.limit[0], rep.fit.rows),
    })
}

fn cop_conjecture() -> Result<Outcome> {
    let pres = FslPresentation::tetra1();
    let cop = ChangeOfPairSpec::plain(&pres, &[1])?;
    let rs = r_range(201, 2001, 8)?;
    let rep = conjecture_report(&pres, Some(&cop), &[0.1; 3], &rs, GrowthOptions::default())?;
    let cs_units = rep.cs_gap / (PI * PI);
    Ok(Outcome {
        pass: rep.volume_rel_gap <= tol::COP_VOLUME_REL && cs_units <= tol::COP_CS_PI2,
        measured: rep.volume_rel_gap,
        tolerance: tol::COP_VOLUME_REL,
        detail: format!(
            "Re {:.6} vs Vol {:.6}, CS gap {cs_units:.1e} pi^2, {} rows",
            rep.fit.limit[0], rep.volume, rep.fit.rows
        ),
    })
}

/// Prediction error at `r` for the test presentation, I = {1}, θ = 0.1.
pub fn prediction_error(r: u32) -> Result<f64> {
    let pres = FslPresentation::tetra1();
    let cop = ChangeOfPairSpec::plain(&pres, &[1])?;
    let c = RootContext::new(r as i64, Precision::Standard)?;
    let colors = color_sequence(&[0.1; 3], Branch::Below, r)?.colors;
    Ok(compare_prediction(&c, &pres, &cop, &colors, None, GridOptions::default())?.ratio_error)
}

fn saddle_checks() -> Result<Outcome> {
    let mut gauss: f64 = 0.0;
    for r in [50.0, 100.0, 200.0, 400.0] {
        gauss = gauss.max(gaussian_check(r, 1.0)?.residual);
    }
    let (lo, hi) = tol::HALVING;
    let stirling = stirling_error(200)? / stirling_error(100)?;
    let prediction = prediction_error(1001)? / prediction_error(501)?;
    let in_band = |x: f64| (lo..=hi).contains(&x);
    Ok(Outcome {
        pass: gauss <= tol::GAUSSIAN && in_band(stirling) && in_band(prediction),
        measured: gauss,
        tolerance: tol::GAUSSIAN,
        detail: format!("Stirling ratio {stirling:.3}, prediction ratio {prediction:.3}, band [{lo}, {hi}]"),
    })
}

/// Run check `id` (1..=12).
pub fn run_check(id: u8) -> CheckResult {
    let start = Instant::now();
    let out = match id {
        1 => kernel_unitarity(),
        2 => parseval(),
        3 => two_path(),
        4 => symmetry(),
        5 => qdilog_identities(),
        6 => factorial_estimate(),
        7 => fixed_points(),
        8 => critical_solve(),
        9 => costantino(),
        10 => fsl_conjecture(),
        11 => cop_conjecture(),
        12 => saddle_checks(),
        _ => Err(crate::Error::Domain(format!("no check numbered {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let name = NAMES.get((id as usize).wrapping_sub(1)).copied().unwrap_or("unknown");
    match out {
        Ok(o) => CheckResult { id, name, pass: o.pass, measured: o.measured, tolerance: o.tolerance, detail: o.detail, seconds },
        Err(e) => CheckResult {
            id,
            name,
            pass: false,
            measured: f64::NAN,
            tolerance: f64::NAN,
            detail: format!("error: {e}"),
            seconds,
        },
    }
}

pub fn run_all() -> Vec<CheckResult> {
    (1..=12).map(run_check).collect()
}

