//! Growth of the invariants along color sequences: color choice, growth
//! tables, limit fits and the comparison with the critical value of the
//! potential.

mod predict;

pub use predict::*;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsl::{rt_cop, rt_fsl, ChangeOfPairSpec, FslPresentation, GridOptions};
use crate::geom::{cs_distance, solve_critical, v8, PotentialSpec};
use crate::linalg::least_squares;
use crate::qcore::{LogComplex, Precision, RootContext};
use crate::sixj::{costantino_ratio, SixTuple};
use crate::tolerances::{COP_CS_PI2, COP_VOLUME_REL, COSTANTINO_LIMIT, FSL_LIMIT};

/// Which side of π the colors approach: `4πn/r → 2π − θ` or `2π + θ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Below,
    Above,
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Branch> {
        match s {
            "below" => Ok(Branch::Below),
            "above" => Ok(Branch::Above),
            _ => Err(Error::Domain(format!("unknown branch {s:?}"))),
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Below => "below",
            Branch::Above => "above",
        })
    }
}

/// Colors chosen for a level together with the cone angles they realize.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColorChoice {
    pub colors: Vec<i64>,
    pub realized: Vec<f64>,
}

/// The even color nearest `r(2π ∓ θ)/(4π)`, clamped to `0..=r−3`. An exact
/// odd integer sits halfway between two even ones and rounds down.
pub fn color_sequence(theta: &[f64], branch: Branch, r: u32) -> Result<ColorChoice> {
    if r < 3 || r % 2 == 0 {
        return Err(Error::InvalidLevel(r as i64));
    }
    let rf = r as f64;
    let mut colors = Vec::with_capacity(theta.len());
    let mut realized = Vec::with_capacity(theta.len());
    for &t in theta {
        if !t.is_finite() || !(0.0..=2.0 * PI).contains(&t) {
            return Err(Error::Domain(format!("cone angle {t} outside [0, 2π]")));
        }
        let x = match branch {
            Branch::Below => rf * (2.0 * PI - t) / (4.0 * PI),
            Branch::Above => rf * (2.0 * PI + t) / (4.0 * PI),
        };
        let half = x / 2.0;
        let lower = half.floor();
        let k = if half - lower > 0.5 { lower + 1.0 } else { lower };
        let m = (2.0 * k).clamp(0.0, rf - 3.0) as i64;
        colors.push(m);
        realized.push((2.0 * PI - 4.0 * PI * m as f64 / rf).abs());
    }
    Ok(ColorChoice { colors, realized })
}

/// Odd levels `rmin, rmin + step, …` up to `rmax`; an even `rmin` is moved
/// up by one.
pub fn r_range(rmin: u32, rmax: u32, step: u32) -> Result<Vec<u32>> {
    if step == 0 || step % 2 == 1 {
        return Err(Error::Domain(format!("step {step} must be positive and even")));
    }
    let start = (rmin | 1).max(3);
    Ok((start..=rmax).step_by(step as usize).collect())
}

/// Settings for a growth table.
#[derive(Clone, Copy, Debug)]
pub struct GrowthOptions {
    pub branch: Branch,
    pub precision: Precision,
    pub grid: GridOptions,
    /// Remove the O(1) wobble caused by rounding colors to even integers,
    /// using the critical values at realized and target angles.
    pub correct_angles: bool,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            branch: Branch::Below,
            precision: Precision::Standard,
            grid: GridOptions::default(),
            correct_angles: true,
        }
    }
}

/// One level of a growth table.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub r: u32,
    pub colors: Vec<i64>,
    pub realized: Vec<f64>,
    /// `(4π/r)·log RT` with the unwrapped phase; absent when the row failed.
    pub value: Option<[f64; 2]>,
    /// The angle correction subtracted from `log RT`.
    pub correction: Option<[f64; 2]>,
    pub error: Option<String>,
}

/// `(4π/r)·log RT_r` along a color sequence.
///
/// The phase is normalized before unwrapping: the unit phase of the
/// constant κ_r (framings, σ and the powers of i, all periodic in r modulo
/// 8) is divided out and the exact drift `−r·2cπ²/(4π)` is added back as a
/// multiple of π/2. What is left moves by at most `step·π/8` per row, so
/// tables with steps up to 8 unwrap without ambiguity. None of this changes
/// the limit of the imaginary part modulo π².
#[derive(Clone, Debug, Serialize)]
pub struct GrowthTable {
    pub presentation: String,
    pub change_of_pair: Option<Vec<usize>>,
    pub theta: Vec<f64>,
    pub branch: Branch,
    pub rows: Vec<GrowthRow>,
    /// Largest phase jump between consecutive valid rows after unwrapping.
    pub max_jump: f64,
}

impl GrowthTable {
    /// Valid rows as `(r, re, im)`.
    pub fn points(&self) -> Vec<(u32, f64, f64)> {
        self.rows
            .iter()
            .filter_map(|row| row.value.map(|v| (row.r, v[0], v[1])))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let n = self.theta.len();
        let mut out = String::from("r,re,im,corr_re,corr_im");
        for k in 1..=n {
            out.push_str(&format!(",color_{k}"));
        }
        for k in 1..=n {
            out.push_str(&format!(",realized_{k}"));
        }
        out.push_str(",error\n");
        for row in &self.rows {
            let v = row.value.map_or([f64::NAN; 2], |v| v);
            let c = row.correction.unwrap_or([0.0; 2]);
            out.push_str(&format!("{},{:.15e},{:.15e},{:.6e},{:.6e}", row.r, v[0], v[1], c[0], c[1]));
            for m in &row.colors {
                out.push_str(&format!(",{m}"));
            }
            for a in &row.realized {
                out.push_str(&format!(",{a:.12}"));
            }
            out.push_str(&format!(",{}\n", row.error.as_deref().unwrap_or("")));
        }
        out
    }
}

/// Target spec for the cone angles on the chosen branch.
fn target_spec(
    pres: &FslPresentation,
    cop: Option<&ChangeOfPairSpec>,
    theta: &[f64],
    branch: Branch,
) -> Result<PotentialSpec> {
    let mut spec = PotentialSpec::from_cone_angles(pres, cop, theta)?;
    if branch == Branch::Above {
        spec.fixed = theta.iter().map(|t| PI + t / 2.0).collect();
    }
    Ok(spec)
}

struct RawRow {
    log: LogComplex,
    /// Unit phase of κ_r, divided out before unwrapping.
    kappa_phase: f64,
    correction: Option<num_complex::Complex64>,
}

fn raw_row(
    pres: &FslPresentation,
    cop: Option<&ChangeOfPairSpec>,
    choice: &ColorChoice,
    target_value: Option<num_complex::Complex64>,
    r: u32,
    opts: &GrowthOptions,
) -> Result<RawRow> {
    let ctx = RootContext::new(r as i64, opts.precision)?;
    let colors = &choice.colors;
    let log = match cop {
        Some(cop) => {
            let n_i: Vec<i64> = cop.i_set.iter().map(|&i| colors[i]).collect();
            let m_j: Vec<i64> = cop.j_set(pres.n()).iter().map(|&j| colors[j]).collect();
            rt_cop(&ctx, pres, cop, &n_i, &m_j, opts.grid)?.value
        }
        None => rt_fsl(&ctx, pres, colors)?,
    };
    if log.is_zero() {
        return Err(Error::ZeroInvariant(r));
    }
    let spec = PotentialSpec::from_colors(&ctx, pres, cop, colors)?;
    let kappa_phase = kappa_r(&ctx, &spec, cop.map_or(0, |c| c.sigma)).phase;
    let correction = match target_value {
        Some(target) => {
            let realized = solve_critical(&spec)?.value_c();
            // (r/4πi)(𝒲(realized) − 𝒲(target))
            Some((realized - target) * (r as f64) / num_complex::Complex64::new(0.0, 4.0 * PI))
        }
        None => None,
    };
    Ok(RawRow { log, kappa_phase, correction })
}

/// Growth table for the presentation (plain when `cop` is `None`) at the
/// cone angles `theta`, one row per level in `r_list`.
pub fn growth_series(
    pres: &FslPresentation,
    cop: Option<&ChangeOfPairSpec>,
    theta: &[f64],
    r_list: &[u32],
    opts: GrowthOptions,
) -> Result<GrowthTable> {
    if theta.len() != pres.n() {
        return Err(Error::Arity { expected: pres.n(), got: theta.len() });
    }
    for w in r_list.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("levels must be strictly increasing".into()));
        }
    }
    let choices: Vec<ColorChoice> = r_list
        .iter()
        .map(|&r| color_sequence(theta, opts.branch, r))
        .collect::<Result<_>>()?;
    let target_value = if opts.correct_angles {
        let spec = target_spec(pres, cop, theta, opts.branch)?;
        if spec.out_of_range() {
            None
        } else {
            Some(solve_critical(&spec)?.value_c())
        }
    } else {
        None
    };

    let raw: Vec<Result<RawRow>> = r_list
        .par_iter()
        .zip(choices.par_iter())
        .map(|(&r, choice)| raw_row(pres, cop, choice, target_value, r, &opts))
        .collect();

    let c = pres.c() as u64;
    let mut rows = Vec::with_capacity(r_list.len());
    let mut prev: Option<f64> = None;
    let mut max_jump: f64 = 0.0;
    for ((&r, choice), raw) in r_list.iter().zip(choices).zip(raw) {
        let mut row = GrowthRow {
            r,
            colors: choice.colors,
            realized: choice.realized,
            value: None,
            correction: None,
            error: None,
        };
        match raw {
            Ok(raw) => {
                let corr = raw.correction.unwrap_or_default();
                // normalized phase: arg RT − arg κ_r − Im(correction) + r·c·π/2
                let drift = ((r as u64 * c) % 4) as f64 * PI / 2.0;
                let mut psi = raw.log.phase - raw.kappa_phase - corr.im + drift;
                if let Some(p) = prev {
                    psi -= 2.0 * PI * ((psi - p) / (2.0 * PI)).round();
                    max_jump = max_jump.max((psi - p).abs());
                } else {
                    psi -= 2.0 * PI * (psi / (2.0 * PI)).round();
                }
                prev = Some(psi);
                let scale = 4.0 * PI / r as f64;
                let re = scale * (raw.log.logmag - corr.re);
                let im = scale * psi - 2.0 * c as f64 * PI * PI;
                row.value = Some([re, im]);
                row.correction = raw.correction.map(|z| [z.re, z.im]);
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        rows.push(row);
    }
    Ok(GrowthTable {
        presentation: pres.name.clone(),
        change_of_pair: cop.map(|c| c.i_set.iter().map(|i| i + 1).collect()),
        theta: theta.to_vec(),
        branch: opts.branch,
        rows,
        max_jump,
    })
}

/// Least-squares fit of `y = a + b·log r/r + c/r`, separately for the real
/// and imaginary parts.
#[derive(Clone, Debug, Serialize)]
pub struct FitResult {
    pub limit: [f64; 2],
    pub b: [f64; 2],
    pub c: [f64; 2],
    /// Euclidean norm of the residuals, both parts combined.
    pub residual: f64,
    pub rows: usize,
}

/// Fit one real sequence; returns `(a, b, c, residual)`.
pub fn fit_real(rs: &[u32], ys: &[f64]) -> Result<(f64, f64, f64, f64)> {
    if rs.len() < 5 {
        return Err(Error::TooFewRows { needed: 5, got: rs.len() });
    }
    let x = DMatrix::from_fn(rs.len(), 3, |i, j| {
        let r = rs[i] as f64;
        match j {
            0 => 1.0,
            1 => r.ln() / r,
            _ => 1.0 / r,
        }
    });
    let y = DVector::from_column_slice(ys);
    let (beta, res) = least_squares(&x, &y)?;
    Ok((beta[0], beta[1], beta[2], res))
}

pub fn fit_limit(table: &GrowthTable) -> Result<FitResult> {
    let pts = table.points();
    let rs: Vec<u32> = pts.iter().map(|p| p.0).collect();
    let re: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let im: Vec<f64> = pts.iter().map(|p| p.2).collect();
    let (a0, b0, c0, e0) = fit_real(&rs, &re)?;
    let (a1, b1, c1, e1) = fit_real(&rs, &im)?;
    Ok(FitResult {
        limit: [a0, a1],
        b: [b0, b1],
        c: [c0, c1],
        residual: e0.hypot(e1),
        rows: rs.len(),
    })
}

/// `(2π/r)·log|6j|` at the six colors of angle 0, per level.
pub fn costantino_series(r_list: &[u32], precision: Precision) -> Result<Vec<(u32, f64)>> {
    r_list
        .par_iter()
        .map(|&r| {
            let ctx = RootContext::new(r as i64, precision)?;
            let m = color_sequence(&[0.0], Branch::Below, r)?.colors[0];
            let six = SixTuple::new(&ctx, [m; 6])?;
            Ok((r, costantino_ratio(&ctx, &six)?))
        })
        .collect()
}

/// Extrapolated 6j growth against v₈.
#[derive(Clone, Debug, Serialize)]
pub struct CostantinoFit {
    pub rows: Vec<(u32, f64)>,
    pub limit: f64,
    pub b: f64,
    pub c: f64,
    pub residual: f64,
    pub reference: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn costantino_fit(r_list: &[u32], precision: Precision) -> Result<CostantinoFit> {
    let rows = costantino_series(r_list, precision)?;
    let rs: Vec<u32> = rows.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = rows.iter().map(|p| p.1).collect();
    let (a, b, c, residual) = fit_real(&rs, &ys)?;
    let reference = v8();
    let gap = (a - reference).abs();
    Ok(CostantinoFit {
        rows,
        limit: a,
        b,
        c,
        residual,
        reference,
        gap,
        tolerance: COSTANTINO_LIMIT,
        pass: gap <= COSTANTINO_LIMIT,
    })
}

/// The fitted limit set against the critical value of the potential.
#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub table: GrowthTable,
    pub fit: FitResult,
    pub volume: f64,
    pub cs: f64,
    /// |Re limit − Vol|, and the same relative to Vol.
    pub volume_gap: f64,
    pub volume_rel_gap: f64,
    /// Distance of Im limit from CS modulo π².
    pub cs_gap: f64,
    /// Volume tolerance: relative for a change of pair, absolute otherwise.
    pub volume_tolerance: f64,
    pub cs_tolerance: f64,
    pub pass: bool,
}

pub fn conjecture_report(
    pres: &FslPresentation,
    cop: Option<&ChangeOfPairSpec>,
    theta: &[f64],
    r_list: &[u32],
    opts: GrowthOptions,
) -> Result<ConjectureReport> {
    let crit = solve_critical(&target_spec(pres, cop, theta, opts.branch)?)?;
    let table = growth_series(pres, cop, theta, r_list, opts)?;
    let fit = fit_limit(&table)?;
    let volume_gap = (fit.limit[0] - crit.vol).abs();
    let volume_rel_gap = volume_gap / crit.vol.abs();
    let cs_gap = cs_distance(fit.limit[1], crit.cs);
    let (volume_tolerance, cs_tolerance, vol_ok) = match cop {
        Some(_) => (COP_VOLUME_REL, COP_CS_PI2 * PI * PI, volume_rel_gap <= COP_VOLUME_REL),
        None => (FSL_LIMIT, FSL_LIMIT, volume_gap <= FSL_LIMIT),
    };
    let pass = vol_ok && cs_gap <= cs_tolerance;
    Ok(ConjectureReport {
        table,
        fit,
        volume: crit.vol,
        cs: crit.cs,
        volume_gap,
        volume_rel_gap,
        cs_gap,
        volume_tolerance,
        cs_tolerance,
        pass,
    })
}
