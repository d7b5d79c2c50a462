//! Invariants of fundamental shadow links and of the manifolds obtained by
//! a change of pair, as finite state sums of 6j-symbols.

mod presentation;

pub use presentation::{ChangeOfPairSpec, FslPresentation, TETRA1};

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qcore::{admissible_six, dft_kernel, log_sum, sign_pow_frac, tree_sum, LogComplex, RootContext};
use crate::sixj::{sixj_direct, SixTuple};
use crate::tolerances::GRID_CAP;

/// Grid points summed per parallel chunk. Chunk boundaries depend only on
/// the grid, so the reduction tree and the result do not depend on the
/// number of workers.
const CHUNK: usize = 256;

/// Cost guard for color-grid sums.
#[derive(Clone, Copy, Debug)]
pub struct GridOptions {
    pub cap: u128,
    pub force: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { cap: GRID_CAP, force: false }
    }
}

impl GridOptions {
    pub fn forced() -> Self {
        GridOptions { cap: GRID_CAP, force: true }
    }

    fn check(&self, base: usize, dims: usize) -> Result<u128> {
        let points = (base as u128).checked_pow(dims as u32).unwrap_or(u128::MAX);
        if points > self.cap && !self.force {
            return Err(Error::GridTooLarge { points, cap: self.cap });
        }
        Ok(points)
    }
}

/// A state-sum value with the number of grid points that were skipped
/// because some block was inadmissible.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StateSum {
    pub value: LogComplex,
    pub skipped: u64,
    pub points: u64,
}

/// Decode a flat grid index into colors, last axis fastest.
fn decode(mut idx: usize, dims: usize, nc: usize, out: &mut [i64]) {
    for d in (0..dims).rev() {
        out[d] = 2 * (idx % nc) as i64;
        idx /= nc;
    }
}

/// Sum `term(index)` over `0..points` with fixed chunking and a fixed
/// reduction tree.
fn grid_sum<F>(points: usize, term: F) -> StateSum
where
    F: Fn(usize) -> Option<LogComplex> + Sync,
{
    let starts: Vec<usize> = (0..points).step_by(CHUNK).collect();
    let partial: Vec<(LogComplex, u64)> = starts
        .par_iter()
        .map(|&s| {
            let mut terms = Vec::with_capacity(CHUNK);
            let mut skipped = 0;
            for i in s..(s + CHUNK).min(points) {
                match term(i) {
                    Some(t) => terms.push(t),
                    None => skipped += 1,
                }
            }
            (log_sum(&terms), skipped)
        })
        .collect();
    let values: Vec<LogComplex> = partial.iter().map(|p| p.0).collect();
    StateSum {
        value: tree_sum(&values),
        skipped: partial.iter().map(|p| p.1).sum(),
        points: points as u64,
    }
}

/// Per-block six-tuples for a coloring of the components.
pub fn expand_coloring(pres: &FslPresentation, colors: &[i64]) -> Result<Vec<SixTuple>> {
    if colors.len() != pres.n() {
        return Err(Error::Arity { expected: pres.n(), got: colors.len() });
    }
    Ok(pres.blocks.iter().map(|b| SixTuple { m: b.map(|id| colors[id - 1]) }).collect())
}

fn check_colors(ctx: &RootContext, colors: &[i64]) -> Result<()> {
    colors.iter().try_for_each(|&m| ctx.check_color(m))
}

/// `(−1)^{ι m/2} q^{(p + ι/2) m(m+2)/2}`.
fn framing_phase(ctx: &RootContext, p: i64, iota: i64, m: i64) -> Result<LogComplex> {
    let s = sign_pow_frac(iota * m, 2)?;
    Ok(ctx.qpow_frac((2 * p + iota) * m * (m + 2), 4)?.scale_real(s))
}

/// Product of the block 6j-symbols, or `None` if some block is
/// inadmissible.
fn block_product(ctx: &RootContext, pres: &FslPresentation, colors: &[i64]) -> Result<Option<LogComplex>> {
    let mut v = LogComplex::ONE;
    for b in &pres.blocks {
        let six = SixTuple { m: b.map(|id| colors[id - 1]) };
        if !admissible_six(ctx, &six.m) {
            return Ok(None);
        }
        v = v * sixj_direct(ctx, &six)?;
    }
    Ok(Some(v))
}

/// The relative Reshetikhin–Turaev invariant of the fundamental shadow
/// link, together with the number of inadmissible blocks (a nonzero count
/// means the value is the conventional zero).
pub fn rt_fsl_detail(ctx: &RootContext, pres: &FslPresentation, colors: &[i64]) -> Result<(LogComplex, usize)> {
    if colors.len() != pres.n() {
        return Err(Error::Arity { expected: pres.n(), got: colors.len() });
    }
    check_colors(ctx, colors)?;
    let bad = expand_coloring(pres, colors)?
        .iter()
        .filter(|s| !admissible_six(ctx, &s.m))
        .count();
    if bad > 0 {
        return Ok((LogComplex::ZERO, bad));
    }
    let mut v = LogComplex::from_real(ctx.mu_r()).powi(-(pres.c() as i64));
    for (k, &m) in colors.iter().enumerate() {
        v = v * framing_phase(ctx, pres.p[k], pres.iota[k], m)?;
    }
    let blocks = block_product(ctx, pres, colors)?.expect("admissibility checked");
    Ok((v * blocks, 0))
}

/// The relative Reshetikhin–Turaev invariant of the fundamental shadow link.
pub fn rt_fsl(ctx: &RootContext, pres: &FslPresentation, colors: &[i64]) -> Result<LogComplex> {
    Ok(rt_fsl_detail(ctx, pres, colors)?.0)
}

/// `e^{−σ(−3/r − (r+1)/4)iπ}` with the exponent reduced exactly.
pub fn sigma_phase(r: u32, sigma: i64) -> LogComplex {
    let r = r as i64;
    // σπ(r+1)/4 and 3σπ/r, each reduced modulo 2π
    let a = (sigma * (r + 1)).rem_euclid(8) as f64 * PI / 4.0;
    let b = (3 * sigma).rem_euclid(2 * r) as f64 * PI / r as f64;
    LogComplex::unit(a + b)
}

/// The invariant after the change of pair on `cop.i_set`, colored by
/// `n_i` (in the order of `cop.i_set`) and `m_j` (in the order of the
/// remaining components).
pub fn rt_cop(
    ctx: &RootContext,
    pres: &FslPresentation,
    cop: &ChangeOfPairSpec,
    n_i: &[i64],
    m_j: &[i64],
    opts: GridOptions,
) -> Result<StateSum> {
    let k = cop.i_set.len();
    let j_set = cop.j_set(pres.n());
    if n_i.len() != k {
        return Err(Error::Arity { expected: k, got: n_i.len() });
    }
    if m_j.len() != j_set.len() {
        return Err(Error::Arity { expected: j_set.len(), got: m_j.len() });
    }
    check_colors(ctx, n_i)?;
    check_colors(ctx, m_j)?;
    let nc = ctx.n_colors();
    let points = opts.check(nc, k)? as usize;

    let mut pre = LogComplex::from_real(ctx.mu_r()).powi(k as i64 - pres.c() as i64) * sigma_phase(ctx.r(), cop.sigma);
    for (pos, &n) in n_i.iter().enumerate() {
        pre = pre * ctx.qpow_frac(cop.q[pos] * n * (n + 2), 2)?;
    }
    for (pos, &j) in j_set.iter().enumerate() {
        pre = pre * framing_phase(ctx, pres.p[j], pres.iota[j], m_j[pos])?;
    }

    let mut base = vec![0i64; pres.n()];
    for (pos, &j) in j_set.iter().enumerate() {
        base[j] = m_j[pos];
    }
    let term = |idx: usize| -> Option<LogComplex> {
        let mut mi = [0i64; 16];
        let mi = &mut mi[..k.max(1)];
        decode(idx, k, nc, mi);
        let mut colors = base.clone();
        let mut t = LogComplex::ONE;
        for (pos, &i) in cop.i_set.iter().enumerate() {
            let m = mi[pos];
            colors[i] = m;
            let phase = framing_phase(ctx, pres.p[i], pres.iota[i], m).ok()?;
            let h = ctx.qint((m + 1) * (n_i[pos] + 1));
            t = t * phase * LogComplex::from_real(h);
        }
        let blocks = block_product(ctx, pres, &colors).ok()??;
        Some(t * blocks)
    };
    if k > 16 {
        return Err(Error::Unsupported(format!("{k} components in I")));
    }
    let mut s = grid_sum(points, term);
    s.value = pre * s.value;
    Ok(s)
}

/// A function on colorings of the listed components, stored densely with
/// the last axis varying fastest.
#[derive(Clone, Debug)]
pub struct TabulatedInvariant {
    /// Component indices (0-based) labelling the axes.
    pub axes: Vec<usize>,
    pub n_colors: usize,
    pub values: Vec<LogComplex>,
}

impl TabulatedInvariant {
    pub fn new(axes: Vec<usize>, n_colors: usize, values: Vec<LogComplex>) -> Result<Self> {
        let size = n_colors.pow(axes.len() as u32);
        if values.len() != size {
            return Err(Error::AxisMismatch(format!("{} values for {} grid points", values.len(), size)));
        }
        Ok(TabulatedInvariant { axes, n_colors, values })
    }

    pub fn index(&self, colors: &[i64]) -> usize {
        colors.iter().fold(0, |acc, &m| acc * self.n_colors + (m / 2) as usize)
    }

    pub fn get(&self, colors: &[i64]) -> LogComplex {
        self.values[self.index(colors)]
    }

    fn positions(&self, sub: &[usize]) -> Result<Vec<usize>> {
        sub.iter()
            .map(|a| {
                self.axes
                    .iter()
                    .position(|x| x == a)
                    .ok_or_else(|| Error::AxisMismatch(format!("axis {} not in table", a + 1)))
            })
            .collect()
    }
}

/// Tabulate `rt_fsl` over all colorings.
pub fn tabulate_rt_fsl(ctx: &RootContext, pres: &FslPresentation, opts: GridOptions) -> Result<TabulatedInvariant> {
    let n = pres.n();
    let nc = ctx.n_colors();
    let points = opts.check(nc, n)? as usize;
    let values: Result<Vec<LogComplex>> = (0..points)
        .into_par_iter()
        .map(|idx| {
            let mut m = vec![0; n];
            decode(idx, n, nc, &mut m);
            rt_fsl(ctx, pres, &m)
        })
        .collect();
    TabulatedInvariant::new((0..n).collect(), nc, values?)
}

/// `f̂(n_I)(m_J) = μ^{|I|} Σ_{m_I} ∏ H(m_i, n_i) f(m_I, m_J)` as a table over
/// the remaining axes.
pub fn partial_dft(
    ctx: &RootContext,
    f: &TabulatedInvariant,
    i_axes: &[usize],
    n_i: &[i64],
) -> Result<TabulatedInvariant> {
    if i_axes.len() != n_i.len() {
        return Err(Error::Arity { expected: i_axes.len(), got: n_i.len() });
    }
    if f.n_colors != ctx.n_colors() {
        return Err(Error::AxisMismatch("table built at a different level".into()));
    }
    check_colors(ctx, n_i)?;
    let ipos = f.positions(i_axes)?;
    let jpos: Vec<usize> = (0..f.axes.len()).filter(|p| !ipos.contains(p)).collect();
    let nc = f.n_colors;
    let k = ipos.len();
    let inner = nc.pow(k as u32);
    let mu = LogComplex::from_real(ctx.mu_r()).powi(k as i64);
    let out: Vec<LogComplex> = (0..nc.pow(jpos.len() as u32))
        .into_par_iter()
        .map(|jdx| {
            let mut full = vec![0i64; f.axes.len()];
            let mut mj = vec![0i64; jpos.len()];
            decode(jdx, jpos.len(), nc, &mut mj);
            for (x, &p) in jpos.iter().enumerate() {
                full[p] = mj[x];
            }
            let mut mi = vec![0i64; k];
            let terms: Vec<LogComplex> = (0..inner)
                .map(|idx| {
                    decode(idx, k, nc, &mut mi);
                    let mut h = 1.0;
                    for (x, &p) in ipos.iter().enumerate() {
                        full[p] = mi[x];
                        h *= dft_kernel(ctx, mi[x], n_i[x]);
                    }
                    f.get(&full).scale_real(h)
                })
                .collect();
            mu * log_sum(&terms)
        })
        .collect();
    TabulatedInvariant::new(jpos.iter().map(|&p| f.axes[p]).collect(), nc, out)
}

/// The transform in the `i_axes` directions, keeping every axis: entry at
/// `(n_I, m_J)` is `f̂(n_I)(m_J)`.
pub fn dft_full(ctx: &RootContext, f: &TabulatedInvariant, i_axes: &[usize]) -> Result<TabulatedInvariant> {
    let ipos = f.positions(i_axes)?;
    let nc = f.n_colors;
    let k = ipos.len();
    let mut values = vec![LogComplex::ZERO; f.values.len()];
    let mut ni = vec![0i64; k];
    for ndx in 0..nc.pow(k as u32) {
        decode(ndx, k, nc, &mut ni);
        let part = partial_dft(ctx, f, i_axes, &ni)?;
        let mut mj = vec![0i64; part.axes.len()];
        for (jdx, v) in part.values.iter().enumerate() {
            decode(jdx, part.axes.len(), nc, &mut mj);
            let mut full = vec![0i64; f.axes.len()];
            let mut jj = 0;
            for (p, slot) in full.iter_mut().enumerate() {
                if let Some(x) = ipos.iter().position(|&q| q == p) {
                    *slot = ni[x];
                } else {
                    *slot = mj[jj];
                    jj += 1;
                }
            }
            values[f.index(&full)] = *v;
        }
    }
    TabulatedInvariant::new(f.axes.clone(), nc, values)
}

/// Both sides of the Parseval identity for a change of pair.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PoissonReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    pub rel_err: f64,
    pub skipped: u64,
}

fn sum_squares(values: &[LogComplex]) -> LogComplex {
    let sq: Vec<LogComplex> = values.iter().map(|v| LogComplex::new(2.0 * v.logmag, 0.0)).collect();
    tree_sum(&sq)
}

/// `Σ_m |RT(m)|²` against `Σ_{n_I, m_J} |RT_cop(n_I, m_J)|²`, each side
/// evaluated independently.
pub fn poisson_check(
    ctx: &RootContext,
    pres: &FslPresentation,
    cop: &ChangeOfPairSpec,
    opts: GridOptions,
) -> Result<PoissonReport> {
    let n = pres.n();
    let nc = ctx.n_colors();
    let table = tabulate_rt_fsl(ctx, pres, opts)?;
    let lhs = sum_squares(&table.values);
    let k = cop.i_set.len();
    let j_len = n - k;
    opts.check(nc, n + k)?;
    let outer: Vec<Result<StateSum>> = (0..nc.pow(n as u32))
        .into_par_iter()
        .map(|idx| {
            let mut c = vec![0; n];
            decode(idx, n, nc, &mut c);
            rt_cop(ctx, pres, cop, &c[..k], &c[k..k + j_len], GridOptions::forced())
        })
        .collect();
    let mut sums = Vec::with_capacity(outer.len());
    let mut skipped = 0;
    for s in outer {
        let s = s?;
        skipped += s.skipped;
        sums.push(s.value);
    }
    let rhs = sum_squares(&sums);
    let rel_err = if lhs.is_zero() { rhs.abs() } else { (1.0 - (rhs.logmag - lhs.logmag).exp()).abs() };
    Ok(PoissonReport {
        lhs: lhs.logmag.exp(),
        rhs: rhs.logmag.exp(),
        ln_lhs: lhs.logmag,
        ln_rhs: rhs.logmag,
        rel_err,
        skipped,
    })
}

/// Turaev–Viro value `2^{h2} Σ_m |RT(m)|²`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TvReport {
    pub value: f64,
    pub ln_value: f64,
    pub h2_rank: u32,
}

pub fn tv_from_rt(ctx: &RootContext, pres: &FslPresentation, h2_rank: u32, opts: GridOptions) -> Result<TvReport> {
    let table = tabulate_rt_fsl(ctx, pres, opts)?;
    let s = sum_squares(&table.values);
    let ln_value = s.logmag + h2_rank as f64 * std::f64::consts::LN_2;
    Ok(TvReport { value: ln_value.exp(), ln_value, h2_rank })
}
