//! Level context, quantum integers and factorials, log-scale complex numbers,
//! admissibility predicates and the discrete Fourier kernel.

mod context;
pub mod dd;
mod logc;

pub use context::{Precision, RootContext};
pub use logc::{log_sum, tree_sum, wrap_phase, CompensatedSum, LogComplex};

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Edge triples meeting at the four vertices of a tetrahedron, 0-based.
pub const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 4, 5], [1, 3, 5], [2, 3, 4]];
/// Edge quadruples whose half-sums bound the 6j summation from above, 0-based.
pub const QUADS: [[usize; 4]; 3] = [[0, 1, 3, 4], [0, 2, 3, 5], [1, 2, 4, 5]];

/// A validated sequence of colors in I_r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorTuple(Vec<i64>);

impl ColorTuple {
    pub fn new(ctx: &RootContext, colors: &[i64]) -> Result<ColorTuple> {
        for &m in colors {
            ctx.check_color(m)?;
        }
        Ok(ColorTuple(colors.to_vec()))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

/// r-admissibility: triangle inequalities, even sum and `m1+m2+m3 ≤ 2(r−2)`.
pub fn admissible_triple(ctx: &RootContext, m1: i64, m2: i64, m3: i64) -> bool {
    let r = ctx.ri();
    m1 >= 0
        && m2 >= 0
        && m3 >= 0
        && (m1 + m2 + m3) % 2 == 0
        && m1 + m2 - m3 >= 0
        && m2 + m3 - m1 >= 0
        && m3 + m1 - m2 >= 0
        && m1 + m2 + m3 <= 2 * (r - 2)
}

/// All four vertex triples of a six-tuple are r-admissible.
pub fn admissible_six(ctx: &RootContext, m: &[i64; 6]) -> bool {
    TRIPLES
        .iter()
        .all(|t| admissible_triple(ctx, m[t[0]], m[t[1]], m[t[2]]))
}

/// Integer hyperideal type: for each vertex triple,
/// `0 ≤ mi+mj−mk < r−2` in every order and `r−2 ≤ mi+mj+mk ≤ 2(r−2)`.
pub fn hyperideal_int(ctx: &RootContext, m: &[i64; 6]) -> bool {
    let r = ctx.ri();
    TRIPLES.iter().all(|t| {
        let (a, b, c) = (m[t[0]], m[t[1]], m[t[2]]);
        let s = a + b + c;
        [(a, b, c), (b, c, a), (c, a, b)]
            .iter()
            .all(|&(x, y, z)| x + y - z >= 0 && x + y - z < r - 2)
            && s >= r - 2
            && s <= 2 * (r - 2)
            && s % 2 == 0
    })
}

/// Angle hyperideal type: `0 ≤ αi+αj−αk ≤ 2π` and `2π ≤ αi+αj+αk ≤ 4π`.
pub fn hyperideal_angles(alpha: &[f64; 6]) -> bool {
    TRIPLES.iter().all(|t| {
        let (a, b, c) = (alpha[t[0]], alpha[t[1]], alpha[t[2]]);
        let s = a + b + c;
        [(a, b, c), (b, c, a), (c, a, b)]
            .iter()
            .all(|&(x, y, z)| x + y - z >= 0.0 && x + y - z <= 2.0 * PI)
            && (2.0 * PI..=4.0 * PI).contains(&s)
    })
}

/// Fourier kernel `H(m,n) = (−1)^{m+n} [(m+1)(n+1)]`.
pub fn dft_kernel(ctx: &RootContext, m: i64, n: i64) -> f64 {
    let sign = if (m + n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * ctx.qint((m + 1) * (n + 1))
}

/// `(−1)^{num/den}` after checking integrality of the exponent.
pub fn sign_pow_frac(num: i64, den: i64) -> Result<f64> {
    if num % den != 0 {
        return Err(Error::NonIntegral(format!("{num}/{den}")));
    }
    Ok(if (num / den).rem_euclid(2) == 0 { 1.0 } else { -1.0 })
}
