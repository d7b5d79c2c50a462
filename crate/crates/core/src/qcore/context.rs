use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::dd::{Dd, ScaledDd};
use super::logc::{CompensatedSum, LogComplex};
use crate::error::{Error, Result};

/// Arithmetic used inside the alternating 6j sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Standard,
    /// Double-double, about 106 significant bits.
    Extended,
}

impl Precision {
    pub fn binary_digits(self) -> u32 {
        match self {
            Precision::Standard => 53,
            Precision::Extended => 106,
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "standard" => Ok(Precision::Standard),
            "extended" => Ok(Precision::Extended),
            other => Err(format!("unknown precision '{other}'")),
        }
    }
}

/// Everything that depends only on the odd level r.
///
/// Tables are filled once in [`RootContext::new`]; the context is immutable
/// afterwards and can be shared freely between threads.
#[derive(Clone, Debug)]
pub struct RootContext {
    r: u32,
    q: Complex64,
    mu_r: f64,
    precision: Precision,
    qint: Vec<f64>,
    fact_log: Vec<f64>,
    fact_neg: Vec<bool>,
    dd_fact: Vec<ScaledDd>,
}

impl RootContext {
    /// Build the context for level `r` (odd, at least 3).
    ///
    /// Factorial tables run up to `[r−1]!` because the 6j denominators
    /// `[T+1]!` reach it.
    pub fn new(r: i64, precision: Precision) -> Result<RootContext> {
        if r < 3 || r % 2 == 0 || r > u32::MAX as i64 {
            return Err(Error::InvalidLevel(r));
        }
        let rf = r as f64;
        let s1 = (TAU / rf).sin();
        let qint: Vec<f64> = (0..r)
            .map(|n| {
                if n == 0 {
                    0.0
                } else if n == 1 {
                    1.0
                } else {
                    // sin(π − x) = sin(x) keeps the symmetry [r−n] = −[n] exact
                    let k = if 2 * n < r { n } else { r - n };
                    let v = (TAU * k as f64 / rf).sin() / s1;
                    if 2 * n < r {
                        v
                    } else {
                        -v
                    }
                }
            })
            .collect();
        let mut fact_log = vec![0.0; r as usize];
        let mut fact_neg = vec![false; r as usize];
        let mut acc = CompensatedSum::new();
        for n in 1..r as usize {
            acc.add(Complex64::new(qint[n].abs().ln(), 0.0));
            fact_log[n] = acc.value().re;
            fact_neg[n] = fact_neg[n - 1] ^ (qint[n] < 0.0);
        }
        let dd_fact = match precision {
            Precision::Standard => Vec::new(),
            Precision::Extended => {
                let two_pi = Dd::PI * Dd::from_f64(2.0);
                let s1 = (two_pi / Dd::from_f64(rf)).sin();
                let mut out = vec![ScaledDd::ONE; r as usize];
                for n in 1..r as usize {
                    let k = if 2 * n < r as usize { n } else { r as usize - n };
                    let mut v = (two_pi * Dd::from_f64(k as f64) / Dd::from_f64(rf)).sin() / s1;
                    if 2 * n > r as usize {
                        v = -v;
                    }
                    out[n] = out[n - 1].mul(ScaledDd::new(v, 0));
                }
                out
            }
        };
        Ok(RootContext {
            r: r as u32,
            q: Complex64::from_polar(1.0, TAU / rf),
            mu_r: 2.0 * s1 / rf.sqrt(),
            precision,
            qint,
            fact_log,
            fact_neg,
            dd_fact,
        })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn ri(&self) -> i64 {
        self.r as i64
    }

    pub fn q(&self) -> Complex64 {
        self.q
    }

    pub fn mu_r(&self) -> f64 {
        self.mu_r
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// The color set I_r = {0, 2, …, r−3}.
    pub fn colors(&self) -> Vec<i64> {
        (0..=self.ri() - 3).step_by(2).collect()
    }

    /// |I_r| = (r−1)/2.
    pub fn n_colors(&self) -> usize {
        (self.r as usize - 1) / 2
    }

    pub fn check_color(&self, m: i64) -> Result<()> {
        if m < 0 || m > self.ri() - 3 || m % 2 != 0 {
            return Err(Error::InvalidColor {
                color: m,
                max: self.ri() - 3,
            });
        }
        Ok(())
    }

    /// Quantum integer `[n] = sin(2πn/r)/sin(2π/r)` for any integer `n`
    /// (periodic with period r).
    pub fn qint(&self, n: i64) -> f64 {
        self.qint[n.rem_euclid(self.ri()) as usize]
    }

    fn check_fact(&self, n: i64) -> Result<()> {
        if n < 0 || n > self.ri() - 1 {
            return Err(Error::OutOfRange {
                index: n,
                max: self.ri() - 1,
            });
        }
        Ok(())
    }

    /// `(ln|[n]!|, [n]! < 0)` without bounds checks beyond debug asserts.
    #[inline]
    pub(crate) fn fact_raw(&self, n: usize) -> (f64, bool) {
        (self.fact_log[n], self.fact_neg[n])
    }

    pub(crate) fn fact_dd(&self, n: usize) -> ScaledDd {
        self.dd_fact[n]
    }

    /// `[n]! = [1][2]⋯[n]` as a signed log value.
    pub fn qfact_bracket(&self, n: i64) -> Result<LogComplex> {
        self.check_fact(n)?;
        let (l, neg) = self.fact_raw(n as usize);
        Ok(LogComplex::new(l, if neg { PI } else { 0.0 }))
    }

    /// `{n}! = {1}ⁿ [n]!` with `{1} = q − q⁻¹ = 2i·sin(2π/r)`.
    pub fn qfact_brace(&self, n: i64) -> Result<LogComplex> {
        let b = self.qfact_bracket(n)?;
        let one = LogComplex::new((2.0 * (TAU / self.r as f64).sin()).ln(), PI / 2.0);
        Ok(b * one.powi(n))
    }

    /// `{1} = 2i·sin(2π/r)`.
    pub fn brace_one(&self) -> Complex64 {
        Complex64::new(0.0, 2.0 * (TAU / self.r as f64).sin())
    }

    /// `q^e` for an integer exponent, reduced modulo r before rounding.
    pub fn qpow(&self, e: i64) -> LogComplex {
        let k = e.rem_euclid(self.ri());
        LogComplex::unit(TAU * k as f64 / self.r as f64)
    }

    /// `q^{num/den}` after checking that `num/den` is an integer.
    pub fn qpow_frac(&self, num: i64, den: i64) -> Result<LogComplex> {
        if num % den != 0 {
            return Err(Error::NonIntegral(format!("{num}/{den}")));
        }
        Ok(self.qpow(num / den))
    }
}
