use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Reduce an angle to the half-open interval (−π, π].
pub fn wrap_phase(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let w = theta.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// A complex number stored as `exp(logmag + i·phase)`.
///
/// Zero is `logmag = −∞, phase = 0`. Products never overflow; sums factor
/// out the larger magnitude first.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub logmag: f64,
    pub phase: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        logmag: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: LogComplex = LogComplex {
        logmag: 0.0,
        phase: 0.0,
    };

    pub fn new(logmag: f64, phase: f64) -> Self {
        if logmag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex {
            logmag,
            phase: wrap_phase(phase),
        }
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            LogComplex::new(x.ln(), 0.0)
        } else {
            LogComplex::new((-x).ln(), PI)
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        LogComplex::new(z.norm().ln(), z.arg())
    }

    /// `exp(w)` for complex `w`.
    pub fn exp(w: Complex64) -> Self {
        LogComplex::new(w.re, w.im)
    }

    /// Unit-modulus value `exp(i·theta)`.
    pub fn unit(theta: f64) -> Self {
        LogComplex::new(0.0, theta)
    }

    pub fn is_zero(&self) -> bool {
        self.logmag == f64::NEG_INFINITY
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.logmag.exp(), self.phase)
    }

    /// The principal logarithm `logmag + i·phase`.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.logmag, self.phase)
    }

    pub fn abs(&self) -> f64 {
        self.logmag.exp()
    }

    pub fn conj(&self) -> Self {
        LogComplex::new(self.logmag, -self.phase)
    }

    pub fn recip(&self) -> Self {
        LogComplex::new(-self.logmag, -self.phase)
    }

    pub fn powi(&self, n: i64) -> Self {
        if self.is_zero() {
            return if n == 0 { Self::ONE } else { Self::ZERO };
        }
        LogComplex::new(self.logmag * n as f64, self.phase * n as f64)
    }

    /// Square root on the branch `phase/2`, so a negative real `x` maps to
    /// `i·√|x|`.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        LogComplex::new(0.5 * self.logmag, 0.5 * self.phase)
    }

    pub fn scale_real(&self, x: f64) -> Self {
        *self * LogComplex::from_real(x)
    }

    pub fn add(&self, other: &LogComplex) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.logmag >= other.logmag {
            (self, other)
        } else {
            (other, self)
        };
        let rel = Complex64::from_polar((small.logmag - big.logmag).exp(), small.phase - big.phase);
        let s = Complex64::new(1.0, 0.0) + rel;
        // cancellation below rounding of the larger term
        if s.norm() <= 2.0 * f64::EPSILON {
            return Self::ZERO;
        }
        LogComplex::new(big.logmag + s.norm().ln(), big.phase + s.arg())
    }

    /// Relative distance `|a − b| / max(|a|, |b|)`.
    pub fn rel_diff(&self, other: &LogComplex) -> f64 {
        if self.is_zero() && other.is_zero() {
            return 0.0;
        }
        let m = self.logmag.max(other.logmag);
        let a = Complex64::from_polar((self.logmag - m).exp(), self.phase);
        let b = Complex64::from_polar((other.logmag - m).exp(), other.phase);
        (a - b).norm()
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.logmag + rhs.logmag, self.phase + rhs.phase)
    }
}

impl Div for LogComplex {
    type Output = LogComplex;
    fn div(self, rhs: LogComplex) -> LogComplex {
        self * rhs.recip()
    }
}

impl Neg for LogComplex {
    type Output = LogComplex;
    fn neg(self) -> LogComplex {
        if self.is_zero() {
            return self;
        }
        LogComplex::new(self.logmag, self.phase + PI)
    }
}

impl fmt::Display for LogComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exp({} + {}i)", self.logmag, self.phase)
    }
}

/// Compensated (Neumaier) summation of plain complex numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

fn neumaier(sum: f64, comp: f64, x: f64) -> (f64, f64) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        (sum - t) + x
    } else {
        (x - t) + sum
    };
    (t, comp + c)
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        let (re, cre) = neumaier(self.sum.re, self.comp.re, z.re);
        let (im, cim) = neumaier(self.sum.im, self.comp.im, z.im);
        self.sum = Complex64::new(re, im);
        self.comp = Complex64::new(cre, cim);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// Sum of log-scale terms: factors out the largest magnitude, then adds the
/// rescaled terms with compensation. Deterministic for a fixed term order.
pub fn log_sum(terms: &[LogComplex]) -> LogComplex {
    let m = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.logmag)
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return LogComplex::ZERO;
    }
    let mut acc = CompensatedSum::new();
    for t in terms.iter().filter(|t| !t.is_zero()) {
        acc.add(Complex64::from_polar((t.logmag - m).exp(), t.phase));
    }
    LogComplex::from_complex(acc.value()) * LogComplex::new(m, 0.0)
}

/// Pairwise reduction with a shape fixed by the slice length alone.
pub fn tree_sum(terms: &[LogComplex]) -> LogComplex {
    match terms.len() {
        0 => LogComplex::ZERO,
        1 => terms[0],
        n => {
            let (a, b) = terms.split_at(n / 2);
            tree_sum(a).add(&tree_sum(b))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_keeps_half_open_interval() {
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(7.0) - (7.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn zero_is_canonical() {
        let z = LogComplex::new(f64::NEG_INFINITY, 2.0);
        assert_eq!(z.phase, 0.0);
        assert!((z * LogComplex::from_real(3.0)).is_zero());
        assert_eq!(LogComplex::from_real(0.0), LogComplex::ZERO);
    }

    #[test]
    fn addition_factors_out_larger_magnitude() {
        let a = LogComplex::new(800.0, 0.3);
        let b = LogComplex::new(799.0, -1.1);
        let s = a.add(&b);
        let expect = Complex64::from_polar(1.0, 0.3) + Complex64::from_polar((-1.0f64).exp(), -1.1);
        assert!((s.logmag - 800.0 - expect.norm().ln()).abs() < 1e-12);
        assert!((s.phase - expect.arg()).abs() < 1e-12);
        assert!(LogComplex::from_real(2.0).add(&LogComplex::from_real(-2.0)).is_zero());
    }

    #[test]
    fn sqrt_of_negative_is_positive_imaginary() {
        let s = LogComplex::from_real(-4.0).sqrt().to_complex();
        assert!((s - Complex64::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn log_sum_matches_direct_sum() {
        let terms: Vec<LogComplex> = (0..10)
            .map(|k| LogComplex::from_real(if k % 2 == 0 { 1.0 } else { -0.5 } * (k as f64 + 1.0)))
            .collect();
        let direct: f64 = (0..10)
            .map(|k| if k % 2 == 0 { 1.0 } else { -0.5 } * (k as f64 + 1.0))
            .sum();
        assert!((log_sum(&terms).to_complex().re - direct).abs() < 1e-13);
        assert!((tree_sum(&terms).to_complex().re - direct).abs() < 1e-13);
    }
}
