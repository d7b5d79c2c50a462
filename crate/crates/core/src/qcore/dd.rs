//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! giving about 106 significant bits.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const FRAC_PI_2: Dd = Dd {
        hi: std::f64::consts::FRAC_PI_2,
        lo: 6.123_233_995_736_766e-17,
    };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    /// Multiply by `2^e` (exact).
    pub fn ldexp(self, e: i32) -> Dd {
        let s = 2f64.powi(e);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let corr = ((self.hi - p) - e + self.lo) / (2.0 * x);
        let (hi, lo) = quick_two_sum(x, corr);
        Dd { hi, lo }
    }

    /// Natural logarithm, accurate to about 1e−30 relative.
    pub fn ln(self) -> Dd {
        let x0 = Dd::from_f64(self.hi.ln());
        // one Newton step on exp(y) = x
        x0 + self / x0.exp() - Dd::ONE
    }

    pub fn exp(self) -> Dd {
        let ln2 = Dd {
            hi: std::f64::consts::LN_2,
            lo: 2.319_046_813_846_299_6e-17,
        };
        let k = (self.hi / ln2.hi).round();
        let y = (self - ln2 * Dd::from_f64(k)).ldexp(-8);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..30 {
            term = term * y / Dd::from_f64(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-34 {
                break;
            }
        }
        for _ in 0..8 {
            sum = sum * sum;
        }
        sum.ldexp(k as i32)
    }

    /// Sine by quadrant reduction and Taylor series.
    pub fn sin(self) -> Dd {
        let k = (self.hi / std::f64::consts::FRAC_PI_2).round();
        let y = self - Dd::FRAC_PI_2 * Dd::from_f64(k);
        let quadrant = (k as i64).rem_euclid(4);
        match quadrant {
            0 => sin_taylor(y),
            1 => cos_taylor(y),
            2 => -sin_taylor(y),
            _ => -cos_taylor(y),
        }
    }
}

fn sin_taylor(y: Dd) -> Dd {
    let y2 = y * y;
    let mut term = y;
    let mut sum = y;
    let mut n = 1.0;
    loop {
        term = -(term * y2) / Dd::from_f64((n + 1.0) * (n + 2.0));
        n += 2.0;
        sum = sum + term;
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) {
            return sum;
        }
    }
}

fn cos_taylor(y: Dd) -> Dd {
    let y2 = y * y;
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut n = 0.0;
    loop {
        term = -(term * y2) / Dd::from_f64((n + 1.0) * (n + 2.0));
        n += 2.0;
        sum = sum + term;
        if term.hi.abs() < 1e-34 {
            return sum;
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

/// A double-double mantissa with a separate binary exponent, for products
/// whose magnitude leaves the `f64` range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledDd {
    pub mant: Dd,
    pub exp2: i64,
}

impl ScaledDd {
    pub const ONE: ScaledDd = ScaledDd {
        mant: Dd::ONE,
        exp2: 0,
    };

    pub fn new(mant: Dd, exp2: i64) -> ScaledDd {
        if mant.is_zero() {
            return ScaledDd { mant, exp2: 0 };
        }
        let e = mant.hi.abs().log2().floor() as i32;
        ScaledDd {
            mant: mant.ldexp(-e),
            exp2: exp2 + e as i64,
        }
    }

    pub fn mul(self, b: ScaledDd) -> ScaledDd {
        ScaledDd::new(self.mant * b.mant, self.exp2 + b.exp2)
    }

    pub fn div(self, b: ScaledDd) -> ScaledDd {
        ScaledDd::new(self.mant / b.mant, self.exp2 - b.exp2)
    }

    pub fn is_negative(self) -> bool {
        self.mant.hi < 0.0
    }

    /// `ln|x|` as a double-double.
    pub fn ln_abs(self) -> Dd {
        let ln2 = Dd {
            hi: std::f64::consts::LN_2,
            lo: 2.319_046_813_846_299_6e-17,
        };
        self.mant.abs().ln() + ln2 * Dd::from_f64(self.exp2 as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_carries_extra_bits() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        let back = third * Dd::from_f64(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        let tenth = Dd::ONE / Dd::from_f64(10.0);
        assert!(tenth.lo != 0.0);
    }

    #[test]
    fn sqrt_squares_back() {
        let x = Dd::from_f64(2.0);
        let s = x.sqrt();
        assert!((s * s - x).to_f64().abs() < 1e-31);
    }

    #[test]
    fn sine_matches_known_values() {
        let s = (Dd::PI / Dd::from_f64(6.0)).sin();
        assert!((s - Dd::from_f64(0.5)).to_f64().abs() < 1e-31);
        let s = (Dd::PI * Dd::from_f64(2.0) * Dd::from_f64(7.0) / Dd::from_f64(13.0)).sin();
        assert!((s.to_f64() - (14.0 * std::f64::consts::PI / 13.0).sin()).abs() < 1e-15);
        let c = (Dd::PI / Dd::from_f64(3.0) + Dd::FRAC_PI_2).sin();
        assert!((c - Dd::from_f64(0.5)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn exp_and_ln_are_inverse() {
        let x = Dd::from_f64(3.7) / Dd::from_f64(1.3);
        let y = x.exp().ln();
        assert!((y - x).to_f64().abs() < 1e-29);
        assert!((Dd::ONE.exp().to_f64() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn scaled_products_stay_normalized() {
        let mut p = ScaledDd::ONE;
        for _ in 0..3000 {
            p = p.mul(ScaledDd::new(Dd::from_f64(10.0), 0));
        }
        let l = p.ln_abs().to_f64();
        assert!((l - 3000.0 * 10f64.ln()).abs() < 1e-10);
        assert!(p.mant.hi >= 1.0 && p.mant.hi < 2.0);
    }
}
