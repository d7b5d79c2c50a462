//! Quantum 6j-symbols at q = exp(2πi/r).
//!
//! Two independent routes are provided: the alternating factorial sum
//! ([`sixj_direct`]) and the exponential sum of the quantum-dilogarithm
//! potential U_r ([`sixj_via_phir`]).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qcore::dd::{Dd, ScaledDd};
use crate::qcore::{
    admissible_six, admissible_triple, hyperideal_int, log_sum, CompensatedSum, LogComplex, Precision,
    RootContext, QUADS, TRIPLES,
};
use crate::qdilog::PhiTable;

/// Six colors `[m1, …, m6]` laid out as the rows `(m1 m2 m3 / m4 m5 m6)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SixTuple {
    pub m: [i64; 6],
}

impl SixTuple {
    /// Validate colors and r-admissibility of all four vertex triples.
    pub fn new(ctx: &RootContext, m: [i64; 6]) -> Result<SixTuple> {
        for &x in &m {
            ctx.check_color(x)?;
        }
        for t in TRIPLES {
            let (a, b, c) = (m[t[0]], m[t[1]], m[t[2]]);
            if !admissible_triple(ctx, a, b, c) {
                return Err(Error::Inadmissible(a, b, c));
            }
        }
        Ok(SixTuple { m })
    }

    /// Vertex half-sums T_1..T_4.
    pub fn t(&self) -> [i64; 4] {
        TRIPLES.map(|t| (self.m[t[0]] + self.m[t[1]] + self.m[t[2]]) / 2)
    }

    /// Quadruple half-sums Q_1..Q_3.
    pub fn q(&self) -> [i64; 3] {
        QUADS.map(|q| (self.m[q[0]] + self.m[q[1]] + self.m[q[2]] + self.m[q[3]]) / 2)
    }

    /// Summation range `max T ..= min(Q_1, Q_2, Q_3, r−2)`.
    pub fn k_range(&self, r: i64) -> (i64, i64) {
        let lo = *self.t().iter().max().expect("four entries");
        let hi = self.q().iter().copied().chain([r - 2]).min().expect("entries");
        (lo, hi)
    }
}

/// Δ(a,b,c): the square root of
/// `[(a+b−c)/2]! [(b+c−a)/2]! [(c+a−b)/2]! / [(a+b+c)/2 + 1]!`, taken as
/// `i√|x|` when the ratio is negative.
pub fn delta_triple(ctx: &RootContext, a: i64, b: i64, c: i64) -> Result<LogComplex> {
    if !admissible_triple(ctx, a, b, c) {
        return Err(Error::Inadmissible(a, b, c));
    }
    let x = ctx.qfact_bracket((a + b - c) / 2)?
        * ctx.qfact_bracket((b + c - a) / 2)?
        * ctx.qfact_bracket((c + a - b) / 2)?
        / ctx.qfact_bracket((a + b + c) / 2 + 1)?;
    Ok(x.sqrt())
}

fn prefactor(ctx: &RootContext, six: &SixTuple) -> Result<LogComplex> {
    // i^{−Σm} with Σm even
    let half: i64 = six.m.iter().sum::<i64>() / 2;
    let mut p = LogComplex::from_real(if half % 2 == 0 { 1.0 } else { -1.0 });
    for t in TRIPLES {
        p = p * delta_triple(ctx, six.m[t[0]], six.m[t[1]], six.m[t[2]])?;
    }
    Ok(p)
}

/// The bare alternating sum
/// `Σ_k (−1)^k [k+1]! / (∏[k−T_i]! ∏[Q_j−k]!)`; always real.
pub fn sixj_ksum(ctx: &RootContext, six: &SixTuple) -> LogComplex {
    let (lo, hi) = six.k_range(ctx.ri());
    if lo > hi {
        return LogComplex::ZERO;
    }
    let t = six.t();
    let q = six.q();
    match ctx.precision() {
        Precision::Standard => {
            let terms: Vec<(f64, bool)> = (lo..=hi)
                .map(|k| {
                    let (mut l, mut neg) = ctx.fact_raw((k + 1) as usize);
                    neg ^= k % 2 == 1;
                    for &ti in &t {
                        let (a, s) = ctx.fact_raw((k - ti) as usize);
                        l -= a;
                        neg ^= s;
                    }
                    for &qj in &q {
                        let (a, s) = ctx.fact_raw((qj - k) as usize);
                        l -= a;
                        neg ^= s;
                    }
                    (l, neg)
                })
                .collect();
            let m = terms.iter().map(|x| x.0).fold(f64::NEG_INFINITY, f64::max);
            let mut acc = CompensatedSum::new();
            for (l, neg) in terms {
                let v = (l - m).exp();
                acc.add(Complex64::new(if neg { -v } else { v }, 0.0));
            }
            LogComplex::from_real(acc.value().re) * LogComplex::new(m, 0.0)
        }
        Precision::Extended => {
            let terms: Vec<ScaledDd> = (lo..=hi)
                .map(|k| {
                    let mut v = ctx.fact_dd((k + 1) as usize);
                    for &ti in &t {
                        v = v.div(ctx.fact_dd((k - ti) as usize));
                    }
                    for &qj in &q {
                        v = v.div(ctx.fact_dd((qj - k) as usize));
                    }
                    if k % 2 == 1 {
                        v = ScaledDd::new(-v.mant, v.exp2);
                    }
                    v
                })
                .collect();
            let e = terms.iter().map(|x| x.exp2).max().expect("non-empty range");
            let mut s = Dd::ZERO;
            for x in &terms {
                s = s + x.mant.ldexp((x.exp2 - e) as i32);
            }
            if s.is_zero() {
                return LogComplex::ZERO;
            }
            let total = ScaledDd::new(s, e);
            let lm = total.ln_abs().to_f64();
            LogComplex::new(lm, if total.is_negative() { PI } else { 0.0 })
        }
    }
}

/// The quantum 6j-symbol by the factorial sum, upper limit clamped at r−2.
pub fn sixj_direct(ctx: &RootContext, six: &SixTuple) -> Result<LogComplex> {
    if !admissible_six(ctx, &six.m) {
        let t = TRIPLES
            .iter()
            .find(|t| !admissible_triple(ctx, six.m[t[0]], six.m[t[1]], six.m[t[2]]))
            .expect("some triple fails");
        return Err(Error::Inadmissible(six.m[t[0]], six.m[t[1]], six.m[t[2]]));
    }
    let s = sixj_ksum(ctx, six);
    if s.is_zero() {
        return Ok(LogComplex::ZERO);
    }
    Ok(prefactor(ctx, six)? * s)
}

/// `(−1)^{Σ⌊T_i/2⌋}`: the sign relating the literal exponential sum to the
/// factorial sum. It comes from the choice of square-root branch in the Δ
/// factors (`√x = i√|x|` for negative x) versus the branch implicit in
/// the half-integer exponents of the φ_r representation.
pub fn branch_sign(six: &SixTuple) -> f64 {
    let s: i64 = six.t().iter().map(|t| t / 2).sum();
    if s % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The potential U_r on lattice arguments `α = 2πm/r`, `ξ = 2πk/r`, with
/// every quantum-dilogarithm argument a multiple `jπ/r` read from `table`.
pub fn u_r_lattice(table: &PhiTable, six: &SixTuple, k: i64) -> Result<Complex64> {
    let r = table.r() as i64;
    let rf = r as f64;
    let h = 2.0 * PI / rf;
    let unit = PI / rf;
    let t = six.t();
    let q = six.q();
    let tau: Vec<f64> = t.iter().map(|&x| x as f64 * h).collect();
    let eta: Vec<f64> = q.iter().map(|&x| x as f64 * h).collect();
    let xi = k as f64 * h;
    let mut re = PI * PI - h * h + (xi + h - PI).powi(2);
    for &ta in &tau {
        re -= 0.5 * (ta + h - PI).powi(2) + (xi - ta).powi(2);
        for &e in &eta {
            re += 0.5 * (e - ta).powi(2);
        }
    }
    for &e in &eta {
        re -= (e - xi).powi(2);
    }
    let _ = unit;
    let mut v = Complex64::new(re, 0.0) - 2.0 * table.at(1)?;
    for &ti in &t {
        v += 0.5 * table.at(2 * ti - r + 3)?;
        v += table.at(2 * k - 2 * ti + 1)?;
        for &qj in &q {
            v -= 0.5 * table.at(2 * qj - 2 * ti + 1)?;
        }
    }
    v -= table.at(2 * k - r + 3)?;
    for &qj in &q {
        v += table.at(2 * qj - 2 * k + 1)?;
    }
    Ok(v)
}

/// The 6j-symbol as `({1}/2) Σ_k exp((r/4πi) U_r(2πm/r, 2πk/r))` times the
/// branch sign of [`branch_sign`]. Only tuples of hyperideal type.
pub fn sixj_via_phir(ctx: &RootContext, table: &PhiTable, six: &SixTuple) -> Result<LogComplex> {
    if !hyperideal_int(ctx, &six.m) {
        return Err(Error::NotHyperideal(six.m));
    }
    let (lo, hi) = six.k_range(ctx.ri());
    if lo > hi {
        return Err(Error::Unsupported(format!("empty summation range for {:?}", six.m)));
    }
    let c = ctx.r() as f64 / (4.0 * PI * Complex64::i());
    let terms: Result<Vec<LogComplex>> = (lo..=hi)
        .map(|k| Ok(LogComplex::exp(c * u_r_lattice(table, six, k)?)))
        .collect();
    let s = log_sum(&terms?);
    let half_one = LogComplex::from_complex(ctx.brace_one() * 0.5);
    Ok(half_one * s * LogComplex::from_real(branch_sign(six)))
}

/// `(2π/r)·log|6j|`, or −∞ when the symbol vanishes.
pub fn costantino_ratio(ctx: &RootContext, six: &SixTuple) -> Result<f64> {
    let v = sixj_direct(ctx, six)?;
    Ok(2.0 * PI / ctx.r() as f64 * v.logmag)
}

/// The 24 images of a six-tuple under the tetrahedral symmetry group:
/// column permutations combined with swapping upper and lower entries in an
/// even number of columns.
pub fn tetrahedral_images(m: &[i64; 6]) -> Vec<[i64; 6]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    const FLIPS: [[bool; 3]; 4] = [
        [false, false, false],
        [true, true, false],
        [true, false, true],
        [false, true, true],
    ];
    let mut out = Vec::with_capacity(24);
    for p in PERMS {
        for f in FLIPS {
            let mut x = [0; 6];
            for col in 0..3 {
                let (up, low) = (m[p[col]], m[p[col] + 3]);
                if f[col] {
                    x[col] = low;
                    x[col + 3] = up;
                } else {
                    x[col] = up;
                    x[col + 3] = low;
                }
            }
            out.push(x);
        }
    }
    out
}

/// Draw a uniformly random r-admissible six-tuple by rejection.
pub fn random_admissible<R: Rng>(ctx: &RootContext, rng: &mut R) -> SixTuple {
    let nc = ctx.n_colors() as i64;
    loop {
        let m: [i64; 6] = std::array::from_fn(|_| 2 * rng.random_range(0..nc));
        if admissible_six(ctx, &m) {
            return SixTuple { m };
        }
    }
}

/// Draw a random six-tuple of hyperideal type with a nonempty summation
/// range, or `None` if 100000 draws fail (small r).
pub fn random_hyperideal<R: Rng>(ctx: &RootContext, rng: &mut R) -> Option<SixTuple> {
    let nc = ctx.n_colors() as i64;
    for _ in 0..100_000 {
        let m: [i64; 6] = std::array::from_fn(|_| 2 * rng.random_range(0..nc));
        if admissible_six(ctx, &m) && hyperideal_int(ctx, &m) {
            let s = SixTuple { m };
            let (lo, hi) = s.k_range(ctx.ri());
            if lo <= hi {
                return Some(s);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::special::v8;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(r: i64) -> RootContext {
        RootContext::new(r, Precision::Standard).unwrap()
    }

    /// Term-by-term evaluation of the definition with plain products of sines.
    fn sixj_oracle(r: i64, m: [i64; 6]) -> Complex64 {
        let qi = |n: i64| (2.0 * PI * n as f64 / r as f64).sin() / (2.0 * PI / r as f64).sin();
        let fact = |n: i64| (1..=n).map(qi).product::<f64>();
        let delta = |a: i64, b: i64, c: i64| {
            let x = fact((a + b - c) / 2) * fact((b + c - a) / 2) * fact((c + a - b) / 2)
                / fact((a + b + c) / 2 + 1);
            if x < 0.0 {
                Complex64::new(0.0, (-x).sqrt())
            } else {
                Complex64::new(x.sqrt(), 0.0)
            }
        };
        let s = SixTuple { m };
        let (lo, hi) = s.k_range(r);
        let mut sum = 0.0;
        for k in lo..=hi {
            let mut t = if k % 2 == 0 { 1.0 } else { -1.0 } * fact(k + 1);
            for ti in s.t() {
                t /= fact(k - ti);
            }
            for qj in s.q() {
                t /= fact(qj - k);
            }
            sum += t;
        }
        let total: i64 = m.iter().sum();
        let pre = Complex64::i().powi(-(total as i32));
        let mut p = pre * sum;
        for t in TRIPLES {
            p *= delta(m[t[0]], m[t[1]], m[t[2]]);
        }
        p
    }

    #[test]
    fn trivial_symbol_is_one() {
        let c = ctx(7);
        let s = SixTuple::new(&c, [0; 6]).unwrap();
        assert_eq!(sixj_direct(&c, &s).unwrap().to_complex(), Complex64::new(1.0, 0.0));
        assert_eq!(costantino_ratio(&c, &s).unwrap(), 0.0);
    }

    #[test]
    fn matches_term_by_term_oracle() {
        let c = ctx(7);
        let s = SixTuple::new(&c, [2; 6]).unwrap();
        let v = sixj_direct(&c, &s).unwrap().to_complex();
        let o = sixj_oracle(7, [2; 6]);
        assert!((v - o).norm() < 1e-13 * o.norm().max(1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in [9, 13, 17] {
            let c = ctx(r);
            for _ in 0..30 {
                let s = random_admissible(&c, &mut rng);
                let v = sixj_direct(&c, &s).unwrap().to_complex();
                let o = sixj_oracle(r, s.m);
                assert!((v - o).norm() <= 1e-11 * o.norm().max(1e-300), "r={r} {:?}", s.m);
            }
        }
    }

    #[test]
    fn delta_examples() {
        let c = ctx(7);
        assert_eq!(delta_triple(&c, 0, 0, 0).unwrap(), LogComplex::ONE);
        let d = delta_triple(&c, 2, 2, 2).unwrap();
        let sq = (d * d).to_complex();
        let f = |n: i64| c.qfact_bracket(n).unwrap().to_complex().re;
        assert!((sq.re - f(1).powi(3) / f(4)).abs() < 1e-14);
        let c = ctx(13);
        let base = delta_triple(&c, 2, 4, 6).unwrap();
        for (a, b, x) in [(4, 2, 6), (6, 2, 4), (2, 6, 4), (4, 6, 2), (6, 4, 2)] {
            assert_eq!(delta_triple(&c, a, b, x).unwrap(), base);
        }
        assert!(delta_triple(&c, 0, 0, 2).is_err());
    }

    #[test]
    fn empty_range_gives_zero() {
        // r = 5, all colors 2: T = 3 > r − 2 = 3? range is 3..=min(4,3) = 3
        let c = ctx(5);
        let s = SixTuple::new(&c, [2; 6]).unwrap();
        let (lo, hi) = s.k_range(5);
        assert!(lo <= hi);
        let c = ctx(7);
        let s = SixTuple { m: [4, 4, 4, 4, 4, 4] };
        let (lo, hi) = s.k_range(7);
        assert!(lo > hi || !admissible_six(&c, &s.m));
    }

    #[test]
    fn ksum_is_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = ctx(31);
        for _ in 0..50 {
            let s = random_admissible(&c, &mut rng);
            let k = sixj_ksum(&c, &s);
            if !k.is_zero() {
                assert!(k.phase.abs() < 1e-9 || (k.phase.abs() - PI).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn images_preserve_vertex_triples() {
        let m = [2, 4, 6, 8, 10, 12];
        let imgs = tetrahedral_images(&m);
        assert_eq!(imgs.len(), 24);
        let triples = |x: &[i64; 6]| {
            let mut v: Vec<Vec<i64>> = TRIPLES
                .iter()
                .map(|t| {
                    let mut s = vec![x[t[0]], x[t[1]], x[t[2]]];
                    s.sort();
                    s
                })
                .collect();
            v.sort();
            v
        };
        let base = triples(&m);
        let mut distinct = std::collections::HashSet::new();
        for i in &imgs {
            assert_eq!(triples(i), base);
            distinct.insert(*i);
        }
        assert_eq!(distinct.len(), 24);
    }

    #[test]
    fn two_routes_agree() {
        for (r, m) in [(11, [4; 6]), (13, [6, 6, 4, 6, 4, 6]), (31, [14; 6])] {
            let c = ctx(r);
            let t = PhiTable::new(&c).unwrap();
            let s = SixTuple::new(&c, m).unwrap();
            let a = sixj_direct(&c, &s).unwrap();
            let b = sixj_via_phir(&c, &t, &s).unwrap();
            assert!(a.rel_diff(&b) < 1e-8, "r={r}: {a} vs {b}");
        }
    }

    #[test]
    fn literal_sum_differs_by_branch_sign() {
        let c = ctx(17);
        let t = PhiTable::new(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let s = random_hyperideal(&c, &mut rng).unwrap();
            let literal = sixj_via_phir(&c, &t, &s).unwrap() * LogComplex::from_real(branch_sign(&s));
            let direct = sixj_direct(&c, &s).unwrap();
            let expect = direct * LogComplex::from_real(branch_sign(&s));
            assert!(literal.rel_diff(&expect) < 1e-8);
        }
    }

    #[test]
    fn non_hyperideal_is_rejected() {
        let c = ctx(11);
        let t = PhiTable::new(&c).unwrap();
        let s = SixTuple::new(&c, [0; 6]).unwrap();
        assert!(matches!(sixj_via_phir(&c, &t, &s), Err(Error::NotHyperideal(_))));
    }

    #[test]
    fn extended_precision_agrees() {
        let cs = ctx(51);
        let ce = RootContext::new(51, Precision::Extended).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..40 {
            let s = random_admissible(&cs, &mut rng);
            let a = sixj_direct(&cs, &s).unwrap();
            let b = sixj_direct(&ce, &s).unwrap();
            assert!(a.rel_diff(&b) < 1e-10, "{:?}", s.m);
        }
    }

    #[test]
    fn costantino_ratio_approaches_octahedron() {
        // reference values from a separate log-factorial evaluation
        let frozen = [(101, 50, 3.282_425_208_625_48), (1001, 500, 3.603_819_765_564_463)];
        for (r, m, expect) in frozen {
            let c = ctx(r);
            let s = SixTuple::new(&c, [m; 6]).unwrap();
            let v = costantino_ratio(&c, &s).unwrap();
            assert!((v - expect).abs() < 1e-9, "r={r}: {v}");
            // the finite-r gap is about (3π/r)·log r
            let gap = v8() - v;
            let model = 3.0 * PI / r as f64 * (r as f64).ln();
            assert!(gap > 0.0 && (gap / model - 1.0).abs() < 0.3, "r={r}: gap {gap}");
        }
    }
}
