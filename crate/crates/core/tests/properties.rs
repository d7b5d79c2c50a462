use std::f64::consts::PI;

use fsl_rt::asympt::{color_sequence, fit_real, r_range, Branch};
use fsl_rt::geom::reduce_cs;
use fsl_rt::qcore::{dft_kernel, hyperideal_int, log_sum, tree_sum};
use fsl_rt::sixj::{sixj_direct, sixj_via_phir, tetrahedral_images, SixTuple};
use fsl_rt::qdilog::PhiTable;
use fsl_rt::{Complex64, LogComplex, Precision, RootContext};
use proptest::prelude::*;

fn ctx(r: i64) -> RootContext {
    RootContext::new(r, Precision::Standard).unwrap()
}

fn odd_level(lo: i64, hi: i64) -> impl Strategy<Value = i64> {
    (lo / 2..=hi / 2).prop_map(|k| 2 * k + 1)
}

// Even colors between (r-2)/3 and 2(r-2)/3 satisfy every triangle, and every
// triple sum lands in [r-2, 2(r-2)].
fn balanced(r_lo: i64, r_hi: i64) -> impl Strategy<Value = (i64, [i64; 6])> {
    odd_level(r_lo, r_hi).prop_flat_map(|r| {
        let lo = (r - 2 + 5) / 6;
        let hi = (2 * (r - 2)) / 6;
        let c = (lo..=hi).prop_map(|k| 2 * k);
        (Just(r), [c.clone(), c.clone(), c.clone(), c.clone(), c.clone(), c])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_rows_are_orthonormal(r in odd_level(3, 61), a in 0usize..64, b in 0usize..64) {
        let c = ctx(r);
        let colors = c.colors();
        let (n, n2) = (colors[a % colors.len()], colors[b % colors.len()]);
        let s: f64 = colors.iter().map(|&m| dft_kernel(&c, m, n) * dft_kernel(&c, m, n2)).sum();
        let want = if n == n2 { 1.0 } else { 0.0 };
        prop_assert!((c.mu_r() * c.mu_r() * s - want).abs() < 1e-10);
    }

    #[test]
    fn kernel_is_symmetric(r in odd_level(3, 61), m in 0i64..60, n in 0i64..60) {
        let c = ctx(r);
        let (m, n) = (m % (r - 1), n % (r - 1));
        prop_assert_eq!(dft_kernel(&c, m, n), dft_kernel(&c, n, m));
    }

    #[test]
    fn sixj_is_tetrahedrally_symmetric((r, m) in balanced(9, 41)) {
        let c = ctx(r);
        let six = SixTuple::new(&c, m).unwrap();
        let base = sixj_direct(&c, &six).unwrap();
        for img in tetrahedral_images(&m) {
            let v = sixj_direct(&c, &SixTuple::new(&c, img).unwrap()).unwrap();
            prop_assert!(base.rel_diff(&v) < 1e-10);
        }
    }

    #[test]
    fn sixj_routes_agree((r, m) in balanced(9, 41)) {
        let c = ctx(r);
        prop_assume!(hyperideal_int(&c, &m));
        let six = SixTuple::new(&c, m).unwrap();
        let table = PhiTable::new(&c).unwrap();
        let a = sixj_direct(&c, &six).unwrap();
        let b = sixj_via_phir(&c, &table, &six).unwrap();
        prop_assert!(a.rel_diff(&b) < 1e-8);
    }

    #[test]
    fn fit_recovers_planted_coefficients(a in -10.0f64..10.0, b in -5.0f64..5.0, cc in -50.0f64..50.0) {
        let rs = r_range(101, 1001, 50).unwrap();
        let ys: Vec<f64> = rs.iter().map(|&r| {
            let x = r as f64;
            a + b * x.ln() / x + cc / x
        }).collect();
        let (fa, fb, fc, res) = fit_real(&rs, &ys).unwrap();
        prop_assert!((fa - a).abs() < 1e-8);
        prop_assert!((fb - b).abs() < 1e-5);
        prop_assert!((fc - cc).abs() < 1e-4);
        prop_assert!(res < 1e-8);
    }

    #[test]
    fn colors_are_even_and_in_range(
        r in odd_level(3, 2001),
        theta in prop::collection::vec(0.0f64..=2.0 * PI, 1..4),
        above in any::<bool>(),
    ) {
        let branch = if above { Branch::Above } else { Branch::Below };
        let choice = color_sequence(&theta, branch, r as u32).unwrap();
        prop_assert_eq!(choice.colors.len(), theta.len());
        for (&m, &got) in choice.colors.iter().zip(&choice.realized) {
            prop_assert!(m % 2 == 0 && m >= 0 && m <= r - 3);
            let want = (2.0 * PI - 4.0 * PI * m as f64 / r as f64).abs();
            prop_assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn realized_angles_converge(theta in 0.05f64..3.0) {
        for r in [1001u32, 4001] {
            let got = color_sequence(&[theta], Branch::Below, r).unwrap().realized[0];
            prop_assert!((got - theta).abs() <= 4.0 * PI / r as f64 + 1e-12);
        }
    }

    #[test]
    fn reduced_cs_is_in_window_and_congruent(x in -1e3f64..1e3) {
        let y = reduce_cs(x);
        let p2 = PI * PI;
        prop_assert!(y > -p2 / 2.0 - 1e-12 && y <= p2 / 2.0 + 1e-12);
        let k = (x - y) / p2;
        prop_assert!((k - k.round()).abs() < 1e-9);
    }

    #[test]
    fn log_complex_round_trips(re in -1e3f64..1e3, im in -1e3f64..1e3) {
        prop_assume!(re.hypot(im) > 1e-6);
        let z = Complex64::new(re, im);
        let back = LogComplex::from_complex(z).to_complex();
        prop_assert!((back - z).norm() <= 1e-13 * z.norm());
    }

    #[test]
    fn log_complex_mul_adds_logs(a in -300.0f64..300.0, pa in -PI..PI, b in -300.0f64..300.0, pb in -PI..PI) {
        let x = LogComplex::new(a, pa);
        let y = LogComplex::new(b, pb);
        let p = x * y;
        prop_assert!((p.logmag - (a + b)).abs() < 1e-12);
        prop_assert!((Complex64::from_polar(1.0, p.phase) - Complex64::from_polar(1.0, pa + pb)).norm() < 1e-12);
        prop_assert!((x * x.recip()).rel_diff(&LogComplex::from_real(1.0)) < 1e-12);
    }

    #[test]
    fn sums_agree_and_survive_overflow(
        terms in prop::collection::vec((-5.0f64..5.0, -PI..PI), 1..40),
        shift in 0.0f64..2000.0,
    ) {
        let xs: Vec<LogComplex> = terms.iter().map(|&(l, p)| LogComplex::new(l + shift, p)).collect();
        let a = log_sum(&xs);
        let b = tree_sum(&xs);
        let plain: Complex64 = terms.iter().map(|&(l, p)| Complex64::from_polar(l.exp(), p)).sum();
        prop_assume!(plain.norm() > 1e-6);
        let want = LogComplex::from_complex(plain) * LogComplex::new(shift, 0.0);
        prop_assert!(a.rel_diff(&want) < 1e-10);
        prop_assert!(b.rel_diff(&want) < 1e-10);
    }
}
