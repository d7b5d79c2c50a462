//! Acceptance criteria 1–12. Each test prints one PASS/FAIL line and then
//! asserts; tolerances are written out here rather than imported.

use std::f64::consts::PI;

use fsl_rt::asympt::{color_sequence, compare_prediction, conjecture_report, costantino_fit, r_range, Branch, GrowthOptions};
use fsl_rt::fsl::{poisson_check, ChangeOfPairSpec, FslPresentation, GridOptions};
use fsl_rt::geom::{cs_distance, hessian_probe, lobachevsky, sign_vectors, solve_critical, v8, v_value, xi_of_alpha};
use fsl_rt::geom::{AngleSixTuple, PotentialSpec};
use fsl_rt::qcore::dft_kernel;
use fsl_rt::qdilog::{f2_residual, fund_residual, qpochhammer_check, PhiTable};
use fsl_rt::saddle::{gaussian_check, stirling_error};
use fsl_rt::sixj::{random_admissible, random_hyperideal, sixj_direct, sixj_via_phir, tetrahedral_images, SixTuple};
use fsl_rt::{Complex64, Precision, RootContext};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx(r: i64) -> RootContext {
    RootContext::new(r, Precision::Standard).unwrap()
}

fn report(id: u8, name: &str, pass: bool, detail: String) {
    println!("criterion {id:>2} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn odd(lo: i64, hi: i64) -> impl Iterator<Item = i64> {
    (lo..=hi).step_by(2)
}

#[test]
fn criterion_01_kernel_unitarity() {
    let mut worst: f64 = 0.0;
    for r in odd(3, 101) {
        let c = ctx(r);
        let colors = c.colors();
        let mu2 = c.mu_r() * c.mu_r();
        for &n in &colors {
            for &n2 in &colors {
                let s: f64 = colors.iter().map(|&m| dft_kernel(&c, m, n) * dft_kernel(&c, m, n2)).sum();
                let d = if n == n2 { 1.0 } else { 0.0 };
                worst = worst.max((mu2 * s - d).abs());
            }
        }
    }
    report(1, "kernel unitarity", worst <= 1e-10, format!("max error {worst:.2e} <= 1e-10, odd r <= 101"));
}

#[test]
fn criterion_02_parseval() {
    let pres = FslPresentation::tetra1();
    let cop = ChangeOfPairSpec::plain(&pres, &[1]).unwrap();
    let mut worst: f64 = 0.0;
    for r in odd(5, 31) {
        worst = worst.max(poisson_check(&ctx(r), &pres, &cop, GridOptions::forced()).unwrap().rel_err);
    }
    report(2, "Parseval identity", worst <= 1e-9, format!("max relative error {worst:.2e} <= 1e-9, r = 5..31"));
}

#[test]
fn criterion_03_two_path_6j() {
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for r in odd(7, 51) {
        let c = ctx(r);
        let table = PhiTable::new(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + r as u64);
        for _ in 0..100 {
            let six = random_hyperideal(&c, &mut rng).expect("hyperideal tuple");
            let a = sixj_direct(&c, &six).unwrap();
            let b = sixj_via_phir(&c, &table, &six).unwrap();
            worst = worst.max(a.rel_diff(&b));
            samples += 1;
        }
    }
    report(3, "two-path 6j", worst <= 1e-6, format!("max relative gap {worst:.2e} <= 1e-6 over {samples} tuples"));
}

#[test]
fn criterion_04_tetrahedral_symmetry() {
    let mut worst: f64 = 0.0;
    for r in odd(3, 51) {
        let c = ctx(r);
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + r as u64);
        for _ in 0..100 {
            let six = random_admissible(&c, &mut rng);
            let base = sixj_direct(&c, &six).unwrap();
            let images = tetrahedral_images(&six.m);
            assert_eq!(images.len(), 24);
            for img in images {
                let v = sixj_direct(&c, &SixTuple::new(&c, img).unwrap()).unwrap();
                worst = worst.max(base.rel_diff(&v));
            }
        }
    }
    report(4, "tetrahedral symmetry", worst <= 1e-12, format!("max relative spread {worst:.2e} <= 1e-12"));
}

#[test]
fn criterion_05_quantum_dilogarithm() {
    let (mut fund, mut f2, mut fact): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for r in odd(3, 101) {
        let c = ctx(r);
        let rf = r as f64;
        // 50-point grids: 25 real parts on two horizontal lines
        for k in 0..25 {
            let t = (k as f64 + 0.5) / 25.0;
            for im in [0.0, 0.2] {
                let z = Complex64::new(PI / rf + t * (PI - 3.0 * PI / rf), im);
                fund = fund.max(fund_residual(&c, z).unwrap());
                let w = Complex64::new((2.0 * t - 1.0) * 0.9 * PI / rf, im);
                f2 = f2.max(f2_residual(&c, w).unwrap());
            }
        }
        let table = PhiTable::new(&c).unwrap();
        for n in 0..=r - 2 {
            let p = qpochhammer_check(&c, &table, n).unwrap();
            fact = fact.max(p.rel_residual);
            if let Some(s) = p.shifted_rel_residual {
                fact = fact.max(s);
            }
        }
    }
    let pass = fund <= 1e-8 && f2 <= 1e-8 && fact <= 1e-8;
    report(5, "quantum dilogarithm identities", pass, format!("fund {fund:.2e}, f2 {f2:.2e}, factorial {fact:.2e}; all <= 1e-8"));
}

#[test]
fn criterion_06_factorial_estimate() {
    let mut c_fit: f64 = 0.0;
    for r in odd(3, 1001) {
        let c = ctx(r);
        let rf = r as f64;
        for n in 0..r {
            let lhs = c.qfact_brace(n).unwrap().logmag + rf / (2.0 * PI) * lobachevsky(2.0 * PI * n as f64 / rf);
            c_fit = c_fit.max(lhs.abs() / rf.ln());
        }
    }
    report(6, "factorial estimate", c_fit <= 2.0, format!("fitted C = {c_fit:.4} <= 2, odd r <= 1001"));
}

#[test]
fn criterion_07_geometry_fixed_points() {
    let xi = xi_of_alpha(&AngleSixTuple::real([PI; 6])).unwrap();
    let e_xi = (xi - Complex64::new(7.0 * PI / 4.0, 0.0)).norm();
    let e_v = (v_value(&[PI; 6], 7.0 * PI / 4.0) - 8.0 * lobachevsky(PI / 4.0)).abs();
    let h = hessian_probe();
    let probes = [(h.alpha_alpha, -2.0), (h.alpha_pair, -1.0), (h.alpha_xi, 2.0), (h.xi_xi, -8.0)];
    let probe_ok: Vec<bool> = probes.iter().map(|(got, want)| (got - want).abs() <= 1e-5).collect();
    let pass = e_xi <= 1e-10 && e_v <= 1e-10 && probe_ok.iter().all(|&b| b);
    report(
        7,
        "geometry fixed points",
        pass,
        format!(
            "xi err {e_xi:.1e}, V err {e_v:.1e}; probes (aa, ab, axi, xixi) = ({:.6}, {:.6}, {:.6}, {:.6}) vs (-2, -1, 2, -8)",
            h.alpha_alpha, h.alpha_pair, h.alpha_xi, h.xi_xi
        ),
    );
}

#[test]
fn criterion_08_critical_solve() {
    let pres = FslPresentation::tetra1();
    let expect = Complex64::new(2.0 * PI * PI, 2.0 * v8());
    let plain = PotentialSpec::from_cone_angles(&pres, None, &[0.0; 3]).unwrap();
    let mut value_err = (solve_critical(&plain).unwrap().value_c() - expect).norm();
    let cop = ChangeOfPairSpec::plain(&pres, &[1]).unwrap();
    let spec = PotentialSpec::from_cone_angles(&pres, Some(&cop), &[0.0; 3]).unwrap();
    value_err = value_err.max((solve_critical(&spec).unwrap().value_c() - expect).norm());

    let mut twisted = pres.clone();
    twisted.iota[0] = 1;
    let spec = PotentialSpec::from_cone_angles(&twisted, None, &[0.0; 3]).unwrap();
    let cs_err = cs_distance(solve_critical(&spec).unwrap().cs, PI * PI / 2.0);

    let mut dehn: f64 = 0.0;
    for ids in [vec![1], vec![2], vec![1, 3]] {
        let cop = ChangeOfPairSpec::plain(&pres, &ids).unwrap();
        for eps in sign_vectors(ids.len()) {
            let spec = PotentialSpec::from_cone_angles(&pres, Some(&cop), &[0.1; 3]).unwrap().with_eps(&eps);
            let res = solve_critical(&spec).unwrap();
            dehn = res.dehn_residuals.iter().fold(dehn, |a, &b| a.max(b));
        }
    }
    let pass = value_err <= 1e-8 && cs_err <= 1e-8 && dehn <= 1e-8;
    report(8, "critical solve", pass, format!("value {value_err:.1e}, CS {cs_err:.1e}, Dehn {dehn:.1e}; all <= 1e-8"));
}

#[test]
fn criterion_09_costantino_growth() {
    let rs: Vec<u32> = (101..=1001).step_by(100).collect();
    let fit = costantino_fit(&rs, Precision::Standard).unwrap();
    let reference = 8.0 * lobachevsky(PI / 4.0);
    let gap = (fit.limit - reference).abs();
    report(9, "6j growth limit", gap <= 0.02, format!("limit {:.6} vs v8 {reference:.6}, gap {gap:.2e} <= 0.02", fit.limit));
}

#[test]
fn criterion_10_fsl_volume_conjecture() {
    let pres = FslPresentation::tetra1();
    let rs = r_range(101, 1001, 8).unwrap();
    let rep = conjecture_report(&pres, None, &[0.0; 3], &rs, GrowthOptions::default()).unwrap();
    let two_v8 = 16.0 * lobachevsky(PI / 4.0);
    let re_gap = (rep.fit.limit[0] - two_v8).abs();
    let im_gap = cs_distance(rep.fit.limit[1], 0.0);
    report(
        10,
        "FSL volume conjecture",
        re_gap <= 0.05 && im_gap <= 0.05,
        format!("Re {:.6} vs 2v8 {two_v8:.6} (gap {re_gap:.2e}), Im gap mod pi^2 {im_gap:.2e}; both <= 0.05", rep.fit.limit[0]),
    );
}

#[test]
fn criterion_11_change_of_pair_conjecture() {
    let pres = FslPresentation::tetra1();
    let cop = ChangeOfPairSpec::plain(&pres, &[1]).unwrap();
    let rs = r_range(201, 2001, 8).unwrap();
    let rep = conjecture_report(&pres, Some(&cop), &[0.1; 3], &rs, GrowthOptions::default()).unwrap();
    let rel = (rep.fit.limit[0] - rep.volume).abs() / rep.volume;
    let cs_gap = cs_distance(rep.fit.limit[1], rep.cs);
    report(
        11,
        "change-of-pair conjecture",
        rel <= 0.02 && cs_gap <= 0.05 * PI * PI,
        format!(
            "Re {:.6} vs Vol {:.6} (rel {rel:.2e} <= 0.02), CS gap {cs_gap:.2e} <= 0.05 pi^2, r up to 2001",
            rep.fit.limit[0], rep.volume
        ),
    );
}

#[test]
fn criterion_12_saddle_estimates() {
    let mut gauss: f64 = 0.0;
    for r in [50.0, 100.0, 200.0, 500.0] {
        gauss = gauss.max(gaussian_check(r, 1.0).unwrap().residual);
    }
    let stirling = stirling_error(200).unwrap() / stirling_error(100).unwrap();

    let pres = FslPresentation::tetra1();
    let cop = ChangeOfPairSpec::plain(&pres, &[1]).unwrap();
    let err = |r: u32| {
        let c = ctx(r as i64);
        let colors = color_sequence(&[0.1; 3], Branch::Below, r).unwrap().colors;
        compare_prediction(&c, &pres, &cop, &colors, None, GridOptions::default()).unwrap().ratio_error
    };
    let (e501, e1001) = (err(501), err(1001));
    let halving = e1001 / e501;
    let band = |x: f64| (0.3..=0.7).contains(&x);
    report(
        12,
        "saddle estimates",
        gauss <= 1e-10 && band(stirling) && band(halving),
        format!(
            "Gaussian residual {gauss:.1e} <= 1e-10; Stirling ratio {stirling:.3}; prediction error {e501:.2e} -> {e1001:.2e}, ratio {halving:.3} in [0.3, 0.7]"
        ),
    );
}
