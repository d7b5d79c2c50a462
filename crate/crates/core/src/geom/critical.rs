//! The potential 𝒲 of a fundamental shadow link after a change of pair,
//! its critical points, and the volume, Chern–Simons invariant and
//! holonomies they determine.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::potential::{in_domain, u_dalpha, u_dxi, u_value, AngleSixTuple, I};
use crate::error::{Error, Result};
use crate::fsl::{ChangeOfPairSpec, FslPresentation};
use crate::linalg::{self, CMatrix, CVector};
use crate::qcore::RootContext;
use crate::tolerances::ANGLE_GUARD;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Reduce a Chern–Simons value to its representative in (−π²/2, π²/2].
pub fn reduce_cs(x: f64) -> f64 {
    let p2 = PI * PI;
    let mut y = x - p2 * (x / p2).round();
    if y <= -p2 / 2.0 {
        y += p2;
    }
    if y > p2 / 2.0 {
        y -= p2;
    }
    y
}

/// Distance between two CS values modulo π².
pub fn cs_distance(a: f64, b: f64) -> f64 {
    reduce_cs(a - b).abs()
}

/// Data fixing one potential 𝒲^ε: the presentation, the components in I
/// with their framings q and signs ε, and the fixed angles (β_i on I,
/// α_j on J).
#[derive(Clone, Debug)]
pub struct PotentialSpec {
    pub pres: FslPresentation,
    pub i_set: Vec<usize>,
    pub q: Vec<i64>,
    pub eps: Vec<i8>,
    /// Per component: β for components in I, α for components in J.
    pub fixed: Vec<f64>,
    pub guard: f64,
}

impl PotentialSpec {
    /// Spec from cone angles on the below branch: every fixed angle is
    /// `π − θ/2`. All signs ε start at +1.
    pub fn from_cone_angles(
        pres: &FslPresentation,
        cop: Option<&ChangeOfPairSpec>,
        theta: &[f64],
    ) -> Result<PotentialSpec> {
        if theta.len() != pres.n() {
            return Err(Error::Arity { expected: pres.n(), got: theta.len() });
        }
        Ok(Self::build(pres, cop, theta.iter().map(|t| PI - t / 2.0).collect()))
    }

    /// Spec from colors at level r: angles `2πm/r`.
    pub fn from_colors(
        ctx: &RootContext,
        pres: &FslPresentation,
        cop: Option<&ChangeOfPairSpec>,
        colors: &[i64],
    ) -> Result<PotentialSpec> {
        if colors.len() != pres.n() {
            return Err(Error::Arity { expected: pres.n(), got: colors.len() });
        }
        let r = ctx.r() as f64;
        Ok(Self::build(pres, cop, colors.iter().map(|&m| 2.0 * PI * m as f64 / r).collect()))
    }

    fn build(pres: &FslPresentation, cop: Option<&ChangeOfPairSpec>, fixed: Vec<f64>) -> PotentialSpec {
        let (i_set, q) = match cop {
            Some(c) => (c.i_set.clone(), c.q.clone()),
            None => (Vec::new(), Vec::new()),
        };
        PotentialSpec {
            pres: pres.clone(),
            eps: vec![1; i_set.len()],
            i_set,
            q,
            fixed,
            guard: ANGLE_GUARD,
        }
    }

    pub fn with_eps(mut self, eps: &[i8]) -> Self {
        self.eps = eps.to_vec();
        self
    }

    /// Number of variables: |I| angles then c stationary variables.
    pub fn dim(&self) -> usize {
        self.i_set.len() + self.pres.c()
    }

    pub fn out_of_range(&self) -> bool {
        self.fixed.iter().any(|a| (a - PI).abs() > self.guard)
    }

    /// All n component angles, taking the I entries from `z`.
    fn angles(&self, z: &[Complex64]) -> Vec<Complex64> {
        let mut a: Vec<Complex64> = self.fixed.iter().map(|&x| c(x)).collect();
        for (pos, &k) in self.i_set.iter().enumerate() {
            a[k] = z[pos];
        }
        a
    }

    /// Component angles and per-block (α, ξ) at `z`.
    pub fn blocks_at(&self, z: &[Complex64]) -> (Vec<Complex64>, Vec<(AngleSixTuple, Complex64)>) {
        let a = self.angles(z);
        let b = self.xi(z).iter().enumerate().map(|(s, &xi)| (self.block(&a, s), xi)).collect();
        (a, b)
    }

    fn block(&self, angles: &[Complex64], s: usize) -> AngleSixTuple {
        AngleSixTuple::new(self.pres.blocks[s].map(|id| angles[id - 1]))
    }

    fn xi<'a>(&self, z: &'a [Complex64]) -> &'a [Complex64] {
        &z[self.i_set.len()..]
    }

    /// The symmetric seed (π, …, π, 7π/4, …, 7π/4).
    pub fn seed(&self) -> Vec<Complex64> {
        let mut z = vec![c(PI); self.i_set.len()];
        z.extend(std::iter::repeat_n(c(7.0 * PI / 4.0), self.pres.c()));
        z
    }

    /// 𝒲 without domain checks.
    pub fn value(&self, z: &[Complex64]) -> Complex64 {
        let a = self.angles(z);
        let pi = c(PI);
        let mut w = c(0.0);
        for (pos, &k) in self.i_set.iter().enumerate() {
            let b = self.fixed[k] - PI;
            w -= self.q[pos] as f64 * b * b;
            w -= 2.0 * self.eps[pos] as f64 * (a[k] - pi) * b;
        }
        for k in 0..self.pres.n() {
            let d = a[k] - pi;
            w -= (self.pres.p[k] as f64 + self.pres.iota[k] as f64 / 2.0) * d * d;
            w += self.pres.iota[k] as f64 / 2.0 * PI * PI;
        }
        for (s, &xi) in self.xi(z).iter().enumerate() {
            w += u_value(&self.block(&a, s), xi);
        }
        w
    }

    /// 𝒲 with a domain check on every block.
    pub fn potential(&self, z: &[Complex64]) -> Result<Complex64> {
        let a = self.angles(z);
        for (s, &xi) in self.xi(z).iter().enumerate() {
            if !in_domain(&self.block(&a, s), xi) {
                return Err(Error::Domain(format!("block {} at {z:?}", s + 1)));
            }
        }
        Ok(self.value(z))
    }

    /// `∂𝒰/∂α_k` for every component: the U part plus the mutation term,
    /// with the framing and ε terms left out.
    fn u_part_dalpha(&self, z: &[Complex64]) -> (Vec<Complex64>, Vec<[Complex64; 6]>) {
        let a = self.angles(z);
        let mut g: Vec<Complex64> = (0..self.pres.n())
            .map(|k| -(self.pres.iota[k] as f64) * (a[k] - PI))
            .collect();
        let mut per_slot = Vec::with_capacity(self.pres.c());
        for (s, &xi) in self.xi(z).iter().enumerate() {
            let d = u_dalpha(&self.block(&a, s), xi);
            for (j, &id) in self.pres.blocks[s].iter().enumerate() {
                g[id - 1] += d[j];
            }
            per_slot.push(d);
        }
        (g, per_slot)
    }

    /// Analytic gradient in (α_I, ξ).
    pub fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let a = self.angles(z);
        let (du, _) = self.u_part_dalpha(z);
        let mut g = Vec::with_capacity(self.dim());
        for (pos, &k) in self.i_set.iter().enumerate() {
            let d = a[k] - PI;
            let b = self.fixed[k] - PI;
            g.push(-2.0 * self.pres.p[k] as f64 * d - 2.0 * self.eps[pos] as f64 * b + du[k]);
        }
        for (s, &xi) in self.xi(z).iter().enumerate() {
            g.push(u_dxi(&self.block(&a, s), xi));
        }
        g
    }

    /// Hessian by central differences of the gradient with one Richardson
    /// refinement, symmetrized.
    pub fn hessian(&self, z: &[Complex64]) -> CMatrix {
        let n = self.dim();
        let fd = |h: f64| {
            let mut m = CMatrix::zeros(n, n);
            for j in 0..n {
                let mut zp = z.to_vec();
                let mut zm = z.to_vec();
                zp[j] += h;
                zm[j] -= h;
                let gp = self.gradient(&zp);
                let gm = self.gradient(&zm);
                for i in 0..n {
                    m[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
                }
            }
            m
        };
        let h = 1e-5;
        let m = (fd(h / 2.0) * c(4.0) - fd(h)) / c(3.0);
        (&m + m.transpose()) * c(0.5)
    }

    fn with_scale(&self, t: f64) -> PotentialSpec {
        let mut s = self.clone();
        s.fixed = self.fixed.iter().map(|&x| PI + t * (x - PI)).collect();
        s
    }
}

/// Holonomies of the meridian and longitude of one component.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Holonomy {
    pub u: [f64; 2],
    pub v: [f64; 2],
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// A converged critical point of 𝒲 and what it determines.
#[derive(Clone, Debug, Serialize)]
pub struct CriticalResult {
    pub z: Vec<[f64; 2]>,
    pub value: [f64; 2],
    pub vol: f64,
    pub cs: f64,
    pub hess_det: [f64; 2],
    pub holonomies: Vec<Holonomy>,
    /// Per block, the length attached to each of its six edges.
    pub edge_lengths: Vec<[f64; 6]>,
    /// Per component, the summed length over its edges.
    pub component_lengths: Vec<f64>,
    /// Per component in I, |p H(u) + H(v) − iθ|.
    pub dehn_residuals: Vec<f64>,
    pub converged: bool,
    pub residual: f64,
    pub out_of_range: bool,
    /// Components with an odd number of slots, whose length bookkeeping is
    /// not the plain sum over edges.
    pub unusual_slots: Vec<usize>,
    #[serde(skip)]
    pub point: Vec<Complex64>,
    #[serde(skip)]
    pub hessian: CMatrix,
}

impl CriticalResult {
    pub fn value_c(&self) -> Complex64 {
        Complex64::new(self.value[0], self.value[1])
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Damped Newton from `z0` with the finite-difference Hessian.
pub(crate) fn newton(spec: &PotentialSpec, z0: Vec<Complex64>, tol: f64) -> Result<(Vec<Complex64>, f64)> {
    let mut z = z0;
    let mut g = spec.gradient(&z);
    let mut gn = norm(&g);
    for _ in 0..60 {
        if gn <= tol {
            break;
        }
        let h = spec.hessian(&z);
        let rhs = CVector::from_iterator(g.len(), g.iter().map(|x| -x));
        let step = linalg::solve(&h, &rhs)?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<Complex64> = z.iter().zip(step.iter()).map(|(a, d)| a + d * lambda).collect();
            let gt = spec.gradient(&trial);
            let gtn = norm(&gt);
            if gtn.is_finite() && gtn < gn {
                z = trial;
                g = gt;
                gn = gtn;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-8 {
                return Ok((z, gn));
            }
        }
    }
    Ok((z, gn))
}

/// Find the critical point of 𝒲 by continuation from the symmetric point
/// in ten steps of the fixed angles, then read off the geometry.
pub fn solve_critical(spec: &PotentialSpec) -> Result<CriticalResult> {
    let tol = 1e-12;
    let mut z = spec.seed();
    for step in 1..=10 {
        let s = spec.with_scale(step as f64 / 10.0);
        z = newton(&s, z, tol)?.0;
    }
    let (z, residual) = newton(spec, z, tol)?;
    let converged = residual <= crate::tolerances::CRITICAL_GRADIENT;
    if !converged {
        return Err(Error::NoConvergence(format!("critical point residual {residual:.3e}")));
    }
    let value = spec.potential(&z)?;
    let hessian = spec.hessian(&z);
    let hess_det = linalg::det(&hessian);
    if hess_det.norm() < 1e-12 {
        return Err(Error::SingularHessian);
    }
    let cc = spec.pres.c() as f64;
    let vol = value.im;
    let cs = reduce_cs(-(value.re - 2.0 * cc * PI * PI));

    let a = spec.angles(&z);
    let (du, per_slot) = spec.u_part_dalpha(&z);
    let mu: Vec<f64> = spec.fixed.iter().map(|&x| if x >= PI { 1.0 } else { -1.0 }).collect();
    let n = spec.pres.n();
    let mut holonomies = Vec::with_capacity(n);
    let mut dehn_residuals = Vec::new();
    for k in 0..n {
        let d = a[k] - PI;
        let (hu, hv) = match spec.i_set.iter().position(|&x| x == k) {
            Some(pos) => {
                let e = spec.eps[pos] as f64;
                let hu = -2.0 * I * e * mu[k] * d;
                let hv = I * e * mu[k] * du[k];
                let theta = 2.0 * mu[k] * (spec.fixed[k] - PI);
                dehn_residuals.push((spec.pres.p[k] as f64 * hu + hv - I * theta).norm());
                (hu, hv)
            }
            None => (2.0 * I * mu[k] * d, -I * mu[k] * du[k]),
        };
        holonomies.push(Holonomy { u: pair(hu), v: pair(hv) });
    }
    let edge_lengths: Vec<[f64; 6]> = per_slot
        .iter()
        .enumerate()
        .map(|(s, d)| {
            let b = spec.pres.blocks[s];
            std::array::from_fn(|j| (I * mu[b[j] - 1] * d[j]).re)
        })
        .collect();
    let component_lengths = holonomies.iter().map(|h| -h.v[0]).collect();
    let unusual_slots = (0..n).filter(|&k| spec.pres.slot_count(k) % 2 == 1).collect();
    Ok(CriticalResult {
        z: z.iter().map(|&x| pair(x)).collect(),
        value: pair(value),
        vol,
        cs,
        hess_det: pair(hess_det),
        holonomies,
        edge_lengths,
        component_lengths,
        dehn_residuals,
        converged,
        residual,
        out_of_range: spec.out_of_range(),
        unusual_slots,
        point: z,
        hessian,
    })
}

/// All sign vectors ε ∈ {±1}^k in a fixed order.
pub fn sign_vectors(k: usize) -> Vec<Vec<i8>> {
    (0..1usize << k)
        .map(|bits| (0..k).map(|j| if bits >> j & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::special::v8;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tetra() -> FslPresentation {
        FslPresentation::tetra1()
    }

    fn two_blocks() -> FslPresentation {
        FslPresentation::new(
            "pair",
            vec![[1, 2, 3, 1, 2, 4], [3, 4, 2, 3, 4, 1]],
            vec![0; 4],
            vec![0; 4],
        )
        .unwrap()
    }

    #[test]
    fn reduction_mod_pi_squared() {
        let p2 = PI * PI;
        assert!((reduce_cs(p2 / 2.0) - p2 / 2.0).abs() < 1e-15);
        assert!((reduce_cs(-p2 / 2.0) - p2 / 2.0).abs() < 1e-12);
        assert!((reduce_cs(3.0 * p2 + 0.1) - 0.1).abs() < 1e-12);
        assert!(cs_distance(p2 - 1e-3, 1e-3) < 3e-3);
    }

    #[test]
    fn symmetric_point_value_and_gradient() {
        for pres in [tetra(), two_blocks()] {
            let spec = PotentialSpec::from_cone_angles(&pres, None, &vec![0.0; pres.n()]).unwrap();
            let z = spec.seed();
            let cc = pres.c() as f64;
            let w = spec.potential(&z).unwrap();
            let expect = Complex64::new(2.0 * cc * PI * PI, 2.0 * cc * v8());
            assert!((w - expect).norm() < 1e-12);
            assert!(norm(&spec.gradient(&z)) < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_differences() {
        let pres = two_blocks();
        let cop = ChangeOfPairSpec::plain(&pres, &[1, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let theta: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..0.3)).collect();
            let mut spec = PotentialSpec::from_cone_angles(&pres, Some(&cop), &theta)
                .unwrap()
                .with_eps(&[1, -1]);
            spec.pres.p = vec![1, -2, 0, 3];
            spec.pres.iota = vec![0, 1, 1, 0];
            spec.q = vec![2, -1];
            let z: Vec<Complex64> = spec
                .seed()
                .iter()
                .map(|x| x + Complex64::new(rng.random_range(-0.1..0.1), rng.random_range(-0.1..0.1)))
                .collect();
            let g = spec.gradient(&z);
            let h = 1e-5;
            for j in 0..z.len() {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[j] += h;
                zm[j] -= h;
                let fd = (spec.value(&zp) - spec.value(&zm)) / (2.0 * h);
                assert!((fd - g[j]).norm() < 1e-8, "{j}: {fd} vs {}", g[j]);
            }
        }
    }

    #[test]
    fn zero_angles_return_symmetric_point() {
        let pres = tetra();
        let cop = ChangeOfPairSpec::plain(&pres, &[1]).unwrap();
        let spec = PotentialSpec::from_cone_angles(&pres, Some(&cop), &[0.0; 3]).unwrap();
        let res = solve_critical(&spec).unwrap();
        assert!((res.point[0] - c(PI)).norm() < 1e-10);
        assert!((res.point[1] - c(7.0 * PI / 4.0)).norm() < 1e-10);
        assert!((res.vol - 2.0 * v8()).abs() < 1e-8);
        assert!(res.cs.abs() < 1e-8);
    }

    #[test]
    fn mutation_shifts_cs_by_half() {
        let mut pres = tetra();
        pres.iota[0] = 1;
        let spec = PotentialSpec::from_cone_angles(&pres, None, &[0.0; 3]).unwrap();
        let res = solve_critical(&spec).unwrap();
        assert!(cs_distance(res.cs, PI * PI / 2.0) < 1e-8);
        assert!((res.vol - 2.0 * v8()).abs() < 1e-8);
    }

    #[test]
    fn small_cone_angles() {
        let pres = tetra();
        let cop = ChangeOfPairSpec::plain(&pres, &[1]).unwrap();
        let spec = PotentialSpec::from_cone_angles(&pres, Some(&cop), &[0.1; 3]).unwrap();
        let res = solve_critical(&spec).unwrap();
        assert!(res.vol < 2.0 * v8());
        assert!(res.vol > 2.0 * v8() - 0.5);
        assert!(Complex64::new(res.hess_det[0], res.hess_det[1]).norm() > 1e-6);
        assert!(res.dehn_residuals.iter().all(|&d| d < 1e-8));
        assert!(!res.out_of_range);
        // the cone manifold is still close to the complete one: short lengths
        assert!(res.component_lengths.iter().all(|l| l.abs() < 1.0));
    }

    #[test]
    fn sign_choices_agree_for_equal_angles() {
        let pres = tetra();
        let cop = ChangeOfPairSpec::plain(&pres, &[1]).unwrap();
        let base = PotentialSpec::from_cone_angles(&pres, Some(&cop), &[0.1; 3]).unwrap();
        let a = solve_critical(&base.clone().with_eps(&[1])).unwrap();
        let b = solve_critical(&base.with_eps(&[-1])).unwrap();
        assert!((a.value_c() - b.value_c()).norm() < 1e-9);
    }

    #[test]
    fn concave_with_maximum_at_symmetric_point() {
        let pres = tetra();
        let cop = ChangeOfPairSpec::plain(&pres, &[1]).unwrap();
        let spec = PotentialSpec::from_cone_angles(&pres, Some(&cop), &[0.0; 3]).unwrap();
        let top = spec.value(&spec.seed()).im;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let z: Vec<Complex64> = spec
                .seed()
                .iter()
                .map(|x| x + c(rng.random_range(-0.1..0.1)))
                .collect();
            assert!(spec.value(&z).im < top);
            let h = spec.hessian(&z).map(|x| x.im);
            let eig = nalgebra::SymmetricEigen::new(h);
            assert!(eig.eigenvalues.iter().all(|&l| l < 0.0));
        }
    }

    #[test]
    fn sign_vector_order() {
        assert_eq!(sign_vectors(0), vec![Vec::<i8>::new()]);
        assert_eq!(sign_vectors(2), vec![vec![1, 1], vec![-1, 1], vec![1, -1], vec![-1, -1]]);
    }
}
