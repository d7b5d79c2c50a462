//! Hyperbolic geometry from the dilogarithm: special functions, the
//! single-block potentials and the critical points of the glued potential.

pub mod critical;
pub mod potential;
pub mod special;

pub use critical::{cs_distance, reduce_cs, sign_vectors, solve_critical, CriticalResult, Holonomy, PotentialSpec};
pub use potential::{
    hessian_probe, tet_volume, u_potential, v_potential, v_value, xi_of_alpha, AngleSixTuple, HessianProbe, TetVolume,
};
pub use special::{clausen2, dilog, lobachevsky, v8};
