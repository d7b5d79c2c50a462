//! Relative Reshetikhin-Turaev invariants of fundamental shadow links at
//! the root of unity q = exp(2πi/r), their change-of-pair transforms and
//! the hyperbolic geometry that governs their growth.
//!
//! Modules follow the layering of the computation:
//!
//! * [`qcore`] holds the level context, quantum integers, log-scale complex
//!   numbers and the Fourier kernel.
//! * [`qdilog`] evaluates the quantum dilogarithm by contour quadrature.
//! * [`sixj`] evaluates quantum 6j-symbols by two independent routes.
//! * [`fsl`] builds invariants of shadow-link presentations.
//! * [`geom`] has Li₂, Λ, the volume potentials and the critical point solver.
//! * [`saddle`] is a generic saddle-point estimator.
//! * [`asympt`] produces growth tables, limit fits and leading-order predictions.
//! * [`cli`] is the command-line front end behind the `fslrt` binary.

pub mod asympt;
pub mod cli;
pub mod error;
pub mod fsl;
pub mod geom;
pub mod linalg;
pub mod qcore;
pub mod qdilog;
pub mod quad;
pub mod saddle;
pub mod selftest;
pub mod sixj;
pub mod tolerances;

pub use error::{Error, Result};
pub use qcore::{LogComplex, Precision, RootContext};

pub use num_complex::Complex64;
