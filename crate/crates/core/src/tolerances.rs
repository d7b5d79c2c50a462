//! Tolerances pinned for the self-test and acceptance suites.

/// Kernel unitarity, max entry error of μ²HH − I.
pub const KERNEL_UNITARITY: f64 = 1e-10;
/// Relative Parseval discrepancy.
pub const PARSEVAL: f64 = 1e-9;
/// Relative gap between the two 6j routes, standard precision.
pub const TWO_PATH_STANDARD: f64 = 1e-6;
/// Relative gap between the two 6j routes, extended precision.
pub const TWO_PATH_EXTENDED: f64 = 1e-12;
/// Relative spread of 6j values over the tetrahedral symmetry orbit.
pub const SYMMETRY: f64 = 1e-12;
/// Residuals of the quantum dilogarithm functional equations.
pub const QDILOG_IDENTITY: f64 = 1e-8;
/// Largest admissible constant in the quantum factorial estimate.
pub const FACTORIAL_ESTIMATE_C: f64 = 2.0;
/// Fixed-point values of ξ and V at the symmetric point.
pub const FIXED_POINT: f64 = 1e-10;
/// Second partials at the symmetric point.
pub const HESSIAN_PROBE: f64 = 1e-5;
/// Critical value at zero angles and CS offsets.
pub const CRITICAL_VALUE: f64 = 1e-8;
/// Dehn-filling residual for converged solves.
pub const DEHN_RESIDUAL: f64 = 1e-8;
/// Gradient residual required of a converged critical point.
pub const CRITICAL_GRADIENT: f64 = 1e-10;
/// Extrapolated 6j growth against v₈.
pub const COSTANTINO_LIMIT: f64 = 0.02;
/// Extrapolated FSL growth against 2v₈ and 0 mod π².
pub const FSL_LIMIT: f64 = 0.05;
/// Relative volume gap for the change-of-pair limit.
pub const COP_VOLUME_REL: f64 = 0.02;
/// CS gap for the change-of-pair limit, in units of π².
pub const COP_CS_PI2: f64 = 0.05;
/// Gaussian saddle estimate residual.
pub const GAUSSIAN: f64 = 1e-10;
/// Accepted range for the error ratio when r doubles.
pub const HALVING: (f64, f64) = (0.3, 0.7);
/// Default small-angle guard, radians.
pub const ANGLE_GUARD: f64 = 0.3;
/// Default grid cap for state sums.
pub const GRID_CAP: u128 = 10_000_000;
