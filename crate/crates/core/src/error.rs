use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level r = {0} must be odd and at least 3")]
    InvalidLevel(i64),
    #[error("index {index} outside the table range 0..={max}")]
    OutOfRange { index: i64, max: i64 },
    #[error("color {color} is not an even integer in 0..={max}")]
    InvalidColor { color: i64, max: i64 },
    #[error("triple ({0}, {1}, {2}) is not r-admissible")]
    Inadmissible(i64, i64, i64),
    #[error("six-tuple {0:?} is not of hyperideal type")]
    NotHyperideal([i64; 6]),
    #[error("exponent {0} is not integral")]
    NonIntegral(String),
    #[error("point {0} lies outside the principal strip")]
    OutsideStrip(String),
    #[error("point {point} lies within {dist:.3e} of a pole")]
    NearPole { point: String, dist: f64 },
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("singular Hessian")]
    SingularHessian,
    #[error("grid of {points} points exceeds the cap of {cap} (use --force to lift it)")]
    GridTooLarge { points: u128, cap: u128 },
    #[error("expected {expected} entries, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("invalid presentation: {0}")]
    Presentation(String),
    #[error("axis mismatch: {0}")]
    AxisMismatch(String),
    #[error("fit needs at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("rank-deficient design matrix")]
    RankDeficient,
    #[error("invariant vanishes at r = {0}")]
    ZeroInvariant(u32),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
