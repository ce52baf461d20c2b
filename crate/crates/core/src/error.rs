//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("only the one-dimensional interval basis is implemented (got N = {0})")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("constraint integral is numerically zero ({0:.3e})")]
    ZeroDenominator(f64),

    #[error("nonlinearity exponents must be >= 1 (p = {p}, q = {q})")]
    NonIntegrablePower { p: f64, q: f64 },

    #[error("iteration budget exhausted after {iterations} iterations (grad norm {grad_norm:.3e})")]
    NotConverged {
        iterations: usize,
        grad_norm: f64,
        state: Box<crate::solver::GroundState>,
    },

    #[error("exponent sum {sum} reaches the critical exponent {crit}; set the degeneration flag to proceed")]
    CriticalExponent { sum: f64, crit: f64 },

    #[error("cutoff support [{lo:.6}, {hi:.6}] crosses the domain boundary")]
    CutoffEscapesDomain { lo: f64, hi: f64 },

    #[error("extrapolation unstable: {0}")]
    ExtrapolationUnstable(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("Kelvin transform evaluated at its pole x = {0}")]
    PoleSingularity(f64),

    #[error("profile fit degenerate: only {points} points above half-max (need >= 8)")]
    FitDegenerate { points: usize },

    #[error("rescaling window too small: d/lambda = {ratio:.3} < 4")]
    WindowTooSmall { ratio: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
