use thiserror::Error;

/// Errors raised by the simulation, estimation and prediction routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(&'static str),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid Levy seed: {0}")]
    InvalidSeed(&'static str),
    #[error("cumulants incompatible with the {family} family: {reason}")]
    InvalidCumulants {
        family: &'static str,
        reason: &'static str,
    },
    #[error("diamond-grid truncation counts must be even (p = {p}, q = {q})")]
    OddTruncation { p: usize, q: usize },
    #[error("diamond grid requires dx = c * dt (dx = {dx}, c * dt = {expected})")]
    GridMismatch { dx: f64, expected: f64 },
    #[error("diamond grid requires odd extents (n = {n}, m = {m})")]
    EvenExtent { n: usize, m: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("R / delta = {ratio} is not a positive integer")]
    NonIntegerTruncation { ratio: f64 },
    #[error("closed-form MSE sums require c = 1 (got c = {c})")]
    UnsupportedShape { c: f64 },
    #[error("no valid pairs at lag {lag}")]
    NoPairs { lag: usize },
    #[error("need at least {needed} valid points, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("normalised variogram value {value} outside (0, 2)")]
    DegenerateVariogram { value: f64 },
    #[error("least-squares objective has no interior minimum in [{lo}, {hi}]")]
    OptimizerNoBracket { lo: f64, hi: f64 },
    #[error("observation sites {0} and {1} coincide")]
    DuplicateSites(usize, usize),
    #[error("correlation matrix is not positive definite")]
    SingularCorrelation,
    #[error("operation requires a Gaussian seed")]
    NotGaussian,
}

pub type Result<T> = std::result::Result<T, Error>;
