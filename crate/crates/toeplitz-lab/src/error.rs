//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type LabResult<T> = Result<T, LabError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("singularity exponent alpha = {0} outside the open interval (-1/2, 1/2)")]
    AlphaOutOfRange(f64),

    #[error("regular polynomial is invalid: {0}")]
    BadPolynomial(String),

    #[error("symbol has a pole at theta = 0 (alpha < 0); value is unbounded")]
    PoleAtZero,

    #[error("grid symbol requires M >= 256 and a power of two, got {0}")]
    BadGridSize(usize),

    #[error("mixing weight t = {0} must be nonnegative")]
    NegativeMixWeight(f64),

    #[error("mix_symbol requires alpha1 > 0 > alpha2, got alpha1 = {0}, alpha2 = {1}")]
    MixHypothesis(f64, f64),

    #[error("truncation order K = {k} is too short for the requested operation (need >= {need})")]
    TruncationTooShort { k: usize, need: usize },

    #[error("inner product diverges: weighted summand decays like m^{exponent} with exponent {exponent:.3} >= -1")]
    DivergentPairing { exponent: f64 },

    #[error("Toeplitz matrix is not positive definite: leading minor of order {order} fails (reflection coefficient {reflection})")]
    NotPositiveDefinite { order: usize, reflection: f64 },

    #[error("vector length {got} does not match operator size {expected}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("dense path refused: order N = {0} exceeds the dense guard {1}")]
    DenseGuard(usize, usize),

    #[error("structured trace path only supports s = 1, got s = {0}")]
    StructuredPowerUnsupported(usize),

    #[error("power s must be >= 1")]
    ZeroPower,

    #[error("eigenvalue computation failed at order {n} (condition estimate {cond:.3e})")]
    EigenFailure { n: usize, cond: f64 },

    #[error("case ({a1}, {a2}) is outside the classified parameter range")]
    OutOfRangeCase { a1: f64, a2: f64 },

    #[error("quadrature failed to converge: estimated error {err:.3e} exceeds tolerance {tol:.3e}")]
    QuadratureFailure { err: f64, tol: f64 },

    #[error("polynomial fit is ill-conditioned: uncertainty {unc:.3e} exceeds {bound:.3e}")]
    IllConditionedFit { unc: f64, bound: f64 },

    #[error("argument 2t = {0} outside the admissible interval (-1/delta, 1/delta) with delta = {1}")]
    LdpDomain(f64, f64),

    #[error("log-mgf domain violation: 2 t mu_max = {0} >= 1 (mu_max = {1})")]
    MgfDomain(f64, f64),

    #[error("rate fit needs at least {need} points with nonzero residuals, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
