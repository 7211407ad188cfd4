//! A numerical laboratory for products of truncated Toeplitz matrices with
//! singular (Fisher-Hartwig) symbols.
//!
//! The crate builds the finite-order objects exactly — predictor
//! polynomials by Levinson recursion, structured inverses in
//! Gohberg-Semencul form, traces and generalized eigenvalues of
//! `T_N(f1) T_N^{-1}(f2)` — and confronts them with their large-`N`
//! predictions: trace expansions with explicit or fitted constants, power
//! traces driven by derivatives of a mixing functional, eigenvalue limits,
//! sharp large-deviation corrections, and the CLT for quadratic forms of
//! long-memory Gaussian processes.
//!
//! Start with the `examples/` directory: each example exercises one
//! capability end to end. The `toeplitz-lab` binary runs the same
//! experiments from flat config files (see [`experiment`]).

pub mod error;
pub mod experiment;
pub mod fit;
pub mod quad;
pub mod special;
pub mod spectral;
pub mod stochastic;
pub mod symbols;
pub mod toeplitz;

pub mod asymptotics;

pub use error::{LabError, LabResult};
pub use symbols::{FHSymbol, FourierSeries, GridSymbol};
