//! Phase-space toolbox for pure N-mode Gaussian states.
//!
//! A state is represented by its 2N x 2N covariance matrix in the
//! interleaved quadrature ordering (q1, p1, ..., qN, pN), normalized so
//! that the vacuum covariance matrix is the identity. Displacements are
//! fixed to zero and are not represented.
//!
//! The crate provides:
//!
//! - [`symplectic`]: covariance-matrix validity, symplectic spectra,
//!   mode reductions, energy, purity, and entropy functionals;
//! - [`partitions`]: enumeration of k-partitions of the mode set and
//!   Stirling-number counts;
//! - [`ergotropy`]: global and k-local Gaussian ergotropy, k-local
//!   ergotropic gaps, and the exhaustive k-ergotropic score;
//! - [`geometric`]: the generalized geometric measure, its 3-mode
//!   closed-form bridge to the 2-ergotropic score, and total multimode
//!   entanglement via multistart simplex optimization;
//! - [`random`]: Haar-uniform random pure states at fixed total energy;
//! - [`io`]: a JSON interchange format for covariance matrices.
//!
//! All operations are pure functions of immutable inputs and are safe to
//! call concurrently.

#![forbid(unsafe_code)]

use thiserror::Error;

pub mod ergotropy;
pub mod geometric;
pub mod io;
mod optimize;
pub mod partitions;
pub mod random;
pub mod symplectic;

pub use ergotropy::{GapResult, ScoreResult};
pub use geometric::{GtmeConfig, GtmeResult, SqueezedProductParams};
pub use partitions::ModePartition;
pub use random::RandomStateConfig;
pub use symplectic::{Bipartition, CovarianceMatrix, SymplecticSpectrum, ValidityReport};

/// Errors produced by this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A matrix had the wrong shape for the requested operation.
    #[error("shape error: {0}")]
    Shape(String),
    /// Input text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// A covariance matrix failed the physical validity checks.
    #[error("invalid covariance matrix: {0}")]
    InvalidState(ValidityReport),
    /// The operation is defined only for pure states.
    #[error(
        "operation requires a pure state: det(cm) = {det:.6e} is outside [1 - {tol:.0e}, 1 + {tol:.0e}]"
    )]
    MixedState { det: f64, tol: f64 },
    /// Numerical linear algebra failed to produce a usable result.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// An enumeration would exceed the configured budget.
    #[error(
        "partition budget exceeded: S({n_modes},{k}) = {count} partitions > budget {budget}"
    )]
    BudgetExceeded {
        n_modes: usize,
        k: usize,
        count: u128,
        budget: u128,
    },
    /// A Stirling number fell outside the supported exact range.
    #[error("S({n},{k}) is outside the supported exact range (n <= 70, 128-bit)")]
    StirlingRange { n: u32, k: u32 },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
