//! Crate-level error type for state, evolution and entanglement operations.
//! Synthesis has its own richer error enum in [`crate::synthesis`].

use crate::state::Basis;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("basis mismatch: expected {expected:?}, got {got:?}")]
    BasisMismatch { expected: Basis, got: Basis },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error(
        "matrix does not follow the single-axis sector pattern \
         (off-pattern mass {mass:.3e} exceeds tolerance {tol:.3e})"
    )]
    PatternViolation { mass: f64, tol: f64 },

    #[error("tuning radicand is negative ({radicand}); no real offset exists")]
    InfeasibleRadicand { radicand: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
