//! Crate-wide error type.

use alloc::string::String;

/// Convenience alias used by all fallible operations in this crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors produced by toolkit operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector or matrix sizes do not line up.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch {
        /// Size required by the operation.
        expected: usize,
        /// Size actually supplied.
        got: usize,
    },

    /// A configured size or memory cap would be exceeded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// The right-hand side returned a non-finite value during time stepping.
    #[error("solver abort: non-finite right-hand side at t = {t}")]
    NonFinite {
        /// Time at which the non-finite value appeared.
        t: f64,
    },

    /// A matrix expected to be Hermitian is not.
    #[error("matrix is not Hermitian: max deviation {0:.3e}")]
    NotHermitian(f64),

    /// The Hermitian part of the operator has a negative eigenvalue, so the
    /// dissipative propagator identity does not apply.
    #[error("Hermitian part is not positive semi-definite: min eigenvalue {0:.3e}")]
    NotPositiveSemiDefinite(f64),

    /// Exact Zwanzig evaluation was requested for a non-commuting pair.
    #[error("operators do not commute: ||[H_i, H_j]|| = {0:.3e}")]
    NonCommuting(f64),

    /// Ground-state reference requested but the ground state is degenerate.
    #[error("degenerate ground state: spectral gap {0:.3e}")]
    DegenerateGroundState(f64),

    /// An exponential argument would overflow double precision.
    #[error("overflow guard: {0}")]
    Overflow(String),
}
