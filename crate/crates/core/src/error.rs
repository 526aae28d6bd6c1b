use thiserror::Error;

/// Errors produced by the computational modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Structurally malformed input: mismatched dimensions, empty families,
    /// shapes that cannot be assembled.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Input that parses but violates a type invariant (non-commuting tuple,
    /// negative measure weight, non-Hermitian matrix where one is required).
    #[error("validation failed: {0}")]
    Validation(String),

    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to converge or an internal consistency
    /// check was violated beyond tolerance.
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
