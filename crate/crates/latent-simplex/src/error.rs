use thiserror::Error;

/// Errors surfaced by solver, generator, and diagnostic entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// The selection subspace collapsed before all vertices were found,
    /// which indicates the input violates the solver's assumptions.
    #[error("selection subspace has dimension 0 at round {round}")]
    DegenerateSubspace { round: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
