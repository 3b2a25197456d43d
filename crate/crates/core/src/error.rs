use thiserror::Error;

/// Errors produced by the capacity, Fock-space and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A precondition of an analytic bound does not hold, so the bound is not claimed.
    #[error("outside the domain of the bound: {0}")]
    Domain(String),

    /// The truncated Fock space holds too little of the state.
    #[error("truncation too small: captured mass {captured_mass:.6} < required {required}")]
    Accuracy { captured_mass: f64, required: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
