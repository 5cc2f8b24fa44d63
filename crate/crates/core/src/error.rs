use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidPmf(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("problem too large: {0}")]
    SizeCap(String),

    #[error("linear program failed: {0}")]
    Solver(String),

    #[error("iterative solver did not converge: {0}")]
    NonConvergence(String),
}

impl Error {
    /// True for errors caused by bad user input (as opposed to numerical failure).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidPmf(_)
                | Error::InvalidChannel(_)
                | Error::InvalidArgument(_)
                | Error::DimensionMismatch(_)
                | Error::SizeCap(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
