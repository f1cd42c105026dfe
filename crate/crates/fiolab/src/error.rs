use std::fmt;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its documented domain.
    InvalidParameter(String),
    /// Two objects live on different grids.
    GridMismatch(String),
    /// The requested structural operation is not defined for this phase family.
    UnsupportedPhase(String),
    /// An integration window failed the boundary-mass check.
    WindowTooSmall(String),
    /// A computation produced a non-finite value.
    NumericFailure(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {}", msg),
            Error::GridMismatch(msg) => write!(f, "grid mismatch: {}", msg),
            Error::UnsupportedPhase(msg) => write!(f, "unsupported phase: {}", msg),
            Error::WindowTooSmall(msg) => write!(f, "window too small: {}", msg),
            Error::NumericFailure(msg) => write!(f, "numeric failure: {}", msg),
        }
    }
}

impl std::error::Error for Error {}
