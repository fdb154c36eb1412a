use std::fmt;

/// Failure categories, aligned with the CLI exit-code contract:
/// parse errors exit 1, precondition violations exit 2, non-convergence 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or invalid input data.
    Parse(String),
    /// An operation was called outside its stated preconditions.
    Precondition(String),
    /// An iterative procedure failed to converge or had to abort.
    NonConvergence(String),
    /// Internal invariant broke; indicates a bug, not bad input.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::NonConvergence(m) => write!(f, "did not converge: {m}"),
            Error::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for Error {}
