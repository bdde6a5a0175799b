use alloc::string::String;
use core::fmt;

/// Failure categories shared by every module.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the admissible set (z = 0, non-finite values, bad grids, ...).
    Domain(String),
    /// An iterative method or adaptive scheme did not reach its tolerance.
    Convergence(String),
    /// Overflow, NaN, or a monitored quantity left its safe range.
    Numerical(String),
    /// Two independent routes to the same quantity disagree.
    Consistency(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Convergence(m) => write!(f, "convergence error: {m}"),
            Error::Numerical(m) => write!(f, "numerical error: {m}"),
            Error::Consistency(m) => write!(f, "consistency error: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn convergence(msg: impl Into<String>) -> Error {
    Error::Convergence(msg.into())
}

pub(crate) fn numerical(msg: impl Into<String>) -> Error {
    Error::Numerical(msg.into())
}
