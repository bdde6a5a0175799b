use std::fmt;

/// Errors of the lab layer, grouped by the exit code they map to.
#[derive(Debug)]
pub enum LabError {
    /// Bad input: config, file contents, arguments, admissibility of data.
    Validation(String),
    /// A computation failed or a monitored guard tripped.
    Numerical(String),
    Io(std::io::Error),
}

pub type LabResult<T> = Result<T, LabError>;

impl LabError {
    /// 0 success, 1 numerical failure, 2 validation failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Validation(_) => 2,
            LabError::Numerical(_) | LabError::Io(_) => 1,
        }
    }
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::Validation(m) => write!(f, "validation error: {m}"),
            LabError::Numerical(m) => write!(f, "numerical error: {m}"),
            LabError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for LabError {}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e)
    }
}

impl From<dnls_core::Error> for LabError {
    fn from(e: dnls_core::Error) -> Self {
        match e {
            dnls_core::Error::Domain(_) => LabError::Validation(e.to_string()),
            _ => LabError::Numerical(e.to_string()),
        }
    }
}
