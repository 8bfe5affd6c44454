use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// The variants line up with the CLI exit codes: `Resource` maps to 3,
/// `Interrupted` and `Numeric` to 1, everything else to 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("underpowered: {0}")]
    Underpowered(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("run interrupted after {completed} of {total} seeds; partial report written")]
    Interrupted { completed: usize, total: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Resource(_) => 3,
            LabError::Interrupted { .. } | LabError::Numeric(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
