use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("code construction failed after {restarts} restarts")]
    ConstructionFailed { restarts: usize },

    #[error("alist parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("inconsistent alist: {0}")]
    Inconsistent(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid code rate {0}; must lie in (0, 1]")]
    InvalidRate(f64),

    #[error("degenerate graph: {0}")]
    Degenerate(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}
