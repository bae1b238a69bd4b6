use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Inputs that do not fit together (mismatched alphabets, bad indices, malformed tables).
    #[error("structural error: {0}")]
    Structural(String),
    /// Valid input outside the supported family (non-ℤ sofic machinery, proper-subgroup windows).
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// Input that collapses to nothing (empty restricted alphabet and the like).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A configured search bound was exhausted before an answer was reached.
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("corrupted data: {0}")]
    Corruption(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn structural<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Structural(msg.into()))
}
