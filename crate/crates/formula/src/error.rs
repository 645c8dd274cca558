use qdecide_core::CoreError;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum FormulaError {
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error("assignment is missing variable `{0}`")]
    IncompleteAssignment(String),
    #[error("formula has universal quantifiers; only existential formulas can be witnessed")]
    NotExistential,
    #[error("channel is not unital")]
    NotUnital,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T> = std::result::Result<T, FormulaError>;
