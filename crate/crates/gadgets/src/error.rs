use qdecide_core::CoreError;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum GadgetError {
    #[error("letter {letter} is outside the alphabet 1..={m}")]
    LetterOutOfRange { letter: usize, m: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("nu = {0} is outside the open interval (-sqrt(d-1), 1/sqrt(d-1))")]
    NuOutOfRange(String),
    #[error("no admissible gadget parameters: {0}")]
    InfeasibleParameters(String),
    #[error("target and anchor leave no room for the alignment direction")]
    DegenerateAlignment,
    #[error("alignment vector is zero")]
    ZeroVector,
    #[error("could not certify {0}")]
    NotCertified(String),
    #[error("{words} words exceed the enumeration cap of {cap}")]
    CapExceeded { words: u128, cap: u128 },
    #[error("bad bundle document: {0}")]
    Format(String),
    #[error(transparent)]
    Core(CoreError),
}

impl From<CoreError> for GadgetError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::DegenerateAlignment => GadgetError::DegenerateAlignment,
            CoreError::ZeroVector => GadgetError::ZeroVector,
            e => GadgetError::Core(e),
        }
    }
}

pub type Result<T> = std::result::Result<T, GadgetError>;
