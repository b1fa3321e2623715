use thiserror::Error;

/// Errors raised by the codec, engine, similarity and calibration layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate genome: {0}")]
    DegenerateGenome(String),
    #[error("no selectable parent: every individual has fitness 0")]
    NoSelectableParent,
    #[error("degenerate trial: {0}")]
    DegenerateTrial(String),
    #[error("underdetermined fit: {0}")]
    UnderdeterminedFit(String),
    #[error("invalid setup: {0}")]
    InvalidSetup(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not found: {0}")]
    NotFound(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
