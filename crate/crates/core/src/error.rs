use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate pattern id `{0}`")]
    DuplicateId(String),

    #[error("unknown pattern `{0}`")]
    UnknownPattern(String),

    #[error("invalid symbol {0:?}: symbols must be non-empty and contain no whitespace")]
    InvalidSymbol(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("alignment cannot be decoded losslessly: {0}")]
    NonDecodable(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("grammar mismatch: container expects sha256 {expected}, store hashes to {actual}")]
    GrammarMismatch { expected: String, actual: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
