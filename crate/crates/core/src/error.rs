use thiserror::Error;

use crate::milp::ConstraintTag;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("quantization error: {0}")]
    Quantization(String),

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("integrity error: {}", .0.join("; "))]
    Integrity(Vec<String>),

    #[error("generation error: {0}")]
    Generation(String),

    #[error("model error: {0}")]
    Model(String),

    /// An assignment violates the model; `tag` names the first violated family.
    #[error("decode error: constraint {tag} violated ({detail})")]
    Decode { tag: ConstraintTag, detail: String },

    #[error("solver backend error: {message}")]
    Backend { message: String, diagnostics: String },

    #[error("oracle refused: {0}")]
    OracleLimit(String),

    #[error("balancer error: {0}")]
    Balance(String),

    #[error("report error: {0}")]
    Report(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
