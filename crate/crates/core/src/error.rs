use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input at {at}: {msg}")]
    Validation { at: String, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(at: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Validation { at: at.into(), msg: msg.into() }
}
