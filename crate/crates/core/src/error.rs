use thiserror::Error;

/// Errors surfaced by the engine.
///
/// `Input` covers malformed or inconsistent user data and maps to exit code 2
/// in the CLI; `Unsupported` covers well-formed inputs outside the engine's
/// domain (same exit code); `Internal` flags a broken engine invariant (two
/// pipelines disagreeing, a cross-check failing) and is treated as a failed
/// check rather than an input problem.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
