use thiserror::Error;

/// Errors raised by grid construction, propagation and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("state error: {0}")]
    State(String),
    #[error("stability error: {0}")]
    Stability(String),
    #[error("degenerate state: {0}")]
    Degenerate(String),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
}

pub type Result<T> = std::result::Result<T, Error>;
