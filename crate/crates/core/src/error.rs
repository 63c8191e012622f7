use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("search space exceeded: {0}")]
    SearchSpace(String),

    #[error("not representation-finite within bounds: {0}")]
    NotRepFinite(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("quiver parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("decomposition failed: {0}")]
    Decompose(String),

    /// A mathematical postcondition did not hold. Carries the offending data.
    #[error("verification failed: {0}")]
    Violation(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
