use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("step {step} failed: {reason}")]
    Step { step: usize, reason: String },
    #[error("oracle error: {0}")]
    Oracle(String),
    #[error("linear solve failed: {0}")]
    Linear(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
