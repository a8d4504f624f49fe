//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("structural error at degree {degree}: {message}")]
    Structure { degree: usize, message: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("generator gave up after {tries} tries: {message}")]
    Generator { tries: usize, message: String },

    #[error("duality data rejected: {0}")]
    Duality(String),

    #[error("instance format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
