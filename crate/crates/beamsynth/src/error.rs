//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by synthesis, scoring, and file handling.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument fell outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration value violates its contract.
    #[error("config error: {0}")]
    Config(String),
    /// Dimensions of related containers disagree.
    #[error("shape error: {0}")]
    Shape(String),
    /// An encoding construction failed its self-check.
    #[error("encoding error: {0}")]
    Encoding(String),
    /// A pattern cannot be scored.
    #[error("scoring error: {0}")]
    Scoring(String),
    /// An input file failed to parse or validate.
    #[error("parse error: {0}")]
    Parse(String),
    /// A benchmark case failed during execution.
    #[error("case error: {0}")]
    Case(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
