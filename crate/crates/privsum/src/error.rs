//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid static configuration (bad modulus, mismatched parameters, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Invalid argument to an operation.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A value left the representable range; we never wrap silently.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Operation undefined on the given input (e.g. inverse of zero).
    #[error("domain error: {0}")]
    Domain(String),

    /// Fewer shares/partials available than the threshold requires.
    #[error("insufficient shares: {0}")]
    InsufficientShares(String),

    /// A ciphertext or protocol value failed an internal consistency check.
    #[error("corrupted value: {0}")]
    Corruption(String),

    /// A per-round protocol failure (missing message, phase violation).
    #[error("round error: {0}")]
    Round(String),

    /// Text input did not match the documented grammar.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
