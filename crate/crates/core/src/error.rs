//! Error types shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric input is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration is structurally invalid (shape mismatch, empty list,
    /// unsorted gains, out-of-range index, ...).
    #[error("config error: {0}")]
    Config(String),
    /// The requested enumeration exceeds a hard guard limit.
    #[error("capacity error: {0}")]
    Capacity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
