//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} exceeds configured cap {cap}")]
    CapExceeded { index: usize, cap: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole encountered at {0}")]
    Pole(String),

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("non-finite sample at {location}")]
    NonFinite { location: String },
}
