use thiserror::Error;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside its mathematical domain (out-of-range argument,
    /// invalid schedule parameter, malformed point).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Basis index not admitted by the spec, or a lookup past the end
    /// of a pooled vector / index set.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// Mismatch between a spec's dimension and the data handed to it.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An enumeration would exceed the configured cap.
    #[error("resource cap exceeded: requested {requested}, cap {cap}")]
    ResourceCap { requested: u128, cap: u128 },

    /// A combinatorial guard (factorial/subset blow-up) was hit.
    #[error("input too large: {0}")]
    TooLarge(String),

    /// A linear solve or optimization failed (rank deficiency,
    /// non-finite data, failed bracketing).
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
