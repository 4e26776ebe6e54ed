use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Inconsistent or invalid problem setup (grid mismatch, bad bounds, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A resource limit was exceeded (cell cap, brute-force size, capacity range).
    #[error("capacity error: {0}")]
    Capacity(String),

    /// A scalar parameter is outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A quadrature or solver failed to reach its tolerance.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The operation was called on data it does not apply to.
    #[error("usage error: {0}")]
    Usage(String),

    /// An iterative solver hit its iteration limit; carries the residual.
    #[error("iteration limit reached after {iterations} iterations (residual {residual:.3e})")]
    IterationLimit { iterations: usize, residual: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
