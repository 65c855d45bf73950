use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("atom {atom} out of range for a space with {count} atoms")]
    AtomOutOfRange { atom: usize, count: usize },

    #[error("empty atom set where a non-empty one is required")]
    EmptySet,

    /// A configured resource cap (word count, atom count, exact enumeration size) was hit.
    #[error("{what} exceeds cap of {cap}")]
    CapExceeded { what: String, cap: usize },

    #[error("iteration did not converge after {iterations} steps (best residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("atom {atom} cannot reach the target set")]
    Unreachable { atom: usize },

    #[error("restriction is disconnected at word-length cap {cap}: component containing atom {atom} splits")]
    RestrictionDisconnected { cap: usize, atom: usize },

    #[error("degenerate profile: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
