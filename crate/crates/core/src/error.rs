use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite amplitude in {0}")]
    NonFinite(&'static str),

    #[error("degenerate state: {0}")]
    DegenerateState(&'static str),

    #[error("operator is not hermitian (max |M - M†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("postselection is orthogonal to preselection (|<fin|in>| = {overlap:e}); weak value undefined")]
    OrthogonalPostselection { overlap: f64 },

    #[error("postselected meter state vanishes (norm = {norm:e})")]
    NullPostselection { norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sweep needs at least 2 points, got {points}")]
    InsufficientData { points: usize },

    #[error("unknown path label {0:?}")]
    UnknownLabel(String),

    #[error("internal invariant violated: {0}")]
    InvariantBreach(String),
}

pub type Result<T> = std::result::Result<T, Error>;
