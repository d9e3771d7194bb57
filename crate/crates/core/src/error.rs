use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (squared norm {0})")]
    Unnormalized(f64),

    #[error("not a valid density operator: {0}")]
    InvalidDensity(String),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid qubit index set: {0}")]
    InvalidIndices(String),

    #[error("invalid Schmidt vector: {0}")]
    InvalidSchmidt(String),

    /// The resource is (numerically) maximally entangled, so the correction
    /// distribution has a vanishing denominator.
    #[error("resource state is maximally entangled; correction distribution is undefined")]
    MaximallyEntangled,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
