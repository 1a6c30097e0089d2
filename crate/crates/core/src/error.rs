use thiserror::Error;

/// Errors raised by the numerical kernels, the trainer and the checkpoint layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("zero matrix where a nonzero matrix is required")]
    ZeroMatrix,

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("bisection bracket infeasible up to power {0}")]
    BracketInfeasible(f64),

    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    CheckpointVersion { found: u32, expected: u32 },

    #[error("checkpoint content hash mismatch (stored {stored}, computed {computed})")]
    CheckpointHash { stored: String, computed: String },

    #[error("malformed checkpoint: {0}")]
    CheckpointMalformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
