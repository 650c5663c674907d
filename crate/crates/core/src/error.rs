use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coupling matrix is not Hermitian at entry ({row}, {col}): |B_ij - conj(B_ji)| = {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("matrix is not unitary: max |U†U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("pulse segment {index} has invalid duration {duration}")]
    InvalidPulse { index: usize, duration: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("edge threshold must be non-negative, got {0}")]
    NegativeThreshold(f64),

    #[error("max denominator must be at least 1")]
    InvalidMaxDenominator,

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("good subspace must be a nonempty strict subset of the basis: {0}")]
    InvalidGoodSubspace(String),

    #[error("phase {0} outside [0, pi]")]
    InvalidPhase(f64),

    #[error("initial good-subspace probability must lie in (0, 1], got {0}")]
    InvalidProbability(f64),

    #[error(
        "the initial state has no overlap with the good subspace (g = 0), so amplitude \
         amplification cannot raise it; apply a mixing unitary to the initial state first \
         (enable pre-rotation)"
    )]
    ZeroGoodOverlap,

    #[error("invalid measurement partition: {0}")]
    InvalidPartition(String),

    #[error("sampled block {block} has probability {probability:e}, treated as impossible")]
    ImpossibleOutcome { block: usize, probability: f64 },

    #[error("integration did not converge: norm drift {drift:e}")]
    RefinementFailure { drift: f64 },
}
