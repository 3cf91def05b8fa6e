use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("matrix is singular or not positive definite (min eigenvalue {min_eigenvalue:e})")]
    SingularInput { min_eigenvalue: f64 },

    #[error("support of the first state is not contained in the support of the second")]
    SupportMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("operation needs a discrete schedule but the protocol is continuous")]
    ContinuousModeRequested,

    #[error("operation needs a continuous protocol but the protocol is discrete")]
    DiscreteModeRequested,

    #[error("time {time} is not a step boundary of the schedule")]
    NonBoundaryTime { time: f64 },

    #[error("time interval [{t0}, {t1}] is outside [0, {duration}]")]
    TimeOutOfRange { t0: f64, t1: f64, duration: f64 },

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("inverse temperature must be positive and finite, got {beta}")]
    InvalidBeta { beta: f64 },

    #[error("no step boundary at the requested split time {time}")]
    OddSplitBoundary { time: f64 },

    #[error("eigen-index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("smallest thermal eigenvalue {alpha:e} underflows the quadratic bound")]
    InvalidAlpha { alpha: f64 },

    #[error("visibilities are not stochastic: column {column} sums to {sum}")]
    NonStochasticVisibilities { column: usize, sum: f64 },

    #[error("work distribution is invalid: {0}")]
    InvalidDistribution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
