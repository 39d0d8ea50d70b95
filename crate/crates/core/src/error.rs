use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: every truncated mode needs at least 2 levels")]
    InvalidDimension { dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown mode label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate mode label `{0}`")]
    DuplicateLabel(String),

    #[error("operands live on different bases")]
    BasisMismatch,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operator is not Hermitian (max |M - M^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Hamiltonian is not diagonal (max off-diagonal magnitude {offdiag:e})")]
    NotDiagonal { offdiag: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid system specification: {0}")]
    InvalidSpec(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("step size underflow at t = {time:e}")]
    StepSizeUnderflow { time: f64 },

    #[error("integration failed at t = {time:e}: {reason}")]
    IntegrationFailure { time: f64, reason: String },

    #[error("gate conditions inconsistent: {0}")]
    InconsistentConditions(String),

    #[error("measurement outcome {outcome} has probability {probability:e}")]
    ImpossibleOutcome { outcome: usize, probability: f64 },
}

impl Error {
    /// Time at which an integration error occurred, if any.
    pub fn failure_time(&self) -> Option<f64> {
        match self {
            Error::StepSizeUnderflow { time } | Error::IntegrationFailure { time, .. } => Some(*time),
            _ => None,
        }
    }
}
