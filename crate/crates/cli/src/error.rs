use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("simulation failed: {0}")]
    Simulation(#[from] optomech_core::Error),

    #[error("invalid result: {0}")]
    Table(String),

    #[error("convergence check failed: max difference {difference:e} in column `{column}` exceeds {threshold:e}")]
    Convergence { column: String, difference: f64, threshold: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code: 2 config, 3 integration, 4 convergence, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Simulation(e) if e.failure_time().is_some() => 3,
            CliError::Simulation(optomech_core::Error::InvalidParameter(_))
            | CliError::Simulation(optomech_core::Error::InvalidSpec(_))
            | CliError::Simulation(optomech_core::Error::InvalidDimension { .. })
            | CliError::Simulation(optomech_core::Error::InconsistentConditions(_))
            | CliError::Simulation(optomech_core::Error::Unsupported(_)) => 2,
            CliError::Simulation(_) => 3,
            CliError::Convergence { .. } => 4,
            CliError::Table(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<toml::de::Error> for CliError {
    fn from(e: toml::de::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
