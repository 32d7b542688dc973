use thiserror::Error;

/// Workflow errors, partitioned by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Exit code 1: configuration or validation problems.
    #[error("configuration error: {0}")]
    Config(String),

    /// Exit code 2: numerical failure (singular or ill-conditioned system,
    /// series truncation, quadrature breakdown) or I/O while writing results.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Exit code 3: verification tolerances exceeded.
    #[error("verification failure: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<interface_crack::Error> for CliError {
    fn from(e: interface_crack::Error) -> Self {
        use interface_crack::Error::*;
        match e {
            InvalidMaterial(_) | InvalidInput(_) | DimensionMismatch(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("i/o failure: {e}"))
    }
}
