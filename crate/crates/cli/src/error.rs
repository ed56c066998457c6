use thiserror::Error;

/// Failures surfaced by the command-line tool, each with its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(solitonlab_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<solitonlab_core::Error> for CliError {
    fn from(e: solitonlab_core::Error) -> Self {
        match e {
            solitonlab_core::Error::InvalidInput(m) => CliError::Validation(m),
            solitonlab_core::Error::TimestepTooLarge { dt, limit } => CliError::Validation(format!(
                "time step {dt:e} exceeds the stability guard {limit:e} (internal units)"
            )),
            other => CliError::Numerical(other),
        }
    }
}
