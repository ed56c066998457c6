use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Numerical failures (NaN, norm drift, non-convergence) are kept apart from
/// contract violations so the CLI can map them to different exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in the wavefunction at step {step}")]
    NonFinite { step: usize },

    #[error("norm drifted by {drift:e} (relative) at step {step}")]
    NormDrift { step: usize, drift: f64 },

    #[error("time step {dt:e} exceeds the stability guard {limit:e}")]
    TimestepTooLarge { dt: f64, limit: f64 },

    #[error("density {density:e} outside the domain of the nonlinearity at step {step}")]
    NonlinearityDomain { step: usize, density: f64 },

    #[error("ground state did not converge after {steps} steps (residual {residual:e})")]
    NotConverged { steps: usize, residual: f64 },

    #[error("energy drift {drift:e} exceeds tolerance {tolerance:e}")]
    EnergyDrift { drift: f64, tolerance: f64 },

    #[error("no oscillation found: {0}")]
    NoOscillation(String),

    #[error("not enough usable samples: {found} < {required}")]
    TooFewSamples { found: usize, required: usize },
}

impl Error {
    /// True for failures of the numerics, as opposed to rejected inputs.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidInput(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
