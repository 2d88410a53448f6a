//! Command implementations behind the `t4flow` binary.
//!
//! Every command renders its whole output into a `String`; the binary only
//! decides where it goes. That keeps the commands testable without spawning
//! processes.

pub mod args;
pub mod commands;
pub mod format;
pub mod verify;

use t4flow_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Precondition(CoreError),
    #[error("numerical failure: {0}")]
    Numeric(CoreError),
    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification { .. } => 1,
            CliError::Usage(_) | CliError::Precondition(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        use CoreError::*;
        match e {
            IncompatibleMetric { .. }
            | InvalidMetric(_)
            | SingularOrbit { .. }
            | ChartMismatch { .. }
            | NonpositiveAlphaSquared(_)
            | InvalidStep { .. }
            | GridMismatch { .. }
            | InvalidPerturbation(_) => CliError::Precondition(e),
            NonfiniteState { .. }
            | SuspectedDoubleZero { .. }
            | InsufficientZeros { .. }
            | NonDecayingProfile
            | PhaseNearSingular { .. }
            | TrajectoryEscape { .. } => CliError::Numeric(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
