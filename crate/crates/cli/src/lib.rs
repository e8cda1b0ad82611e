//! Report assembly behind the `influence-lab` binary.

pub mod analyze;
pub mod approx;
pub mod input;
pub mod simulate;
pub mod verify;

use influence_core::Error;
use thiserror::Error as ThisError;

pub use analyze::{cmd_analyze, AnalysisReport, AnalyzeOptions};
pub use approx::{cmd_approx_degree, ApproxDegreeReport};
pub use simulate::{cmd_simulate, AlgorithmChoice, SimulateOptions, SimulateReport};
pub use verify::{cmd_verify, Suite, VerifyOptions, VerifyReport};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable capping the worker count; `0` or unset means automatic.
pub const THREADS_ENV: &str = "INFLUENCE_LAB_THREADS";

pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFICATION_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const CAPACITY: i32 = 3;
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed")]
    VerificationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Capacity(_)) => exit::CAPACITY,
            CliError::Core(
                Error::Consistency(_) | Error::Solver(_) | Error::NotUnitary(_) | Error::Layout(_),
            )
            | CliError::VerificationFailed => exit::VERIFICATION_FAILED,
            CliError::Core(_) | CliError::Usage(_) => exit::USAGE,
        }
    }
}

/// Reads [`THREADS_ENV`]: `Ok(None)` for automatic sizing.
pub fn thread_count(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(CliError::Usage(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))),
        },
    }
}
