use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

use chernoff_tradeoff::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("malformed input: {0}")]
    Input(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("{0} verification suite(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Input(_) | CliError::Read { .. } => 2,
            CliError::CrossCheck(_) => 4,
            CliError::Write { .. } => 6,
            CliError::Core(e) => match e {
                CoreError::Numerical(_) => 1,
                CoreError::Support(_) => 3,
                CoreError::OversizedAlphabet { .. }
                | CoreError::GridTooLarge { .. }
                | CoreError::EnumerationCap { .. } => 5,
                _ => 2,
            },
        })
    }
}

pub type CliResult<T> = Result<T, CliError>;
