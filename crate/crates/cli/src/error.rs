use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {reason}")]
    Input { path: String, reason: String },

    #[error("report was produced for instance {report} but the given instance hashes to {actual}")]
    HashMismatch { report: String, actual: String },

    #[error(transparent)]
    Solver(#[from] atsp_core::Error),

    #[error("{failed} of {total} checks failed")]
    VerifyFailed { failed: usize, total: usize },

    #[error("write failed: {0}")]
    Output(String),
}

impl CliError {
    /// 2 for anything the caller got wrong, 1 for failures during the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } | CliError::HashMismatch { .. } => 2,
            CliError::Solver(_) | CliError::VerifyFailed { .. } | CliError::Output(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
