//! CLI failure modes and their process exit codes.

use searchlight_core::Error as CoreError;

/// Everything the runner can fail with, bucketed by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad scenario file or inconsistent request — exit 2.
    #[error("{0}")]
    Validation(String),
    /// A numeric routine failed to converge — exit 3.
    #[error("{0}")]
    NonConvergence(String),
    /// Mean time diverges and `--allow-divergent` was not given — exit 4.
    #[error("{0}")]
    Divergent(String),
    /// Filesystem trouble while reading scenarios or writing outputs — exit 1.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// A registered self-check failed during the `examples` suite — exit 1.
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Divergent(_) => 4,
            CliError::Io(_) | CliError::CheckFailed(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::NoConvergence { .. } => CliError::NonConvergence(err.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_contract() {
        assert_eq!(CliError::Validation("x".into()).exit_code(), 2);
        assert_eq!(CliError::NonConvergence("x".into()).exit_code(), 3);
        assert_eq!(CliError::Divergent("x".into()).exit_code(), 4);
    }

    #[test]
    fn core_errors_map_onto_buckets() {
        let err: CliError = CoreError::InvalidArgument("bad".into()).into();
        assert_eq!(err.exit_code(), 2);
    }
}
