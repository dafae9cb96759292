use conjlab_core::Error;
use thiserror::Error;

/// Process exit status for a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// The analysis ran and came out negative (e.g. a map is not carcass).
    Negative = 1,
    /// Bad input: unparsable values, malformed maps, caps exceeded.
    Invalid = 2,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed map file: {0}")]
    MapFormat(String),
    #[error("invalid value for {flag}: {reason}")]
    Flag { flag: &'static str, reason: String },
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Core(Error::NotCarcass { .. } | Error::NotCarcassWithin(_) | Error::ToleranceNotReached { .. }) => {
                ExitStatus::Negative
            }
            _ => ExitStatus::Invalid,
        }
    }
}
