use std::fmt;
use std::path::Path;

/// Tool-level failure, carrying the exit-code contract:
/// 1 verification failure, 2 configuration error, 3 I/O error.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> CliError {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
            CliError::VerifyFailed => write!(f, "verification failed"),
        }
    }
}

impl std::error::Error for CliError {}
