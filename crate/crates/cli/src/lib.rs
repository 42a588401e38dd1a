//! Command implementations behind the `rabi-aa` binary.
//!
//! Everything the binary does is callable as a library function so the
//! integration tests can exercise the commands without spawning
//! processes. Outputs are deterministic: identical configuration and
//! build produce byte-identical files.

pub mod commands;
pub mod config;
pub mod csvio;

/// Errors surfaced to the binary; mapped to exit code 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Outcome of one command run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunStatus {
    pub rows_written: usize,
    /// Per-row engine failures recorded in the output's error column.
    pub failures: usize,
}

impl RunStatus {
    pub fn exit_code(&self) -> u8 {
        if self.failures > 0 {
            1
        } else {
            0
        }
    }
}
