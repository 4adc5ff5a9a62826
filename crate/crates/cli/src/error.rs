//! CLI failure modes and their exit codes.

use thiserror::Error;

/// Everything the binary can fail with. Configuration problems exit with
/// code 2, execution problems with code 3; both print one line to stderr.
#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration is malformed or semantically invalid. `field`
    /// names the offending key (a dotted path for nested blocks), or
    /// "config" when the problem is not tied to one key.
    #[error("config error (\"{field}\"): {message}")]
    Config { field: String, message: String },
    /// A valid configuration failed during execution: engine abort,
    /// refused algorithm/game pairing, or an artifact could not be
    /// written.
    #[error("runtime error: {message}")]
    Runtime { message: String },
}

impl CliError {
    pub const EXIT_CONFIG: i32 = 2;
    pub const EXIT_RUNTIME: i32 = 3;

    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config { field: field.to_string(), message: message.into() }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError::Runtime { message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => Self::EXIT_CONFIG,
            CliError::Runtime { .. } => Self::EXIT_RUNTIME,
        }
    }
}

impl From<fp_lab_core::engine::EngineError> for CliError {
    fn from(e: fp_lab_core::engine::EngineError) -> Self {
        CliError::runtime(e.to_string())
    }
}

impl From<fp_lab_core::distributed::DistributedError> for CliError {
    fn from(e: fp_lab_core::distributed::DistributedError) -> Self {
        CliError::runtime(e.to_string())
    }
}

impl From<fp_lab_core::asynchrony::AsyncError> for CliError {
    fn from(e: fp_lab_core::asynchrony::AsyncError) -> Self {
        CliError::runtime(e.to_string())
    }
}

impl From<fp_lab_core::game::GameError> for CliError {
    fn from(e: fp_lab_core::game::GameError) -> Self {
        CliError::runtime(e.to_string())
    }
}
