use thiserror::Error;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error(transparent)]
    Core(#[from] specasym_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }

    /// Short machine-readable class of the failure.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config { .. } | CliError::Io { .. } => "config",
            CliError::Core(e) if e.is_numerical() => "numerical",
            CliError::Core(_) => "config",
        }
    }
}
