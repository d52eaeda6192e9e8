use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {message}")]
    Parse { message: String },
    #[error("parse error: unrecognized token {token:?}: {message}")]
    Token { token: String, message: String },
    #[error("invalid {field}: {constraint}")]
    Validation { field: String, constraint: String },
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization error: {0}")]
    Serialize(String),
    #[error(transparent)]
    Core(#[from] confspec::Error),
}

impl CliError {
    pub fn validation(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            constraint: constraint.into(),
        }
    }

    pub fn token(token: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Token {
            token: token.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } | CliError::Token { .. } => "ParseError",
            CliError::Validation { .. } => "ValidationError",
            CliError::Io { .. } => "IoError",
            CliError::Serialize(_) => "SerializeError",
            CliError::Core(e) => e.kind(),
        }
    }

    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Token { .. } | CliError::Validation { .. } => exit::USAGE,
            CliError::Io { .. } | CliError::Serialize(_) => exit::IO,
            CliError::Core(_) => exit::NUMERICAL,
        }
    }

    /// One-line, machine-parsable form: `error kind=<kind> message=<json string>`.
    pub fn line(&self) -> String {
        format!(
            "error kind={} message={}",
            self.kind(),
            serde_json::to_string(&self.to_string()).unwrap_or_else(|_| "\"?\"".into())
        )
    }
}

pub mod exit {
    pub const OK: i32 = 0;
    /// An inequality that must hold at the discrete level failed.
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const IO: i32 = 4;
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
