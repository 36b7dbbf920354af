use std::fmt;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or usage, with the offending field (exit 2).
    Config { field: String, msg: String },
    /// A numerical operation failed, with the operation named (exit 3).
    Numeric { op: &'static str, source: rbel::Error },
    /// I/O and everything else (exit 1).
    Other(anyhow::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, msg: impl fmt::Display) -> Self {
        CliError::Config { field: field.into(), msg: msg.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numeric { .. } => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, msg } if field.is_empty() => write!(f, "config error: {msg}"),
            CliError::Config { field, msg } => write!(f, "config error at {field}: {msg}"),
            CliError::Numeric { op, source } => write!(f, "numeric failure in {op}: {source}"),
            CliError::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Other(e)
    }
}

/// Maps a library error from `op` to a numeric failure.
pub fn numeric(op: &'static str) -> impl FnOnce(rbel::Error) -> CliError {
    move |source| CliError::Numeric { op, source }
}

/// Maps a library error while building `field` to a config error.
pub fn invalid(field: &str) -> impl FnOnce(rbel::Error) -> CliError + '_ {
    move |e| CliError::config(field, e)
}

pub type CliResult<T> = std::result::Result<T, CliError>;
