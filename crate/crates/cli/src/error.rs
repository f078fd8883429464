use thiserror::Error;

/// Failures of the command-line front end, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Validation(tlsqle_core::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] tlsqle_core::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{failed} of {total} self-test checks failed")]
    SelfTest { failed: usize, total: usize },
}

impl CliError {
    /// 2 for anything wrong with the invocation or config, 1 for failures
    /// while computing or writing results.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation(_) | CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io { .. } | CliError::SelfTest { .. } => 1,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
