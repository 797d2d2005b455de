use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numeric failure: {0}")]
    Numeric(#[from] gaugeqed::Error),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 for configuration problems, 3 for numeric failures, 1 for i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Numeric(gaugeqed::Error::InvalidInput(_)) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}
