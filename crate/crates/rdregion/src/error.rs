use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent input file.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] rdregion_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code: 1 for a failed threshold, 2 for bad input or
    /// configuration.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(rdregion_core::Error::InsufficientSamples { .. }) => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
