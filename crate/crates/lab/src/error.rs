use thiserror::Error;

/// Errors that stop a run before a verdict; all map to exit code 2.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Fixture {
        path: String,
        source: crate::format::ParseError,
    },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}
