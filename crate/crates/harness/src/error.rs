use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid provider config: {0}")]
    InvalidConfig(String),
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
    #[error("auth error: environment variable {0} is not set")]
    Auth(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("provider returned unusable payload: {0}")]
    BadPayload(String),
    #[error("missing input for {0}: {1}")]
    MissingInput(&'static str, String),
    #[error(transparent)]
    Dataset(#[from] mazeval_core::dataset::DatasetError),
    #[error(transparent)]
    Report(#[from] mazeval_core::report::ReportError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
