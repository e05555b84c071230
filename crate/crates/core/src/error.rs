use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("requested derivative of order {requested} exceeds jet order {order}")]
    OutOfOrder { requested: usize, order: usize },

    #[error("singular jet: |constant term| = {0:e} is below the division/log floor")]
    SingularJet(f64),

    #[error("point outside chart domain: {0}")]
    Domain(String),

    #[error("invalid metric: {0}")]
    MetricValidity(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("frame is not orthonormal: {0}")]
    Frame(String),

    #[error("rank deficient map: {0}")]
    Rank(String),

    #[error("top singular value is not simple: {0}")]
    Multiplicity(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("holomorphy violation: {0}")]
    Holomorphy(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for errors that describe a bad scenario rather than a failed check.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Parse { .. } | Error::Holomorphy(_) | Error::Io(_) | Error::Json(_)
        )
    }
}
