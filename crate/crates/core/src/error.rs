use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid angle: {0} is not finite")]
    InvalidAngle(f64),

    #[error("invalid concentration: {0} (must be finite and >= 0)")]
    InvalidConcentration(f64),

    #[error("sample is empty")]
    EmptySample,

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("singular local design at theta={theta:.6}, nu={nu}")]
    SingularDesign { theta: f64, nu: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unknown scenario '{name}' (valid: {})", valid.join(", "))]
    UnknownScenario { name: String, valid: Vec<String> },

    #[error("schema error in {path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("no usable rows in {0}")]
    EmptyData(PathBuf),

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("scenario registry: {0}")]
    Registry(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
