use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("unsupported modulation order {0} (expected a perfect square >= 4)")]
    UnsupportedOrder(usize),

    #[error("forward cache does not match the current parameters")]
    StaleCache,

    #[error("training diverged at iteration {iteration}: loss = {loss}")]
    Divergence { iteration: usize, loss: f64 },

    #[error("malformed parameter file (line {line}): {msg}")]
    MalformedFile { line: usize, msg: String },

    #[error("unsupported parameter file version `{0}`")]
    Version(String),

    #[error("inconsistent parameter shapes: {0}")]
    Shape(String),

    #[error("config parse error at line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },

    #[error("invalid value for `{key}`: {msg}")]
    ConfigValue { key: String, msg: String },

    #[error("detector/model mismatch: {0}")]
    ModelMismatch(String),

    #[error("CSV schema violation in {path}: {msg}")]
    Schema { path: PathBuf, msg: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
