use std::path::PathBuf;

/// Errors raised by the synthesis, annotation and evaluation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A dataset or CLI configuration is inconsistent.
    #[error("config error: {0}")]
    Config(String),

    /// A required field is absent from an input record.
    #[error("schema error: missing field `{field}`{}", context.as_ref().map(|c| format!(" ({c})")).unwrap_or_default())]
    MissingField {
        field: &'static str,
        context: Option<String>,
    },

    /// A text input line could not be parsed.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Input files reference each other inconsistently.
    #[error("input error: {0}")]
    Input(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("png encoding failed: {0}")]
    Png(String),

    #[error("csv error in {path}: {message}")]
    Csv { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
