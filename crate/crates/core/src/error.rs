use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid input: {0}")]
    Domain(String),

    #[error("cluster {0} is not a node of the trellis")]
    MissingNode(String),

    #[error("search exhausted: no finite-cost hierarchy is representable in the trellis")]
    SearchExhausted,

    #[error("search did not reach a goal within {0} iterations")]
    IterationCap(u64),

    #[error("objective mismatch: {0}")]
    ObjectiveMismatch(String),

    #[error("malformed {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Parse {
            what,
            detail: detail.into(),
        }
    }

    /// Stable numeric code per error class, shared by the CLI exit status and
    /// the C interface.
    pub fn code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 3,
            Error::Io { .. } => 4,
            Error::Capacity(_) => 5,
            Error::Domain(_) => 6,
            Error::ObjectiveMismatch(_) => 7,
            Error::SearchExhausted => 8,
            Error::IterationCap(_) => 9,
            Error::MissingNode(_) => 10,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
