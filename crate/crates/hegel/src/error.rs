use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Binary or JSON artifact with a bad field.
    #[error("{}: bad {field}: {message}", path.display())]
    Format {
        path: PathBuf,
        field: &'static str,
        message: String,
    },

    /// An upstream artifact is absent; the message names the step to run.
    #[error("{0}")]
    Missing(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] hegel_core::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(
        path: impl Into<PathBuf>,
        field: &'static str,
        message: impl Into<String>,
    ) -> Self {
        Error::Format {
            path: path.into(),
            field,
            message: message.into(),
        }
    }

    /// 1 usage, 2 data, 3 numeric.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Usage(_) => 1,
            Error::Core(hegel_core::Error::NonFinite { .. }) => 3,
            _ => 2,
        }
    }
}
