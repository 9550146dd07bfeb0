use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// Bad flags, config or parameters; exit status 2.
    #[error("invalid configuration: {0}")]
    Validation(String),
    /// A computed invariant did not hold; exit status 1.
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Validation(_) => 2,
            RunError::Invariant(_) | RunError::Io { .. } => 1,
        }
    }
}

impl From<fockfield::Error> for RunError {
    fn from(e: fockfield::Error) -> Self {
        RunError::Validation(e.to_string())
    }
}
