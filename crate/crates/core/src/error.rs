use thiserror::Error;

/// Error type shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad arguments, inadmissible configurations, violated preconditions.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numerical procedure failed to converge or produced an unusable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// File I/O failures, surfaced verbatim.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Config parsing / schema violations.
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code per the documented contract: 2 config, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Config(_) => 2,
            Error::Numerical(_) => 3,
            Error::Io(_) => 4,
        }
    }
}
