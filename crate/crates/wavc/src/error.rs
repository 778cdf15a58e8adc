use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Missing, unreadable or inconsistent configuration.
    #[error("config error: {0}")]
    Config(String),
    /// Construction, solver or simulation failure.
    #[error("{0}")]
    Runtime(wavc_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    /// More trials failed to generate a jammer state than the configured budget allows.
    #[error("{failures} generation failures exceed the budget of {budget}")]
    FailureBudget { failures: usize, budget: usize },
}

impl Error {
    /// Process exit code: 2 for configuration problems, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            _ => 3,
        }
    }
}

impl From<wavc_core::Error> for Error {
    fn from(e: wavc_core::Error) -> Self {
        Error::Runtime(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
