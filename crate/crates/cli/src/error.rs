use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: flags, config file, expressions, points.
    #[error("{0}")]
    Config(String),
    /// A required input is absent; the usage line is printed after it.
    #[error("missing {0}")]
    Missing(&'static str),
    /// A computation failed its own integrity check or did not converge.
    #[error("{0}")]
    Compute(String),
    /// Everything ran, but the physics target was missed.
    #[error("{0}")]
    Verdict(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn io(e: impl std::fmt::Display) -> CliError {
        CliError::Io(e.to_string())
    }

    pub fn config(e: impl std::fmt::Display) -> CliError {
        CliError::Config(e.to_string())
    }

    pub fn compute(e: impl std::fmt::Display) -> CliError {
        CliError::Compute(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Missing(_) | CliError::Io(_) => 1,
            CliError::Compute(_) => 2,
            CliError::Verdict(_) => 3,
        }
    }
}
