use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ddsim_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("output: {0}")]
    Format(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;
