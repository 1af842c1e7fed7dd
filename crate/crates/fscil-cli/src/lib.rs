//! File formats and run configuration around `fscil-core`: the embedding
//! dataset text format, CSV/JSON report writers, and synth spec files.

pub mod format;
pub mod report;
pub mod spec_file;

use fscil_core::ValidationReport;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("dataset failed validation")]
    Validation(ValidationReport),
    #[error("{0}")]
    Core(fscil_core::Error),
    #[error("{0}")]
    Config(String),
}

impl From<fscil_core::Error> for CliError {
    fn from(e: fscil_core::Error) -> Self {
        match e {
            fscil_core::Error::InvalidDataset(report) => CliError::Validation(report),
            other => CliError::Core(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
