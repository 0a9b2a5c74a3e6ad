//! Error taxonomy mapped onto process exit codes: 2 for bad invocations,
//! 3 when an iteration failed to converge, 4 for anything wrong with the
//! data or the filesystem.

use std::process::ExitCode;

use qrc_core::algorithms::AlgorithmError;
use qrc_core::evaluation::EvalError;
use qrc_core::ingestion::IngestError;
use qrc_core::network::NetworkError;
use qrc_core::simulator::SimError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::NonConvergence(_) => ExitCode::from(3),
            CliError::Data(_) => ExitCode::from(4),
        }
    }

    /// Attach a file path to an I/O failure so the message names the culprit.
    pub fn io(context: &str, err: std::io::Error) -> Self {
        CliError::Data(format!("{context}: {err}"))
    }
}

impl From<IngestError> for CliError {
    fn from(err: IngestError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<NetworkError> for CliError {
    fn from(err: NetworkError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(err: SimError) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(err: EvalError) -> Self {
        CliError::Data(err.to_string())
    }
}

impl From<AlgorithmError> for CliError {
    fn from(err: AlgorithmError) -> Self {
        match err {
            // Out-of-range parameters come straight from flags.
            AlgorithmError::ParameterOutOfRange { .. } => CliError::Usage(err.to_string()),
            _ => CliError::Data(err.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Data(err.to_string())
    }
}
