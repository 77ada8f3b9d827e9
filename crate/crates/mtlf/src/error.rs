use std::path::PathBuf;

use mtlf_core::forecast::{ForecastError, PipelineError};

use crate::formats::ParseError;

/// Process exit status for each failure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Config = 2,
    Data = 3,
    Numeric = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {field}: {message}")]
    Config { field: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("data: {0}")]
    Data(String),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn exit_kind(&self) -> ExitKind {
        match self {
            CliError::Config { .. } => ExitKind::Config,
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Data(_) => ExitKind::Data,
            CliError::Pipeline(p) => forecast_exit_kind(&p.source),
        }
    }
}

pub fn forecast_exit_kind(e: &ForecastError) -> ExitKind {
    match e {
        ForecastError::SearchSpaceDimension(_) | ForecastError::SchemeTooLarge { .. } => ExitKind::Config,
        ForecastError::Svr(_) | ForecastError::Optimizer(_) => ExitKind::Numeric,
        ForecastError::Mrmr(mtlf_core::mrmr::MrmrError::KOutOfRange { .. }) => ExitKind::Config,
        ForecastError::Data(mtlf_core::data::DataError::InvalidSplit(_))
        | ForecastError::Data(mtlf_core::data::DataError::InvalidLag(_))
        | ForecastError::Data(mtlf_core::data::DataError::EmptyLagSet) => ExitKind::Config,
        _ => ExitKind::Data,
    }
}
