use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::advtrain::TrainError;
use crate::corpus::CorpusError;
use crate::emoji_data::EmojiError;
use crate::ensemble::EnsembleError;
use crate::evalkit::EvalError;
use crate::textmodel::ModelError;

/// Any failure surfaced by the pipeline or the command-line tool.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: line {line}: {reason}")]
    BadPredictionFile {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("invalid manifest: {0}")]
    Manifest(String),
    #[error("checkpoint {path} has vocabulary {found}, manifest expects {expected}")]
    VocabMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Emoji(#[from] EmojiError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 usage, 2 data, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Train(TrainError::InvalidConfig(_)) => 1,
            Error::Train(TrainError::ZeroGradient | TrainError::NonFiniteGradient(_)) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
