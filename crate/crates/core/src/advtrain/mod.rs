//! Adversarial training: fast-gradient perturbations of the embedded
//! sequence, AdamW and the per-fold training loop with early stopping.

mod config;
mod fgm;
mod optim;
mod train;

use thiserror::Error;

pub use config::TrainConfig;
pub use fgm::{
    adversarial_loss, adversarial_loss_into, adversarial_perturbation, Perturbation,
    MIN_GRADIENT_NORM,
};
pub use optim::{adamw_step, OptimizerState};
pub use train::{
    batch_gradient, encode_dataset, train_fold, EarlyStopping, FoldResult, StopDecision,
};

use crate::corpus::CorpusError;
use crate::textmodel::ModelError;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("gradient with respect to the input is zero; no perturbation direction")]
    ZeroGradient,
    #[error("non-finite gradient in `{0}`")]
    NonFiniteGradient(&'static str),
    #[error("training and validation splits must both be non-empty")]
    EmptySplit,
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}
