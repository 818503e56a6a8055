//! Informative-tweet classification with adversarially trained attention
//! models, k-fold ensembling and out-of-fold threshold tuning.
//!
//! The modules build on each other bottom-up:
//!
//! - [`corpus`]: TSV datasets, labels, stratified folds, synthetic corpora
//! - [`preprocess`] and [`emoji_data`]: tweet normalization
//! - [`textmodel`]: vocabulary, the attention classifier, checkpoints
//! - [`advtrain`]: FGM perturbations, AdamW, the per-fold training loop
//! - [`ensemble`] and [`evalkit`]: averaging, thresholds, metrics, analysis
//! - [`pipeline`]: cross-validation runs and prediction from a manifest

pub mod advtrain;
pub mod corpus;
pub mod emoji_data;
pub mod ensemble;
mod error;
pub mod evalkit;
pub mod matrix;
pub mod pipeline;
pub mod preprocess;
pub mod textmodel;

pub use error::{Error, Result};
