//! The end-to-end experiment: preprocessing, stratified folds, per-variant
//! cross-validated training, fold- and model-level ensembling, threshold
//! tuning and test-time prediction from a run directory.

mod config;
pub mod io;
mod manifest;
mod predict;
mod run;

pub use config::{DataSource, ExperimentConfig, Variant};
pub use manifest::{
    AnalysisRecord, EnsembleRecord, FoldRecord, RunManifest, VariantRecord, MANIFEST_FILE,
    MANIFEST_VERSION,
};
pub use predict::{predict_unlabeled, variant_probs, EnsemblePrediction};
pub use run::{fold_split, fold_vocab, preprocess_dataset, run_cv, train_cv_fold};
