use std::path::Path;

use super::manifest::RunManifest;
use super::run::preprocess_dataset;
use crate::corpus::{Dataset, Label};
use crate::emoji_data::load_emoji_table;
use crate::ensemble::{apply_threshold, fold_average, mean_of, PredictionMatrix};
use crate::error::{Error, Result};
use crate::textmodel::{load_checkpoint, predict_probs};

/// Ensemble probabilities and thresholded labels for unlabeled data.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsemblePrediction {
    pub ids: Vec<String>,
    pub probs: Vec<f64>,
    pub threshold: f64,
    pub labels: Vec<Label>,
}

/// Fold-averaged probabilities of one variant's checkpoints on `data`,
/// which must already be preprocessed.
pub fn variant_probs(manifest: &RunManifest, root: &Path, variant: &str, data: &Dataset) -> Result<Vec<f64>> {
    let record = manifest
        .variant(variant)
        .ok_or_else(|| Error::Manifest(format!("no variant named {variant:?}")))?;
    let mut runs = PredictionMatrix::new(data.ids());
    for fold in &record.folds {
        let path = root.join(&fold.checkpoint);
        let (params, vocab) = load_checkpoint(&path)?;
        let found = vocab.fingerprint();
        if found != fold.vocab_fingerprint {
            return Err(Error::VocabMismatch {
                path,
                expected: fold.vocab_fingerprint.clone(),
                found,
            });
        }
        let max_len = params.hyper.max_len;
        let encoded: Vec<Vec<usize>> = data
            .items()
            .iter()
            .map(|t| vocab.encode(&t.text, max_len))
            .collect();
        runs.add_run(&format!("fold{}", fold.fold), predict_probs(&params, &encoded)?)?;
    }
    Ok(fold_average(&runs)?)
}

/// Averages every fold checkpoint per ensemble member, then across members,
/// and applies the run's tuned ensemble threshold.
///
/// Texts are normalized with the run's emoji table first; already
/// normalized text passes through unchanged.
pub fn predict_unlabeled(manifest: &RunManifest, root: &Path, data: &Dataset) -> Result<EnsemblePrediction> {
    let table = load_emoji_table(root.join(&manifest.emoji_table))?;
    let data = preprocess_dataset(data, &table)?;
    let per_member = manifest
        .ensemble
        .members
        .iter()
        .map(|m| variant_probs(manifest, root, m, &data))
        .collect::<Result<Vec<_>>>()?;
    let probs = mean_of(&per_member)?;
    let threshold = manifest.ensemble.threshold.threshold;
    Ok(EnsemblePrediction {
        ids: data.ids(),
        labels: apply_threshold(&probs, threshold),
        probs,
        threshold,
    })
}
