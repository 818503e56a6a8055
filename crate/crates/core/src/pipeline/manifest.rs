use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ExperimentConfig;
use crate::advtrain::TrainConfig;
use crate::ensemble::ThresholdReport;
use crate::error::{Error, Result};
use crate::evalkit::Scores;

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything a finished cross-validation run produced.
///
/// Artifact paths are relative to the directory holding the manifest and
/// use `/` separators, so a run directory can be moved as a whole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub config: ExperimentConfig,
    pub n_samples: usize,
    pub n_positive: usize,
    /// Preprocessed corpus the folds index into.
    pub corpus: String,
    /// Emoji table used for preprocessing; prediction reuses it.
    pub emoji_table: String,
    /// `id\tfold` assignment.
    pub folds: String,
    /// Sample ids in the order every OOF vector follows.
    pub oof_order: Vec<String>,
    pub variants: Vec<VariantRecord>,
    pub ensemble: EnsembleRecord,
    /// Comparison of the first two ensemble members, when there are two.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub fold: usize,
    pub checkpoint: String,
    pub history: String,
    pub oof: String,
    pub summary: String,
    pub vocab_fingerprint: String,
    pub vocab_size: usize,
    pub train_size: usize,
    pub held_out: usize,
    pub best_epoch: usize,
    pub stopped_epoch: usize,
    pub best_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantRecord {
    pub name: String,
    pub train: TrainConfig,
    pub folds: Vec<FoldRecord>,
    /// Assembled out-of-fold probabilities.
    pub oof: String,
    pub threshold: ThresholdReport,
    /// OOF metrics at the tuned threshold.
    pub metrics: Scores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRecord {
    pub members: Vec<String>,
    pub oof: String,
    pub threshold: ThresholdReport,
    pub metrics: Scores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub a: String,
    pub b: String,
    pub errors_a: usize,
    pub errors_b: usize,
    pub a_wrong_b_right: usize,
    pub b_wrong_a_right: usize,
    pub both_wrong: usize,
    /// `cell\tid` listing of the disagreement cells.
    pub disagreement: String,
    /// Highest-loss samples under the model-level ensemble.
    pub top_losses: String,
}

impl RunManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: Self = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        if manifest.format_version != MANIFEST_VERSION {
            return Err(Error::Manifest(format!(
                "unsupported format_version {}",
                manifest.format_version
            )));
        }
        Ok(manifest)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        super::io::write_string(path, &self.to_json())
    }

    pub fn variant(&self, name: &str) -> Option<&VariantRecord> {
        self.variants.iter().find(|v| v.name == name)
    }

    /// Every artifact path the manifest references.
    pub fn artifacts(&self) -> Vec<&str> {
        let mut out = vec![
            self.corpus.as_str(),
            self.emoji_table.as_str(),
            self.folds.as_str(),
            self.ensemble.oof.as_str(),
        ];
        for v in &self.variants {
            out.push(&v.oof);
            for f in &v.folds {
                out.extend([&*f.checkpoint, &f.history, &f.oof, &f.summary]);
            }
        }
        if let Some(a) = &self.analysis {
            out.extend([a.disagreement.as_str(), a.top_losses.as_str()]);
        }
        out
    }

    /// Checks that every referenced artifact exists under `root`.
    pub fn verify(&self, root: &Path) -> Result<()> {
        for rel in self.artifacts() {
            if !root.join(rel).is_file() {
                return Err(Error::Manifest(format!("missing artifact {rel}")));
            }
        }
        Ok(())
    }
}
