use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::advtrain::TrainConfig;
use crate::corpus::{load_tsv, synth_corpus, Dataset};
use crate::emoji_data::{load_emoji_table, shipped_table};
use crate::error::{Error, Result};
use crate::preprocess::EmojiTable;

/// Where the labeled experiment data comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// Labeled TSV files, concatenated in order.
    Files(Vec<PathBuf>),
    Synthetic {
        n: usize,
        positive_rate: f64,
        noise_rate: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub name: String,
    #[serde(default)]
    pub train: TrainConfig,
}

fn default_k() -> usize {
    5
}

fn default_true() -> bool {
    true
}

fn default_jobs() -> usize {
    1
}

fn default_variants() -> Vec<Variant> {
    vec![
        Variant {
            name: "plain".into(),
            train: TrainConfig::default(),
        },
        Variant {
            name: "adv".into(),
            train: TrainConfig::adversarial(1.0),
        },
    ]
}

/// One cross-validation experiment.
///
/// `output_dir` and `jobs` describe where and how a run executes, not what
/// it computes, so neither is recorded in the manifest snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataSource,
    /// Emoji table file; the shipped table when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emoji_table: Option<PathBuf>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub fold_seed: u64,
    #[serde(default = "default_variants")]
    pub variants: Vec<Variant>,
    /// Variants averaged into the model-level ensemble. When absent, the
    /// first two variants; further variants are trained and reported but
    /// only averaged in when listed here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<Vec<String>>,
    /// Reuse completed folds found in the output directory.
    #[serde(default = "default_true")]
    pub resume: bool,
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads for fold training.
    #[serde(default = "default_jobs", skip_serializing)]
    pub jobs: usize,
}

impl ExperimentConfig {
    /// Defaults on the given data: k = 5, a plain and an
    /// adversarial (ε = 1) variant.
    pub fn new(data: DataSource) -> Self {
        Self {
            data,
            emoji_table: None,
            k: default_k(),
            fold_seed: 0,
            variants: default_variants(),
            ensemble: None,
            resume: true,
            output_dir: None,
            jobs: 1,
        }
    }

    /// Reads a JSON config. Relative data and emoji paths are resolved
    /// against the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let DataSource::Files(files) = &mut cfg.data {
            files.iter_mut().for_each(resolve);
        }
        if let Some(p) = &mut cfg.emoji_table {
            resolve(p);
        }
        if let Some(p) = &mut cfg.output_dir {
            resolve(p);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.k < 2 {
            return bad(format!("k must be at least 2, got {}", self.k));
        }
        if self.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        if self.variants.is_empty() {
            return bad("at least one variant is required".into());
        }
        let mut names = HashSet::new();
        for v in &self.variants {
            if !is_valid_variant_name(&v.name) {
                return bad(format!("variant name {:?} must match [A-Za-z0-9_-]+", v.name));
            }
            if !names.insert(v.name.as_str()) {
                return bad(format!("duplicate variant name {:?}", v.name));
            }
            v.train
                .validate()
                .map_err(|e| Error::Config(format!("variant {}: {e}", v.name)))?;
        }
        if let Some(members) = &self.ensemble {
            if members.is_empty() {
                return bad("ensemble must name at least one variant".into());
            }
            let mut seen = HashSet::new();
            for m in members {
                if !names.contains(m.as_str()) {
                    return bad(format!("ensemble member {m:?} is not a variant"));
                }
                if !seen.insert(m.as_str()) {
                    return bad(format!("ensemble member {m:?} listed twice"));
                }
            }
        }
        if let DataSource::Synthetic {
            n,
            positive_rate,
            noise_rate,
            ..
        } = self.data
        {
            if n < self.k {
                return bad(format!("synthetic n = {n} is smaller than k"));
            }
            if !(positive_rate > 0.0 && positive_rate < 1.0) {
                return bad("positive_rate must be in (0, 1)".into());
            }
            if !(0.0..0.5).contains(&noise_rate) {
                return bad("noise_rate must be in [0, 0.5)".into());
            }
        }
        if let DataSource::Files(files) = &self.data {
            if files.is_empty() {
                return bad("no data files given".into());
            }
        }
        Ok(())
    }

    /// Names of the variants in the model-level ensemble.
    pub fn ensemble_members(&self) -> Vec<String> {
        match &self.ensemble {
            Some(members) => members.clone(),
            None => self.variants.iter().take(2).map(|v| v.name.clone()).collect(),
        }
    }

    /// The raw (not yet preprocessed) labeled dataset.
    pub fn load_data(&self) -> Result<Dataset> {
        match &self.data {
            DataSource::Files(files) => {
                let mut data: Option<Dataset> = None;
                for f in files {
                    let next = load_tsv(f, true)?;
                    data = Some(match data {
                        None => next,
                        Some(d) => d.concat(next)?,
                    });
                }
                data.ok_or_else(|| Error::Config("no data files given".into()))
            }
            &DataSource::Synthetic {
                n,
                positive_rate,
                noise_rate,
                seed,
            } => Ok(synth_corpus(n, positive_rate, noise_rate, seed)),
        }
    }

    pub fn load_emoji_table(&self) -> Result<EmojiTable> {
        match &self.emoji_table {
            Some(p) => Ok(load_emoji_table(p)?),
            None => Ok(shipped_table()),
        }
    }

    /// The config as recorded in a manifest.
    pub fn snapshot(&self) -> Self {
        Self {
            output_dir: None,
            jobs: 1,
            ..self.clone()
        }
    }
}

fn is_valid_variant_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}
