//! Probability averaging across folds and across model variants, and
//! decision-threshold search on out-of-fold predictions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Label;
use crate::evalkit::ConfusionCounts;

#[derive(Debug, Error, PartialEq)]
pub enum EnsembleError {
    #[error("prediction runs disagree on sample ids")]
    MisalignedIds,
    #[error("duplicate run label `{0}`")]
    DuplicateRun(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("nothing to ensemble")]
    Empty,
    #[error("gold labels contain no positive examples")]
    SingleClassLabels,
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
}

/// Probabilities from several labelled runs over the same ordered samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionMatrix {
    ids: Vec<String>,
    runs: Vec<(String, Vec<f64>)>,
}

impl PredictionMatrix {
    pub fn new(ids: Vec<String>) -> Self {
        Self {
            ids,
            runs: Vec::new(),
        }
    }

    pub fn add_run(&mut self, label: &str, probs: Vec<f64>) -> Result<(), EnsembleError> {
        if probs.len() != self.ids.len() {
            return Err(EnsembleError::LengthMismatch {
                left: self.ids.len(),
                right: probs.len(),
            });
        }
        if self.runs.iter().any(|(l, _)| l == label) {
            return Err(EnsembleError::DuplicateRun(label.to_string()));
        }
        check_probs(&probs)?;
        self.runs.push((label.to_string(), probs));
        Ok(())
    }

    /// Adds a run given as `(id, prob)` pairs, which must match the ids in order.
    pub fn add_keyed_run(&mut self, label: &str, rows: &[(String, f64)]) -> Result<(), EnsembleError> {
        if rows.len() != self.ids.len() || rows.iter().zip(&self.ids).any(|((a, _), b)| a != b) {
            return Err(EnsembleError::MisalignedIds);
        }
        self.add_run(label, rows.iter().map(|(_, p)| *p).collect())
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn run_labels(&self) -> impl Iterator<Item = &str> {
        self.runs.iter().map(|(l, _)| l.as_str())
    }

    pub fn run(&self, label: &str) -> Option<&[f64]> {
        self.runs.iter().find(|(l, _)| l == label).map(|(_, p)| p.as_slice())
    }

    pub fn num_runs(&self) -> usize {
        self.runs.len()
    }

    pub fn mean(&self) -> Result<Vec<f64>, EnsembleError> {
        let runs: Vec<&[f64]> = self.runs.iter().map(|(_, p)| p.as_slice()).collect();
        mean_of(&runs)
    }
}

fn check_probs(probs: &[f64]) -> Result<(), EnsembleError> {
    match probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        Some(&p) => Err(EnsembleError::InvalidProbability(p)),
        None => Ok(()),
    }
}

/// Elementwise arithmetic mean of equally long probability vectors.
pub fn mean_of<R: AsRef<[f64]>>(runs: &[R]) -> Result<Vec<f64>, EnsembleError> {
    let first = runs.first().ok_or(EnsembleError::Empty)?.as_ref();
    for run in runs {
        let run = run.as_ref();
        if run.len() != first.len() {
            return Err(EnsembleError::LengthMismatch {
                left: first.len(),
                right: run.len(),
            });
        }
        check_probs(run)?;
    }
    let n = runs.len() as f64;
    Ok((0..first.len())
        .map(|i| runs.iter().map(|r| r.as_ref()[i]).sum::<f64>() / n)
        .collect())
}

/// Mean over the fold runs of one variant.
pub fn fold_average(runs: &PredictionMatrix) -> Result<Vec<f64>, EnsembleError> {
    runs.mean()
}

/// Equal-weight mean of two variants' probabilities.
pub fn model_average(a: &[f64], b: &[f64]) -> Result<Vec<f64>, EnsembleError> {
    if a.len() != b.len() {
        return Err(EnsembleError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    check_probs(a)?;
    check_probs(b)?;
    Ok(a.iter().zip(b).map(|(x, y)| (x + y) / 2.0).collect())
}

/// Positive iff `p >= threshold`.
pub fn apply_threshold(probs: &[f64], threshold: f64) -> Vec<Label> {
    probs
        .iter()
        .map(|&p| Label::from_positive(p >= threshold))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub threshold: f64,
    pub f1_at_threshold: f64,
    pub candidates_examined: usize,
}

/// Candidate thresholds: 0, 1 and the midpoint between each pair of
/// consecutive distinct probabilities, ascending and deduplicated.
pub fn threshold_candidates(probs: &[f64]) -> Vec<f64> {
    let mut sorted = probs.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut out = vec![0.0];
    for w in sorted.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = a + (b - a) / 2.0;
        // adjacent floats have no midpoint strictly above `a`
        out.push(if mid > a { mid } else { b });
    }
    out.push(1.0);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// The threshold maximizing positive-class F1 on `gold`; ties go to the
/// smallest threshold.
pub fn optimize_threshold(probs: &[f64], gold: &[Label]) -> Result<ThresholdReport, EnsembleError> {
    if probs.len() != gold.len() {
        return Err(EnsembleError::LengthMismatch {
            left: probs.len(),
            right: gold.len(),
        });
    }
    if probs.is_empty() {
        return Err(EnsembleError::Empty);
    }
    check_probs(probs)?;
    if !gold.iter().any(|g| g.is_positive()) {
        return Err(EnsembleError::SingleClassLabels);
    }

    // Sweep candidates in ascending order over probabilities sorted
    // descending; everything at or above the threshold is positive.
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&i, &j| probs[j].total_cmp(&probs[i]));
    let positives = gold.iter().filter(|g| g.is_positive()).count();
    let candidates = threshold_candidates(probs);

    let mut best: Option<(f64, f64)> = None;
    let mut taken = order.len();
    let mut tp = positives;
    for &theta in &candidates {
        while taken > 0 && probs[order[taken - 1]] < theta {
            taken -= 1;
            if gold[order[taken]].is_positive() {
                tp -= 1;
            }
        }
        let counts = ConfusionCounts {
            tp,
            fp: taken - tp,
            fn_: positives - tp,
            tn: probs.len() - taken - (positives - tp),
        };
        let f1 = counts.scores().f1;
        if best.is_none_or(|(_, b)| f1 > b) {
            best = Some((theta, f1));
        }
    }
    let (threshold, f1_at_threshold) = best.expect("candidate list is never empty");
    Ok(ThresholdReport {
        threshold,
        f1_at_threshold,
        candidates_examined: candidates.len(),
    })
}
