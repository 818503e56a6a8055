//! Positive-class metrics, per-sample loss ranking and cross-ensemble
//! disagreement analysis. `Informative` is the positive class.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Label;
use crate::textmodel::bce_loss;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("cannot evaluate an empty prediction set")]
    Empty,
}

fn check_lengths(left: usize, right: usize) -> Result<(), EvalError> {
    if left != right {
        return Err(EvalError::LengthMismatch { left, right });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn from_labels(pred: &[Label], gold: &[Label]) -> Result<Self, EvalError> {
        check_lengths(pred.len(), gold.len())?;
        let mut c = Self::default();
        for (&p, &g) in pred.iter().zip(gold) {
            match (p.is_positive(), g.is_positive()) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Precision, recall and F1; any zero denominator yields 0.
    pub fn scores(&self) -> Scores {
        let ratio = |num: f64, den: f64| if den == 0.0 { 0.0 } else { num / den };
        let tp = self.tp as f64;
        let precision = ratio(tp, tp + self.fp as f64);
        let recall = ratio(tp, tp + self.fn_ as f64);
        let f1 = ratio(2.0 * precision * recall, precision + recall);
        Scores {
            precision,
            recall,
            f1,
            counts: *self,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub counts: ConfusionCounts,
}

impl Scores {
    /// Fixed-order report: `tp fp fn tn precision recall f1`, one per line.
    pub fn report(&self) -> String {
        let c = self.counts;
        format!(
            "tp\t{}\nfp\t{}\nfn\t{}\ntn\t{}\nprecision\t{:.6}\nrecall\t{:.6}\nf1\t{:.6}\n",
            c.tp, c.fp, c.fn_, c.tn, self.precision, self.recall, self.f1
        )
    }
}

pub fn precision_recall_f1(pred: &[Label], gold: &[Label]) -> Result<Scores, EvalError> {
    if pred.is_empty() && gold.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(ConfusionCounts::from_labels(pred, gold)?.scores())
}

/// Clamped binary cross-entropy of each prediction against its gold label.
pub fn per_sample_bce(probs: &[f64], gold: &[Label]) -> Result<Vec<f64>, EvalError> {
    check_lengths(probs.len(), gold.len())?;
    Ok(probs.iter().zip(gold).map(|(&p, &g)| bce_loss(p, g)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedLoss {
    pub id: String,
    pub loss: f64,
    pub gold: Label,
    pub prob: f64,
}

/// The `k` highest-loss samples, descending; equal losses order by id.
pub fn top_k_losses(
    probs: &[f64],
    gold: &[Label],
    ids: &[String],
    k: usize,
) -> Result<Vec<RankedLoss>, EvalError> {
    check_lengths(ids.len(), probs.len())?;
    let losses = per_sample_bce(probs, gold)?;
    let mut ranked: Vec<RankedLoss> = ids
        .iter()
        .zip(losses)
        .zip(probs.iter().zip(gold))
        .map(|((id, loss), (&prob, &gold))| RankedLoss {
            id: id.clone(),
            loss,
            gold,
            prob,
        })
        .collect();
    ranked.sort_by(|a, b| b.loss.total_cmp(&a.loss).then_with(|| a.id.cmp(&b.id)));
    ranked.truncate(k);
    Ok(ranked)
}

pub fn top_k_tsv(ranked: &[RankedLoss]) -> String {
    let mut out = String::from("id\tloss\tgold\tprob\n");
    for r in ranked {
        let _ = writeln!(out, "{}\t{:.6}\t{}\t{:.6}", r.id, r.loss, r.gold, r.prob);
    }
    out
}

/// Which samples one ensemble gets wrong and the other gets right.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisagreementReport {
    pub errors_a: usize,
    pub errors_b: usize,
    pub a_wrong_b_right: usize,
    pub b_wrong_a_right: usize,
    pub both_wrong: usize,
    pub ids_a_wrong_b_right: Vec<String>,
    pub ids_b_wrong_a_right: Vec<String>,
    pub ids_both_wrong: Vec<String>,
}

impl DisagreementReport {
    pub fn summary(&self, name_a: &str, name_b: &str) -> String {
        format!(
            "{name_a} misclassified {} samples; {name_b} misclassified {}.\n\
             {} of the {name_a} errors were predicted correctly by {name_b}.\n\
             {} of the {name_b} errors were predicted correctly by {name_a}.\n\
             {} samples were misclassified by both.\n",
            self.errors_a, self.errors_b, self.a_wrong_b_right, self.b_wrong_a_right, self.both_wrong
        )
    }

    /// `cell\tid` rows, one per sample in a disagreement or shared-error cell.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("cell\tid\n");
        let cells = [
            ("a_wrong_b_right", &self.ids_a_wrong_b_right),
            ("b_wrong_a_right", &self.ids_b_wrong_a_right),
            ("both_wrong", &self.ids_both_wrong),
        ];
        for (cell, ids) in cells {
            for id in ids {
                let _ = writeln!(out, "{cell}\t{id}");
            }
        }
        out
    }
}

pub fn disagreement(
    pred_a: &[Label],
    pred_b: &[Label],
    gold: &[Label],
    ids: &[String],
) -> Result<DisagreementReport, EvalError> {
    check_lengths(pred_a.len(), gold.len())?;
    check_lengths(pred_b.len(), gold.len())?;
    check_lengths(ids.len(), gold.len())?;
    let mut r = DisagreementReport::default();
    for i in 0..gold.len() {
        let a_wrong = pred_a[i] != gold[i];
        let b_wrong = pred_b[i] != gold[i];
        r.errors_a += usize::from(a_wrong);
        r.errors_b += usize::from(b_wrong);
        match (a_wrong, b_wrong) {
            (true, false) => r.ids_a_wrong_b_right.push(ids[i].clone()),
            (false, true) => r.ids_b_wrong_a_right.push(ids[i].clone()),
            (true, true) => r.ids_both_wrong.push(ids[i].clone()),
            (false, false) => {}
        }
    }
    r.a_wrong_b_right = r.ids_a_wrong_b_right.len();
    r.b_wrong_a_right = r.ids_b_wrong_a_right.len();
    r.both_wrong = r.ids_both_wrong.len();
    Ok(r)
}
