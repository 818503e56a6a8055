use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fgm::{adversarial_loss_into, adversarial_perturbation};
use super::optim::{adamw_step, OptimizerState};
use super::{TrainConfig, TrainError};
use crate::corpus::{Dataset, Label};
use crate::ensemble::apply_threshold;
use crate::evalkit::precision_recall_f1;
use crate::textmodel::{
    backward_into, forward, predict_probs, ModelHyper, ModelParams, ParamArrays, Vocab,
};

/// Patience-based early stopping on a metric that should increase.
///
/// An epoch counts as an improvement only when it beats the best value so
/// far by strictly more than `tolerance`.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    tolerance: f64,
    best: Option<f64>,
    best_epoch: usize,
    stale: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopDecision {
    pub improved: bool,
    pub stop: bool,
}

impl EarlyStopping {
    pub fn new(patience: usize, tolerance: f64) -> Self {
        Self {
            patience,
            tolerance,
            best: None,
            best_epoch: 0,
            stale: 0,
        }
    }

    /// Records the metric for `epoch` (1-based).
    pub fn update(&mut self, epoch: usize, metric: f64) -> StopDecision {
        let improved = match self.best {
            None => true,
            Some(best) => metric > best + self.tolerance,
        };
        if improved {
            self.best = Some(metric);
            self.best_epoch = epoch;
            self.stale = 0;
        } else {
            self.stale += 1;
        }
        StopDecision {
            improved,
            stop: self.stale >= self.patience && !improved,
        }
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }

    pub fn best(&self) -> Option<f64> {
        self.best
    }
}

/// Outcome of training on one fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    /// Parameters from the best epoch.
    pub params: ModelParams,
    pub vocab: Vocab,
    /// Validation F1 at threshold 0.5 after each completed epoch.
    pub history: Vec<f64>,
    pub best_epoch: usize,
    pub stopped_epoch: usize,
    /// Best-epoch probabilities for the validation items, in their order.
    pub oof: Vec<f64>,
}

/// Token ids for every text in `data`.
pub fn encode_dataset(data: &Dataset, vocab: &Vocab, max_len: usize) -> Vec<Vec<usize>> {
    data.items()
        .iter()
        .map(|t| vocab.encode(&t.text, max_len))
        .collect()
}

fn positive_f1(probs: &[f64], gold: &[Label]) -> f64 {
    let pred = apply_threshold(probs, 0.5);
    precision_recall_f1(&pred, gold)
        .map(|s| s.f1)
        .unwrap_or(0.0)
}

/// Accumulates the batch gradient: the mean clean-loss gradient plus, when
/// adversarial training is on, the mean adversarial-loss gradient.
///
/// Samples whose input gradient vanishes contribute no adversarial term.
/// Returns the number of adversarial terms added.
pub fn batch_gradient(
    params: &ModelParams,
    batch: &[(&[usize], Label)],
    cfg: &TrainConfig,
    acc: &mut ParamArrays,
) -> Result<usize, TrainError> {
    acc.set_zero();
    let scale = 1.0 / batch.len() as f64;
    let mut adversarial_terms = 0;
    for &(ids, label) in batch {
        let trace = forward(params, ids)?;
        let d_embedded = backward_into(params, &trace, label, scale, acc);
        if !cfg.adversarial || cfg.epsilon == 0.0 {
            continue;
        }
        // The log-likelihood gradient is the negated loss gradient.
        let g = d_embedded.scaled(-1.0);
        match adversarial_perturbation(&g, cfg.epsilon) {
            Ok(z) => {
                adversarial_loss_into(params, ids, label, &z, scale, acc)?;
                adversarial_terms += 1;
            }
            Err(TrainError::ZeroGradient) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(adversarial_terms)
}

/// Trains one model on `train` and scores `valid` after every epoch.
///
/// Texts are expected to be preprocessed and `vocab` built from `train`
/// only. The returned parameters and out-of-fold probabilities come from
/// the epoch with the best validation F1.
pub fn train_fold(
    train: &Dataset,
    valid: &Dataset,
    vocab: &Vocab,
    cfg: &TrainConfig,
) -> Result<FoldResult, TrainError> {
    cfg.validate()?;
    if train.is_empty() || valid.is_empty() {
        return Err(TrainError::EmptySplit);
    }
    let train_labels = train.labels()?;
    let valid_labels = valid.labels()?;
    let train_ids = encode_dataset(train, vocab, cfg.max_len);
    let valid_ids = encode_dataset(valid, vocab, cfg.max_len);

    let hyper = ModelHyper {
        vocab_size: vocab.len(),
        dim: cfg.dim,
        max_len: cfg.max_len,
    };
    let mut params = ModelParams::init(hyper, cfg.seed);
    let mut state = OptimizerState::new(hyper);
    let mut acc = ParamArrays::zeros(hyper);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    shuffle_rng.set_stream(1);

    let mut order: Vec<usize> = (0..train_ids.len()).collect();
    let mut stopper = EarlyStopping::new(cfg.patience, cfg.tolerance);
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut best = params.clone();
    let mut stopped_epoch = cfg.epochs;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<(&[usize], Label)> = chunk
                .iter()
                .map(|&i| (train_ids[i].as_slice(), train_labels[i]))
                .collect();
            batch_gradient(&params, &batch, cfg, &mut acc)?;
            adamw_step(&mut params, &acc, &mut state, cfg)?;
        }
        let f1 = positive_f1(&predict_probs(&params, &valid_ids)?, &valid_labels);
        history.push(f1);
        log::debug!("epoch {epoch}: valid f1 {f1:.6}");
        let decision = stopper.update(epoch, f1);
        if decision.improved {
            best.clone_from(&params);
        }
        if decision.stop {
            stopped_epoch = epoch;
            break;
        }
    }

    let oof = predict_probs(&best, &valid_ids)?;
    Ok(FoldResult {
        params: best,
        vocab: vocab.clone(),
        history,
        best_epoch: stopper.best_epoch(),
        stopped_epoch,
        oof,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::synth_corpus;
    use crate::textmodel::build_vocab;

    #[test]
    fn flat_history_stops_after_patience() {
        let mut s = EarlyStopping::new(3, 1e-3);
        let decisions: Vec<_> = (1..=4).map(|e| s.update(e, 0.60)).collect();
        assert!(decisions[0].improved);
        assert!(!decisions[1].stop && !decisions[2].stop);
        assert!(decisions[3].stop);
        assert_eq!(s.best_epoch(), 1);
    }

    #[test]
    fn gains_within_tolerance_do_not_count() {
        let mut s = EarlyStopping::new(2, 1e-3);
        s.update(1, 0.5);
        assert!(!s.update(2, 0.5005).improved);
        assert!(s.update(3, 0.502).improved);
        assert_eq!(s.best_epoch(), 3);
        assert!(!s.update(4, 0.0).stop);
        assert!(s.update(5, 0.502).stop);
    }

    #[test]
    fn zero_patience_stops_at_first_non_improvement() {
        let mut s = EarlyStopping::new(0, 0.0);
        assert!(!s.update(1, 0.3).stop);
        assert!(s.update(2, 0.3).stop);
    }

    fn split(seed: u64, noise: f64) -> (Dataset, Dataset, Vocab) {
        let data = synth_corpus(400, 0.47, noise, seed);
        let train_idx: Vec<usize> = (0..320).collect();
        let valid_idx: Vec<usize> = (320..400).collect();
        let train = data.subset("train", &train_idx);
        let valid = data.subset("valid", &valid_idx);
        let vocab = build_vocab(train.items().iter().map(|t| t.text.as_str()), 2, 8000).unwrap();
        (train, valid, vocab)
    }

    #[test]
    fn learns_separable_corpus() {
        let (train, valid, vocab) = split(3, 0.0);
        let cfg = TrainConfig {
            max_len: 32,
            ..TrainConfig::default()
        };
        let result = train_fold(&train, &valid, &vocab, &cfg).unwrap();
        assert!(result.history.len() <= cfg.epochs);
        assert_eq!(result.oof.len(), valid.len());
        assert!(result.history[result.best_epoch - 1] >= 0.95, "{:?}", result.history);
    }

    #[test]
    fn epsilon_zero_matches_plain_training() {
        let (train, valid, vocab) = split(5, 0.1);
        let plain = TrainConfig {
            epochs: 2,
            max_len: 24,
            ..TrainConfig::default()
        };
        let adv = TrainConfig {
            adversarial: true,
            epsilon: 0.0,
            ..plain.clone()
        };
        assert_eq!(
            train_fold(&train, &valid, &vocab, &plain).unwrap(),
            train_fold(&train, &valid, &vocab, &adv).unwrap()
        );
    }

    #[test]
    fn empty_split_is_rejected() {
        let (train, valid, vocab) = split(1, 0.0);
        let empty = valid.subset("empty", &[]);
        assert!(matches!(
            train_fold(&train, &empty, &vocab, &TrainConfig::default()),
            Err(TrainError::EmptySplit)
        ));
    }
}
