//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use advtext::corpus::Label;
use advtext::matrix::Matrix;
use advtext::textmodel::{forward, forward_embedded, ModelHyper, ModelParams, PAD_ID};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parameters drawn uniformly from [-scale, scale], bias included.
pub fn random_params(hyper: ModelHyper, scale: f64, rng: &mut ChaCha8Rng) -> ModelParams {
    let mut p = ModelParams::zeros(hyper);
    for s in p.weights.slices_mut() {
        for x in s.iter_mut() {
            *x = rng.random_range(-scale..=scale);
        }
    }
    p
}

/// Right-padded ids with between one and `max_len` real tokens.
pub fn random_ids(hyper: ModelHyper, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = rng.random_range(1..=hyper.max_len);
    (0..hyper.max_len)
        .map(|i| if i < n { rng.random_range(1..hyper.vocab_size) } else { PAD_ID })
        .collect()
}

pub fn random_label(rng: &mut ChaCha8Rng) -> Label {
    Label::from_positive(rng.random_bool(0.5))
}

/// Unclamped binary cross-entropy written out from the definition.
pub fn plain_bce(prob: f64, label: Label) -> f64 {
    match label {
        Label::Informative => -prob.ln(),
        Label::Uninformative => -(1.0 - prob).ln(),
    }
}

pub fn loss_at(params: &ModelParams, ids: &[usize], label: Label) -> f64 {
    plain_bce(forward(params, ids).unwrap().prob, label)
}

pub fn loss_at_embedded(params: &ModelParams, ids: &[usize], label: Label, t: &Matrix) -> f64 {
    plain_bce(forward_embedded(params, ids, t.clone()).unwrap().prob, label)
}

/// Central difference of `f` around `x` with step `h`.
pub fn central_difference(h: f64, mut f: impl FnMut(f64) -> f64, x: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Relative error with a floor on the denominator so that gradients that
/// are zero up to rounding compare as equal.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

/// Positive-class F1 from first principles: 2PR/(P+R), zero on any 0/0.
pub fn f1_oracle(pred_pos: &[bool], gold_pos: &[bool]) -> f64 {
    let tp = pred_pos.iter().zip(gold_pos).filter(|(p, g)| **p && **g).count() as f64;
    let fp = pred_pos.iter().zip(gold_pos).filter(|(p, g)| **p && !**g).count() as f64;
    let fneg = pred_pos.iter().zip(gold_pos).filter(|(p, g)| !**p && **g).count() as f64;
    let p = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
    let r = if tp + fneg > 0.0 { tp / (tp + fneg) } else { 0.0 };
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// Best F1 over every decision set of the form {i : p_i ≥ v} for each
/// distinct probability v, plus the empty set.
pub fn brute_force_best_f1(probs: &[f64], gold: &[Label]) -> f64 {
    let gold_pos: Vec<bool> = gold.iter().map(|g| g.is_positive()).collect();
    let mut best = f1_oracle(&vec![false; probs.len()], &gold_pos);
    for &v in probs {
        let pred: Vec<bool> = probs.iter().map(|&p| p >= v).collect();
        best = best.max(f1_oracle(&pred, &gold_pos));
    }
    best
}
