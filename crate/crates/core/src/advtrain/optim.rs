//! AdamW with decoupled weight decay.
//!
//! ```text
//! m ← β₁m + (1-β₁)g        v ← β₂v + (1-β₂)g²
//! w ← w - lr·wd·w - lr·m̂ / (√v̂ + ε)
//! ```
//!
//! Decay applies to every weight array except the classifier bias and the
//! `<pad>` embedding row.

use super::{TrainConfig, TrainError};
use crate::textmodel::{ModelHyper, ModelParams, ParamArrays, ARRAY_NAMES, PAD_ID};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub step: u64,
    pub first_moment: ParamArrays,
    pub second_moment: ParamArrays,
}

impl OptimizerState {
    pub fn new(hyper: ModelHyper) -> Self {
        Self {
            step: 0,
            first_moment: ParamArrays::zeros(hyper),
            second_moment: ParamArrays::zeros(hyper),
        }
    }
}

const BIAS_INDEX: usize = 6;

/// One in-place AdamW update. Nothing is modified when a gradient entry is
/// not finite.
pub fn adamw_step(
    params: &mut ModelParams,
    grads: &ParamArrays,
    state: &mut OptimizerState,
    cfg: &TrainConfig,
) -> Result<(), TrainError> {
    for (name, slice) in ARRAY_NAMES.iter().zip(grads.slices()) {
        if slice.iter().any(|g| !g.is_finite()) {
            return Err(TrainError::NonFiniteGradient(name));
        }
    }
    state.step += 1;
    let t = state.step as f64;
    let (b1, b2) = (cfg.adam_beta1, cfg.adam_beta2);
    let bias1 = 1.0 - b1.powf(t);
    let bias2 = 1.0 - b2.powf(t);
    let lr = cfg.learning_rate;
    let decay = lr * cfg.weight_decay;
    let pad_row = PAD_ID * params.hyper.dim..(PAD_ID + 1) * params.hyper.dim;

    let arrays = params
        .weights
        .slices_mut()
        .into_iter()
        .zip(grads.slices())
        .zip(state.first_moment.slices_mut())
        .zip(state.second_moment.slices_mut());
    for (idx, (((w, g), m), v)) in arrays.enumerate() {
        for j in 0..w.len() {
            let gj = g[j];
            m[j] = b1 * m[j] + (1.0 - b1) * gj;
            v[j] = b2 * v[j] + (1.0 - b2) * gj * gj;
            let m_hat = m[j] / bias1;
            let v_hat = v[j] / bias2;
            let decays = idx != BIAS_INDEX && !(idx == 0 && pad_row.contains(&j));
            let shrink = if decays { decay * w[j] } else { 0.0 };
            w[j] -= shrink + lr * m_hat / (v_hat.sqrt() + cfg.adam_eps);
        }
    }
    Ok(())
}
