use serde::{Deserialize, Serialize};

use super::TrainError;

/// Hyperparameters for one training run.
///
/// Serialized as JSON with these field names; missing fields take the
/// defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub patience: usize,
    /// Minimum F1 gain that counts as an improvement for early stopping.
    pub tolerance: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Size of the adversarial perturbation.
    pub epsilon: f64,
    pub adversarial: bool,
    pub weight_decay: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
    /// Embedding width.
    pub dim: usize,
    /// Tokens per sequence after truncation and padding.
    pub max_len: usize,
    pub min_freq: usize,
    pub max_vocab: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 5,
            patience: 3,
            tolerance: 1e-3,
            learning_rate: 1e-3,
            batch_size: 16,
            epsilon: 1.0,
            adversarial: false,
            weight_decay: 0.01,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            seed: 0,
            dim: 32,
            max_len: 64,
            min_freq: 2,
            max_vocab: 8000,
        }
    }
}

impl TrainConfig {
    pub fn adversarial(epsilon: f64) -> Self {
        Self {
            adversarial: true,
            epsilon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |msg: &str| Err(TrainError::InvalidConfig(msg.to_string()));
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return bad("epsilon must be a non-negative number");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return bad("tolerance must be non-negative");
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return bad("weight_decay must be non-negative");
        }
        if !((0.0..1.0).contains(&self.adam_beta1) && (0.0..1.0).contains(&self.adam_beta2)) {
            return bad("adam betas must be in [0, 1)");
        }
        if self.adam_eps.is_nan() || self.adam_eps <= 0.0 {
            return bad("adam_eps must be positive");
        }
        if self.dim == 0 || self.max_len == 0 {
            return bad("dim and max_len must be positive");
        }
        if self.max_vocab < 3 {
            return bad("max_vocab must leave room for at least one token");
        }
        Ok(())
    }
}
