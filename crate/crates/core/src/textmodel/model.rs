//! Single-layer attention classifier.
//!
//! ```text
//! X = E[ids]                       embedded sequence, L×d
//! Q, K, V = X·Wq, X·Wk, X·Wv
//! A = softmax_masked(Q·Kᵀ / √d)    pad keys excluded
//! H = X + (A·V)·Wo                 residual
//! p = sigmoid(w · mean_valid(H) + b)
//! ```
//!
//! Pad positions take no part in attention or pooling, so the output and all
//! gradients are independent of whatever sits in pad rows.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::vocab::PAD_ID;
use super::ModelError;
use crate::corpus::Label;
use crate::matrix::{add_outer, dot, mat_vec_add, vec_mat, Matrix};

/// Probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]` before taking logs.
pub const PROB_CLAMP: f64 = 1e-7;

const INIT_RANGE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelHyper {
    pub vocab_size: usize,
    pub dim: usize,
    pub max_len: usize,
}

/// Every trainable array of the classifier. Also used for gradients and
/// optimizer moments, which share the same shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamArrays {
    /// V×d
    pub embedding: Matrix,
    pub query: Matrix,
    pub key: Matrix,
    pub value: Matrix,
    pub output: Matrix,
    /// d
    pub classifier: Vec<f64>,
    pub bias: f64,
}

/// Named views over [`ParamArrays`] in declaration order.
pub const ARRAY_NAMES: [&str; 7] = [
    "embedding",
    "query",
    "key",
    "value",
    "output",
    "classifier",
    "bias",
];

impl ParamArrays {
    pub fn zeros(hyper: ModelHyper) -> Self {
        let d = hyper.dim;
        Self {
            embedding: Matrix::zeros(hyper.vocab_size, d),
            query: Matrix::zeros(d, d),
            key: Matrix::zeros(d, d),
            value: Matrix::zeros(d, d),
            output: Matrix::zeros(d, d),
            classifier: vec![0.0; d],
            bias: 0.0,
        }
    }

    /// The arrays in declaration order.
    pub fn slices(&self) -> [&[f64]; 7] {
        [
            self.embedding.as_slice(),
            self.query.as_slice(),
            self.key.as_slice(),
            self.value.as_slice(),
            self.output.as_slice(),
            &self.classifier,
            std::slice::from_ref(&self.bias),
        ]
    }

    pub fn slices_mut(&mut self) -> [&mut [f64]; 7] {
        [
            self.embedding.as_mut_slice(),
            self.query.as_mut_slice(),
            self.key.as_mut_slice(),
            self.value.as_mut_slice(),
            self.output.as_mut_slice(),
            &mut self.classifier,
            std::slice::from_mut(&mut self.bias),
        ]
    }

    pub fn len(&self) -> usize {
        self.slices().iter().map(|s| s.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.slices().iter().all(|s| s.iter().all(|v| v.is_finite()))
    }

    pub fn set_zero(&mut self) {
        for s in self.slices_mut() {
            s.fill(0.0);
        }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, other: &ParamArrays, s: f64) {
        for (a, b) in self.slices_mut().into_iter().zip(other.slices()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += s * y;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub hyper: ModelHyper,
    pub weights: ParamArrays,
}

impl ModelParams {
    pub fn zeros(hyper: ModelHyper) -> Self {
        Self {
            hyper,
            weights: ParamArrays::zeros(hyper),
        }
    }

    /// Uniform initialization. Embedding entries lie in ±√(3/d), which gives
    /// each row an expected squared norm of 1; every other array is in
    /// [-0.1, 0.1] and the classifier bias starts at 0.
    pub fn init(hyper: ModelHyper, seed: u64) -> Self {
        let mut params = Self::zeros(hyper);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let emb_range = (3.0 / hyper.dim as f64).sqrt();
        let [emb, q, k, v, o, cls, _bias] = params.weights.slices_mut();
        for x in emb.iter_mut() {
            *x = rng.random_range(-emb_range..=emb_range);
        }
        for s in [q, k, v, o, cls] {
            for x in s.iter_mut() {
                *x = rng.random_range(-INIT_RANGE..=INIT_RANGE);
            }
        }
        params
    }

    fn check_ids(&self, ids: &[usize]) -> Result<(), ModelError> {
        if ids.len() != self.hyper.max_len {
            return Err(ModelError::LengthMismatch {
                expected: self.hyper.max_len,
                found: ids.len(),
            });
        }
        if let Some(&id) = ids.iter().find(|&&id| id >= self.hyper.vocab_size) {
            return Err(ModelError::IdOutOfRange {
                id,
                vocab_size: self.hyper.vocab_size,
            });
        }
        Ok(())
    }

    /// Raw embedding rows for `ids`, one per position (pad rows included).
    pub fn lookup(&self, ids: &[usize]) -> Result<Matrix, ModelError> {
        self.check_ids(ids)?;
        let d = self.hyper.dim;
        let mut out = Matrix::zeros(ids.len(), d);
        for (i, &id) in ids.iter().enumerate() {
            out.row_mut(i).copy_from_slice(self.weights.embedding.row(id));
        }
        Ok(out)
    }
}

/// Cached activations of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    pub token_ids: Vec<usize>,
    pub mask: Vec<bool>,
    /// The embedded sequence fed to the encoder (L×d).
    pub embedded: Matrix,
    pub query: Matrix,
    pub key: Matrix,
    pub value: Matrix,
    /// L×L; rows and columns of pad positions are zero.
    pub attention: Matrix,
    pub context: Matrix,
    pub hidden: Matrix,
    pub pooled: Vec<f64>,
    pub logit: f64,
    pub prob: f64,
}

impl ForwardTrace {
    pub fn valid_positions(&self) -> Vec<usize> {
        positions(&self.mask)
    }
}

fn positions(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i))
        .collect()
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn forward(params: &ModelParams, ids: &[usize]) -> Result<ForwardTrace, ModelError> {
    let embedded = params.lookup(ids)?;
    Ok(encode_embedded(params, ids, embedded))
}

/// Runs the encoder on an explicit embedded sequence instead of the lookup
/// of `ids`. The ids only supply the pad mask.
pub fn forward_embedded(
    params: &ModelParams,
    ids: &[usize],
    embedded: Matrix,
) -> Result<ForwardTrace, ModelError> {
    params.check_ids(ids)?;
    let expected = (params.hyper.max_len, params.hyper.dim);
    if embedded.shape() != expected {
        return Err(ModelError::ShapeMismatch {
            what: "embedded sequence",
            expected,
            found: embedded.shape(),
        });
    }
    Ok(encode_embedded(params, ids, embedded))
}

fn encode_embedded(params: &ModelParams, ids: &[usize], embedded: Matrix) -> ForwardTrace {
    let w = &params.weights;
    let (len, d) = (ids.len(), params.hyper.dim);
    let mask: Vec<bool> = ids.iter().map(|&id| id != PAD_ID).collect();
    let valid = positions(&mask);
    let scale = 1.0 / (d as f64).sqrt();

    let mut query = Matrix::zeros(len, d);
    let mut key = Matrix::zeros(len, d);
    let mut value = Matrix::zeros(len, d);
    for &i in &valid {
        let x = embedded.row(i);
        vec_mat(x, &w.query, query.row_mut(i));
        vec_mat(x, &w.key, key.row_mut(i));
        vec_mat(x, &w.value, value.row_mut(i));
    }

    let mut attention = Matrix::zeros(len, len);
    let mut scores = vec![0.0; valid.len()];
    for &i in &valid {
        for (s, &j) in scores.iter_mut().zip(&valid) {
            *s = dot(query.row(i), key.row(j)) * scale;
        }
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for s in scores.iter_mut() {
            *s = (*s - max).exp();
            total += *s;
        }
        for (&s, &j) in scores.iter().zip(&valid) {
            attention[(i, j)] = s / total;
        }
    }

    let mut context = Matrix::zeros(len, d);
    let mut hidden = Matrix::zeros(len, d);
    let mut pooled = vec![0.0; d];
    let mut projected = vec![0.0; d];
    for &i in &valid {
        let ctx = context.row_mut(i);
        for &j in &valid {
            let a = attention[(i, j)];
            for (c, &v) in ctx.iter_mut().zip(value.row(j)) {
                *c += a * v;
            }
        }
        vec_mat(context.row(i), &w.output, &mut projected);
        let h = hidden.row_mut(i);
        for ((h, &x), &o) in h.iter_mut().zip(embedded.row(i)).zip(&projected) {
            *h = x + o;
        }
        for (p, &h) in pooled.iter_mut().zip(hidden.row(i)) {
            *p += h;
        }
    }
    if !valid.is_empty() {
        let n = valid.len() as f64;
        pooled.iter_mut().for_each(|p| *p /= n);
    }

    let logit = dot(&w.classifier, &pooled) + w.bias;
    ForwardTrace {
        token_ids: ids.to_vec(),
        mask,
        embedded,
        query,
        key,
        value,
        attention,
        context,
        hidden,
        pooled,
        logit,
        prob: sigmoid(logit),
    }
}

pub fn clamp_prob(prob: f64) -> f64 {
    prob.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// Binary cross-entropy `-log p(label)` with the probability clamped.
pub fn bce_loss(prob: f64, label: Label) -> f64 {
    let p = clamp_prob(prob);
    if label.is_positive() {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Gradients of the loss with respect to every parameter and to the
/// embedded input sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: ParamArrays,
    /// ∂loss/∂embedded (L×d). The log-likelihood gradient is its negation.
    pub wrt_embedded: Matrix,
}

/// Exact gradients of [`bce_loss`] for one sample.
pub fn backward(params: &ModelParams, trace: &ForwardTrace, label: Label) -> Gradients {
    let mut weights = ParamArrays::zeros(params.hyper);
    let wrt_embedded = backward_into(params, trace, label, 1.0, &mut weights);
    Gradients {
        weights,
        wrt_embedded,
    }
}

/// Adds `scale` times the parameter gradients into `acc` and returns the
/// unscaled gradient with respect to the embedded sequence.
///
/// The embedding gradient reaches only the rows of the sample's tokens, so
/// accumulating a batch this way avoids materializing V×d per sample.
pub fn backward_into(
    params: &ModelParams,
    trace: &ForwardTrace,
    label: Label,
    scale: f64,
    acc: &mut ParamArrays,
) -> Matrix {
    let w = &params.weights;
    let d = params.hyper.dim;
    let len = trace.token_ids.len();
    let valid = trace.valid_positions();
    let mut d_embedded = Matrix::zeros(len, d);

    // Sigmoid + BCE: dL/dlogit = p - y.
    let d_logit = trace.prob - label.target();
    acc.bias += scale * d_logit;
    for (g, &p) in acc.classifier.iter_mut().zip(&trace.pooled) {
        *g += scale * d_logit * p;
    }
    if valid.is_empty() {
        return d_embedded;
    }

    // Mean pooling spreads the same gradient over every valid row of H.
    let n = valid.len() as f64;
    let d_hidden: Vec<f64> = w.classifier.iter().map(|&c| d_logit * c / n).collect();

    // H = X + C·Wo
    let mut d_context = vec![0.0; d];
    mat_vec_add(&w.output, &d_hidden, &mut d_context);
    for &i in &valid {
        add_outer(&mut acc.output, trace.context.row(i), &d_hidden, scale);
        d_embedded.row_mut(i).copy_from_slice(&d_hidden);
    }

    // C = A·V, then the masked softmax.
    let attn_scale = 1.0 / (d as f64).sqrt();
    let mut d_query = Matrix::zeros(len, d);
    let mut d_key = Matrix::zeros(len, d);
    let mut d_value = Matrix::zeros(len, d);
    let mut d_attn = vec![0.0; valid.len()];
    for &i in &valid {
        for (da, &j) in d_attn.iter_mut().zip(&valid) {
            *da = dot(&d_context, trace.value.row(j));
            let a = trace.attention[(i, j)];
            for (dv, &dc) in d_value.row_mut(j).iter_mut().zip(&d_context) {
                *dv += a * dc;
            }
        }
        let weighted: f64 = valid
            .iter()
            .zip(&d_attn)
            .map(|(&j, &da)| trace.attention[(i, j)] * da)
            .sum();
        for (&j, &da) in valid.iter().zip(&d_attn) {
            let d_score = trace.attention[(i, j)] * (da - weighted) * attn_scale;
            if d_score == 0.0 {
                continue;
            }
            for (dq, &k) in d_query.row_mut(i).iter_mut().zip(trace.key.row(j)) {
                *dq += d_score * k;
            }
            for (dk, &q) in d_key.row_mut(j).iter_mut().zip(trace.query.row(i)) {
                *dk += d_score * q;
            }
        }
    }

    for &i in &valid {
        let x = trace.embedded.row(i);
        add_outer(&mut acc.query, x, d_query.row(i), scale);
        add_outer(&mut acc.key, x, d_key.row(i), scale);
        add_outer(&mut acc.value, x, d_value.row(i), scale);
        let dx = d_embedded.row_mut(i);
        mat_vec_add(&w.query, d_query.row(i), dx);
        mat_vec_add(&w.key, d_key.row(i), dx);
        mat_vec_add(&w.value, d_value.row(i), dx);
        let id = trace.token_ids[i];
        for (g, &v) in acc.embedding.row_mut(id).iter_mut().zip(d_embedded.row(i)) {
            *g += scale * v;
        }
    }
    d_embedded
}

/// Model probability for each encoded sequence.
pub fn predict_probs(params: &ModelParams, encoded: &[Vec<usize>]) -> Result<Vec<f64>, ModelError> {
    encoded
        .iter()
        .map(|ids| forward(params, ids).map(|t| t.prob))
        .collect()
}
