//! Vocabulary, encoding and the attention classifier with explicit
//! forward and backward passes.
//!
//! All gradients are gradients of the loss. The gradient of the
//! log-likelihood with respect to the embedded sequence is
//! `-Gradients::wrt_embedded`.

mod checkpoint;
mod model;
mod vocab;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub use checkpoint::{
    checkpoint_bytes, load_checkpoint, parse_checkpoint, save_checkpoint, CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
};
pub use model::{
    backward, backward_into, bce_loss, clamp_prob, forward, forward_embedded, predict_probs,
    sigmoid, ForwardTrace, Gradients, ModelHyper, ModelParams, ParamArrays, ARRAY_NAMES,
    PROB_CLAMP,
};
pub use vocab::{build_vocab, tokenize, Vocab, PAD_ID, PAD_TOKEN, UNK_ID, UNK_TOKEN};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("no token reaches the minimum frequency")]
    EmptyVocabulary,
    #[error("invalid vocabulary: {0}")]
    BadVocab(String),
    #[error("token id {id} is outside the vocabulary of size {vocab_size}")]
    IdOutOfRange { id: usize, vocab_size: usize },
    #[error("expected a sequence of {expected} ids, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("{what}: expected shape {expected:?}, got {found:?}")]
    ShapeMismatch {
        what: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("invalid checkpoint: {0}")]
    BadCheckpoint(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}
