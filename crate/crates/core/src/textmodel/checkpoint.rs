//! Checkpoint files.
//!
//! ```text
//! advtext-checkpoint 1
//! vocab_size <V>
//! dim <d>
//! max_len <L>
//! vocab
//! <token 0>
//! ...
//! <token V-1>
//! end_header
//! <raw f64 little-endian: embedding, query, key, value, output, classifier, bias>
//! ```
//!
//! Arrays are row-major in declaration order. Loading checks the byte count
//! against the header shapes.

use std::fs;
use std::path::Path;

use super::model::{ModelHyper, ModelParams};
use super::vocab::Vocab;
use super::ModelError;

pub const CHECKPOINT_MAGIC: &str = "advtext-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;
const END_HEADER: &str = "end_header";

pub fn checkpoint_bytes(params: &ModelParams, vocab: &Vocab) -> Result<Vec<u8>, ModelError> {
    if vocab.len() != params.hyper.vocab_size {
        return Err(ModelError::BadCheckpoint(format!(
            "vocabulary has {} tokens but the model expects {}",
            vocab.len(),
            params.hyper.vocab_size
        )));
    }
    let h = params.hyper;
    let mut header = format!(
        "{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}\nvocab_size {}\ndim {}\nmax_len {}\nvocab\n",
        h.vocab_size, h.dim, h.max_len
    );
    for token in vocab.tokens() {
        header.push_str(token);
        header.push('\n');
    }
    header.push_str(END_HEADER);
    header.push('\n');
    let mut out = header.into_bytes();
    out.reserve(params.weights.len() * 8);
    for slice in params.weights.slices() {
        for v in slice {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

fn header_value(line: Option<&str>, key: &str) -> Result<usize, ModelError> {
    line.and_then(|l| l.strip_prefix(key))
        .and_then(|rest| rest.strip_prefix(' '))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| ModelError::BadCheckpoint(format!("missing or invalid `{key}` line")))
}

fn next_line<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a str, ModelError> {
    let rest = &bytes[*pos..];
    let len = rest
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| ModelError::BadCheckpoint("truncated header".into()))?;
    *pos += len + 1;
    std::str::from_utf8(&rest[..len])
        .map_err(|_| ModelError::BadCheckpoint("header is not UTF-8".into()))
}

pub fn parse_checkpoint(bytes: &[u8]) -> Result<(ModelParams, Vocab), ModelError> {
    let mut pos = 0;
    let expected_magic = format!("{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}");
    if next_line(bytes, &mut pos)? != expected_magic {
        return Err(ModelError::BadCheckpoint(format!(
            "expected `{expected_magic}` on the first line"
        )));
    }
    let hyper = ModelHyper {
        vocab_size: header_value(Some(next_line(bytes, &mut pos)?), "vocab_size")?,
        dim: header_value(Some(next_line(bytes, &mut pos)?), "dim")?,
        max_len: header_value(Some(next_line(bytes, &mut pos)?), "max_len")?,
    };
    if next_line(bytes, &mut pos)? != "vocab" {
        return Err(ModelError::BadCheckpoint("missing `vocab` line".into()));
    }
    let tokens = (0..hyper.vocab_size)
        .map(|_| next_line(bytes, &mut pos).map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?;
    if next_line(bytes, &mut pos)? != END_HEADER {
        return Err(ModelError::BadCheckpoint(
            "vocabulary listing does not match vocab_size".into(),
        ));
    }
    let vocab = Vocab::from_tokens(tokens)?;

    let body = &bytes[pos..];
    let d = hyper.dim;
    let expected = d
        .checked_mul(hyper.vocab_size + 4 * d.min(1 << 20) + 1)
        .and_then(|n| n.checked_add(1))
        .and_then(|n| n.checked_mul(8));
    if d > 1 << 20 || expected != Some(body.len()) {
        return Err(ModelError::BadCheckpoint(format!(
            "parameter block of {} bytes does not match the header shapes",
            body.len()
        )));
    }
    let mut params = ModelParams::zeros(hyper);
    let mut values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    for slice in params.weights.slices_mut() {
        for (dst, v) in slice.iter_mut().zip(values.by_ref()) {
            *dst = v;
        }
    }
    if !params.weights.is_finite() {
        return Err(ModelError::BadCheckpoint("non-finite parameter".into()));
    }
    Ok((params, vocab))
}

pub fn save_checkpoint(
    path: impl AsRef<Path>,
    params: &ModelParams,
    vocab: &Vocab,
) -> Result<(), ModelError> {
    let path = path.as_ref();
    fs::write(path, checkpoint_bytes(params, vocab)?).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(ModelParams, Vocab), ModelError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_checkpoint(&bytes)
}
