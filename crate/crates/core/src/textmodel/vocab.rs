use std::collections::HashMap;

use sha2::{Digest, Sha256};

use super::ModelError;

pub const PAD_ID: usize = 0;
pub const UNK_ID: usize = 1;
pub const PAD_TOKEN: &str = "<pad>";
pub const UNK_TOKEN: &str = "<unk>";

/// Lower-cases and splits on anything that is not alphanumeric or `_`.
///
/// `:face_with_medical_mask:` therefore becomes a single token.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Token ↔ id mapping with `<pad>` at 0 and `<unk>` at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    token_to_id: HashMap<String, usize>,
    id_to_token: Vec<String>,
}

impl Vocab {
    /// Rebuilds a vocabulary from its id-ordered token listing.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self, ModelError> {
        if tokens.len() < 3 || tokens[PAD_ID] != PAD_TOKEN || tokens[UNK_ID] != UNK_TOKEN {
            return Err(ModelError::BadVocab(
                "listing must start with <pad>, <unk> and hold at least one token".into(),
            ));
        }
        let mut token_to_id = HashMap::with_capacity(tokens.len());
        for (id, token) in tokens.iter().enumerate() {
            if token.is_empty() || token.contains(char::is_whitespace) {
                return Err(ModelError::BadVocab(format!("invalid token {token:?}")));
            }
            if token_to_id.insert(token.clone(), id).is_some() {
                return Err(ModelError::BadVocab(format!("duplicate token {token:?}")));
            }
        }
        Ok(Self {
            token_to_id,
            id_to_token: tokens,
        })
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.id_to_token.get(id).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }

    /// Hex SHA-256 of the id-ordered token listing.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for t in &self.id_to_token {
            hasher.update(t.as_bytes());
            hasher.update(b"\n");
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Token ids for `text`, truncated or right-padded to `max_len`.
    pub fn encode(&self, text: &str, max_len: usize) -> Vec<usize> {
        let mut ids: Vec<usize> = tokenize(text)
            .iter()
            .take(max_len)
            .map(|t| self.id(t).unwrap_or(UNK_ID))
            .collect();
        ids.resize(max_len, PAD_ID);
        ids
    }
}

/// Builds a vocabulary from texts: tokens seen at least `min_freq` times,
/// most frequent first with ties broken lexicographically, capped at
/// `max_size` entries including the two reserved ids.
pub fn build_vocab<'a, I>(texts: I, min_freq: usize, max_size: usize) -> Result<Vocab, ModelError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: HashMap<String, usize> = HashMap::new();
    for text in texts {
        for token in tokenize(text) {
            *counts.entry(token).or_default() += 1;
        }
    }
    let mut kept: Vec<(String, usize)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_freq.max(1))
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    kept.truncate(max_size.saturating_sub(2));
    if kept.is_empty() {
        return Err(ModelError::EmptyVocabulary);
    }
    let tokens = [PAD_TOKEN.to_string(), UNK_TOKEN.to_string()]
        .into_iter()
        .chain(kept.into_iter().map(|(t, _)| t))
        .collect();
    Vocab::from_tokens(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CORPUS: [&str; 2] = ["covid covid test", "covid"];

    #[test]
    fn frequency_order() {
        let v = build_vocab(CORPUS, 1, 100).unwrap();
        assert_eq!(v.tokens(), ["<pad>", "<unk>", "covid", "test"]);
        let v = build_vocab(CORPUS, 3, 100).unwrap();
        assert_eq!(v.tokens(), ["<pad>", "<unk>", "covid"]);
        assert!(matches!(build_vocab(CORPUS, 4, 100), Err(ModelError::EmptyVocabulary)));
    }

    #[test]
    fn ties_are_lexicographic_and_size_capped() {
        let v = build_vocab(["b a c", "c"], 1, 4).unwrap();
        assert_eq!(v.tokens(), ["<pad>", "<unk>", "c", "a"]);
        assert!(matches!(build_vocab(["a"], 1, 2), Err(ModelError::EmptyVocabulary)));
    }

    #[test]
    fn encode_pads_and_truncates() {
        let v = build_vocab(CORPUS, 1, 100).unwrap();
        assert_eq!(v.encode("covid zzz", 4), vec![2, 1, 0, 0]);
        assert_eq!(v.encode("", 4), vec![0, 0, 0, 0]);
        assert_eq!(v.encode("test covid test covid covid", 3), vec![3, 2, 3]);
    }

    #[test]
    fn tokenizer_splits_punctuation_and_lowercases() {
        assert_eq!(
            tokenize("Stay & SAFE :face_with_medical_mask: URL, @USER!"),
            ["stay", "safe", "face_with_medical_mask", "url", "user"]
        );
    }

    #[test]
    fn from_tokens_validates() {
        assert!(Vocab::from_tokens(vec!["a".into(), "b".into(), "c".into()]).is_err());
        let ok = vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string(), "x".into()];
        assert!(Vocab::from_tokens(ok.clone()).is_ok());
        let mut dup = ok;
        dup.push("x".into());
        assert!(Vocab::from_tokens(dup).is_err());
    }
}
