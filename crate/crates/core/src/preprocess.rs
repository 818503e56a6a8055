//! Tweet text normalization.
//!
//! [`preprocess_text`] composes the individual steps: HTML unescaping,
//! emoji shortnames, `HTTPURL` → `URL`, and whitespace cleanup. User handles
//! arrive as `@USER` already and are left alone.

use std::collections::{HashMap, HashSet};

use crate::emoji_data::{is_valid_name, EmojiError};

/// Mapping from emoji codepoint sequences to lowercase shortnames.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiTable {
    names: HashMap<String, String>,
    first_chars: HashSet<char>,
    max_chars: usize,
}

impl EmojiTable {
    /// Builds a table from `(emoji, name)` pairs. Keys must start with a
    /// non-ASCII character and contain no whitespace. Duplicates are rejected
    /// by the file loader; here the last one wins.
    pub fn from_entries<I>(entries: I) -> Result<Self, EmojiError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut names = HashMap::new();
        let mut first_chars = HashSet::new();
        let mut max_chars = 0;
        for (key, name) in entries {
            let first = key
                .chars()
                .next()
                .filter(|c| !c.is_ascii() && !key.chars().any(char::is_whitespace))
                .ok_or_else(|| EmojiError::BadCodepoint {
                    line: 0,
                    codepoints: key.escape_unicode().to_string(),
                })?;
            if !is_valid_name(&name) {
                return Err(EmojiError::BadName { line: 0, name });
            }
            first_chars.insert(first);
            max_chars = max_chars.max(key.chars().count());
            names.insert(key, name);
        }
        if names.is_empty() {
            return Err(EmojiError::EmptyTable);
        }
        Ok(Self {
            names,
            first_chars,
            max_chars,
        })
    }

    pub fn name(&self, emoji: &str) -> Option<&str> {
        self.names.get(emoji).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Entries sorted by key.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        let mut entries: Vec<_> = self
            .names
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect();
        entries.sort_unstable();
        entries.into_iter()
    }
}

fn decode_entity(entity: &str) -> Option<char> {
    match entity {
        "amp" => Some('&'),
        "lt" => Some('<'),
        "gt" => Some('>'),
        "quot" => Some('"'),
        "apos" => Some('\''),
        _ => {
            let num = entity.strip_prefix('#')?;
            let cp = match num.strip_prefix(['x', 'X']) {
                Some(hex) if !hex.is_empty() && hex.bytes().all(|b| b.is_ascii_hexdigit()) => {
                    u32::from_str_radix(hex, 16).ok()?
                }
                Some(_) => return None,
                None if !num.is_empty() && num.bytes().all(|b| b.is_ascii_digit()) => {
                    num.parse().ok()?
                }
                None => return None,
            };
            char::from_u32(cp).filter(|&c| c != '\0')
        }
    }
}

/// Longest entity body we try to decode, e.g. `#x10FFFF`.
const MAX_ENTITY_LEN: usize = 10;

/// Replaces `&amp; &lt; &gt; &quot; &apos;` and numeric character
/// references in a single left-to-right pass. Malformed or unknown
/// entities are copied through.
pub fn unescape_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(pos) = rest.find('&') {
        out.push_str(&rest[..pos]);
        let after = &rest[pos + 1..];
        let decoded = after
            .find(';')
            .filter(|&end| end <= MAX_ENTITY_LEN)
            .and_then(|end| decode_entity(&after[..end]).map(|c| (c, end)));
        match decoded {
            Some((c, end)) => {
                out.push(c);
                rest = &after[end + 1..];
            }
            None => {
                out.push('&');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Collapses every whitespace run to one space and trims both ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Rewrites every whitespace-delimited `HTTPURL` token to `URL`, leaving the
/// surrounding whitespace untouched.
pub fn replace_url_token(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut token_start = None;
    let flush = |out: &mut String, token: &str| {
        out.push_str(if token == "HTTPURL" { "URL" } else { token });
    };
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(start) = token_start.take() {
                flush(&mut out, &text[start..i]);
            }
            out.push(c);
        } else if token_start.is_none() {
            token_start = Some(i);
        }
    }
    if let Some(start) = token_start {
        flush(&mut out, &text[start..]);
    }
    out
}

/// Replaces each longest-matching emoji sequence with ` :name: `.
/// Emoji missing from the table pass through unchanged.
pub fn demojize(text: &str, table: &EmojiTable) -> String {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        let mut matched = None;
        if table.first_chars.contains(&c) {
            let longest = table.max_chars.min(chars.len() - i);
            for len in (1..=longest).rev() {
                let end = chars.get(i + len).map_or(text.len(), |&(b, _)| b);
                if let Some(name) = table.name(&text[start..end]) {
                    matched = Some((len, name));
                    break;
                }
            }
        }
        match matched {
            Some((len, name)) => {
                out.push_str(" :");
                out.push_str(name);
                out.push_str(": ");
                i += len;
            }
            None => {
                out.push(c);
                i += 1;
            }
        }
    }
    out
}

/// Full normalization: HTML unescaping (repeated until stable), emoji
/// shortnames, `HTTPURL` → `URL`, then whitespace cleanup.
///
/// The result is a fixed point: `preprocess_text(preprocess_text(x)) ==
/// preprocess_text(x)`.
pub fn preprocess_text(text: &str, table: &EmojiTable) -> String {
    let mut unescaped = unescape_html(text);
    loop {
        // Every successful decode shortens the text, so this terminates.
        let next = unescape_html(&unescaped);
        if next == unescaped {
            break;
        }
        unescaped = next;
    }
    let demojized = demojize(&unescaped, table);
    normalize_whitespace(&replace_url_token(&demojized))
}
