//! Emoji shortname tables.
//!
//! File format: one entry per line, `codepoints<TAB>name`, where the
//! codepoints are upper- or lower-case hex joined by `-` for multi-codepoint
//! sequences (`1F1FA-1F1F8\tunited_states`). Blank lines are ignored.
//!
//! A default table of frequently tweeted emoji ships with the crate; see
//! [`shipped_table`].

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::preprocess::EmojiTable;

/// The table bundled with the crate.
pub const SHIPPED_TABLE: &str = include_str!("../data/emoji.tsv");

#[derive(Debug, Error)]
pub enum EmojiError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: expected `codepoints<TAB>name`")]
    MalformedLine { line: usize },
    #[error("line {line}: duplicate key {key}")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: name {name:?} must match [a-z0-9_]+")]
    BadName { line: usize, name: String },
    #[error("line {line}: bad codepoint sequence {codepoints:?}")]
    BadCodepoint { line: usize, codepoints: String },
    #[error("emoji table has no entries")]
    EmptyTable,
}

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_')
}

/// Decodes a `-`-joined hex codepoint list into a string.
///
/// Keys must start with a non-ASCII codepoint and contain no whitespace, so
/// a key can never match inside the `:name:` text that replaces it.
pub fn parse_codepoints(spec: &str) -> Option<String> {
    let mut out = String::new();
    for part in spec.split('-') {
        if part.is_empty() || part.len() > 6 {
            return None;
        }
        let cp = u32::from_str_radix(part, 16).ok()?;
        let ch = char::from_u32(cp)?;
        if ch.is_whitespace() || (out.is_empty() && ch.is_ascii()) {
            return None;
        }
        out.push(ch);
    }
    Some(out)
}

pub fn parse_emoji_table(content: &str) -> Result<EmojiTable, EmojiError> {
    let mut entries = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let (codepoints, name) = line
            .split_once('\t')
            .ok_or(EmojiError::MalformedLine { line: line_no })?;
        if name.contains('\t') {
            return Err(EmojiError::MalformedLine { line: line_no });
        }
        let key = parse_codepoints(codepoints).ok_or_else(|| EmojiError::BadCodepoint {
            line: line_no,
            codepoints: codepoints.to_string(),
        })?;
        if !is_valid_name(name) {
            return Err(EmojiError::BadName {
                line: line_no,
                name: name.to_string(),
            });
        }
        if !seen.insert(key.clone()) {
            return Err(EmojiError::DuplicateKey {
                line: line_no,
                key: codepoints.to_string(),
            });
        }
        entries.push((key, name.to_string()));
    }
    EmojiTable::from_entries(entries)
}

pub fn load_emoji_table(path: impl AsRef<Path>) -> Result<EmojiTable, EmojiError> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|source| EmojiError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_emoji_table(&content)
}

/// Serializes `table` in the file format, one entry per line, sorted by key.
pub fn format_emoji_table(table: &EmojiTable) -> String {
    let mut out = String::new();
    for (key, name) in table.iter() {
        let cps: Vec<String> = key.chars().map(|c| format!("{:X}", c as u32)).collect();
        out.push_str(&cps.join("-"));
        out.push('\t');
        out.push_str(name);
        out.push('\n');
    }
    out
}

pub fn shipped_table() -> EmojiTable {
    parse_emoji_table(SHIPPED_TABLE).expect("bundled emoji table is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::demojize;

    #[test]
    fn formatted_table_parses_back() {
        let table = shipped_table();
        let text = format_emoji_table(&table);
        assert_eq!(parse_emoji_table(&text).unwrap(), table);
        assert!(text.contains("1F637\tface_with_medical_mask\n"));
        assert!(text.contains("2764-FE0F\tred_heart\n"));
    }

    #[test]
    fn parses_medical_mask_row() {
        let table = parse_emoji_table("1F637\tface_with_medical_mask\n").unwrap();
        assert_eq!(table.name("\u{1F637}"), Some("face_with_medical_mask"));
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(
            parse_emoji_table("1F637\tFace Mask!\n"),
            Err(EmojiError::BadName { line: 1, .. })
        ));
        assert!(matches!(parse_emoji_table(""), Err(EmojiError::EmptyTable)));
        assert!(matches!(parse_emoji_table("\n\n"), Err(EmojiError::EmptyTable)));
        assert!(matches!(
            parse_emoji_table("1F637\ta\n1f637\tb\n"),
            Err(EmojiError::DuplicateKey { line: 2, .. })
        ));
        for bad in ["ZZZ", "D800", "110000", "41", "1F637--1F3FD", "1F637-20", ""] {
            assert!(
                matches!(
                    parse_emoji_table(&format!("{bad}\tname\n")),
                    Err(EmojiError::BadCodepoint { .. })
                ),
                "{bad} accepted"
            );
        }
        assert!(matches!(
            parse_emoji_table("1F637 face\n"),
            Err(EmojiError::MalformedLine { line: 1 })
        ));
    }

    #[test]
    fn multi_codepoint_keys() {
        let table = parse_emoji_table("1F1FA-1F1F8\tunited_states\n").unwrap();
        assert_eq!(table.name("\u{1F1FA}\u{1F1F8}"), Some("united_states"));
    }

    #[test]
    fn shipped_table_entries_round_trip() {
        let table = shipped_table();
        assert!(table.len() >= 150, "only {} entries", table.len());
        for (key, name) in table.iter() {
            assert_eq!(demojize(key, &table), format!(" :{name}: "), "key {key:?}");
        }
    }

    #[test]
    fn shipped_table_contains_medical_mask() {
        assert!(SHIPPED_TABLE.lines().any(|l| l == "1F637\tface_with_medical_mask"));
        assert_eq!(shipped_table().name("\u{1F637}"), Some("face_with_medical_mask"));
    }
}
