//! Small TSV artifacts: `id\tprob` predictions, `id\tlabel` decisions,
//! `id\tfold` assignments and `epoch\tf1` histories.
//!
//! Probabilities are written with the shortest decimal form that parses
//! back to the same `f64`, so artifacts round-trip bit-exactly.

use std::fs;
use std::path::Path;

use std::collections::HashMap;

use crate::corpus::{Dataset, FoldPlan, Label};
use crate::ensemble::EnsembleError;
use crate::error::{Error, Result};

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Data rows of a two-column TSV, skipping a header whose first cell is `header`.
fn read_pairs(path: &Path, header: &str) -> Result<Vec<(usize, String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if i == 0 && cells[0] == header {
            continue;
        }
        if cells.len() != 2 {
            return Err(bad_row(path, i + 1, format!("expected 2 columns, found {}", cells.len())));
        }
        rows.push((i + 1, cells[0].to_string(), cells[1].to_string()));
    }
    Ok(rows)
}

fn bad_row(path: &Path, line: usize, reason: String) -> Error {
    Error::BadPredictionFile {
        path: path.to_path_buf(),
        line,
        reason,
    }
}

pub fn format_probs(ids: &[String], probs: &[f64]) -> String {
    let mut out = String::from("id\tprob\n");
    for (id, p) in ids.iter().zip(probs) {
        out.push_str(&format!("{id}\t{p}\n"));
    }
    out
}

pub fn write_probs(path: impl AsRef<Path>, ids: &[String], probs: &[f64]) -> Result<()> {
    write_text(path.as_ref(), &format_probs(ids, probs))
}

/// Reads `id\tprob` rows; every probability must lie in [0, 1].
pub fn read_probs(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<f64>)> {
    let path = path.as_ref();
    let mut ids = Vec::new();
    let mut probs = Vec::new();
    for (line, id, cell) in read_pairs(path, "id")? {
        let p: f64 = cell
            .parse()
            .map_err(|_| bad_row(path, line, format!("not a number: {cell:?}")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(bad_row(path, line, format!("probability {p} outside [0, 1]")));
        }
        ids.push(id);
        probs.push(p);
    }
    Ok((ids, probs))
}

pub fn format_labels(ids: &[String], labels: &[Label]) -> String {
    let mut out = String::from("id\tlabel\n");
    for (id, l) in ids.iter().zip(labels) {
        out.push_str(&format!("{id}\t{l}\n"));
    }
    out
}

pub fn write_labels(path: impl AsRef<Path>, ids: &[String], labels: &[Label]) -> Result<()> {
    write_text(path.as_ref(), &format_labels(ids, labels))
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Label>)> {
    let path = path.as_ref();
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    for (line, id, cell) in read_pairs(path, "id")? {
        let l: Label = cell
            .parse()
            .map_err(|_| bad_row(path, line, format!("unknown label {cell:?}")))?;
        ids.push(id);
        labels.push(l);
    }
    Ok((ids, labels))
}

/// A prediction file holding either probabilities or labels.
#[derive(Debug, Clone, PartialEq)]
pub enum Predictions {
    Probs(Vec<f64>),
    Labels(Vec<Label>),
}

/// Reads `id\tprob` or `id\tlabel`, deciding by the first data row.
pub fn read_predictions(path: impl AsRef<Path>) -> Result<(Vec<String>, Predictions)> {
    let path = path.as_ref();
    let rows = read_pairs(path, "id")?;
    let labels = rows.first().is_some_and(|(_, _, c)| c.parse::<Label>().is_ok());
    if labels {
        let (ids, l) = read_labels(path)?;
        Ok((ids, Predictions::Labels(l)))
    } else {
        let (ids, p) = read_probs(path)?;
        Ok((ids, Predictions::Probs(p)))
    }
}

pub fn format_folds(ids: &[String], plan: &FoldPlan) -> String {
    let mut out = String::from("id\tfold\n");
    for (id, f) in ids.iter().zip(&plan.assignment) {
        out.push_str(&format!("{id}\t{f}\n"));
    }
    out
}

pub fn write_folds(path: impl AsRef<Path>, ids: &[String], plan: &FoldPlan) -> Result<()> {
    write_text(path.as_ref(), &format_folds(ids, plan))
}

/// Reads `id\tfold` rows.
pub fn read_folds(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<usize>)> {
    let path = path.as_ref();
    let mut ids = Vec::new();
    let mut folds = Vec::new();
    for (line, id, cell) in read_pairs(path, "id")? {
        let f: usize = cell
            .parse()
            .map_err(|_| bad_row(path, line, format!("not a fold index: {cell:?}")))?;
        ids.push(id);
        folds.push(f);
    }
    Ok((ids, folds))
}

pub fn format_history(history: &[f64]) -> String {
    let mut out = String::from("epoch\tf1\n");
    for (i, f1) in history.iter().enumerate() {
        out.push_str(&format!("{}\t{f1}\n", i + 1));
    }
    out
}

/// Gold labels of `data` in the order of `ids`; every id must be present
/// and labeled, but `data` may hold more samples.
pub fn gold_for(ids: &[String], data: &Dataset) -> Result<Vec<Label>> {
    let by_id: HashMap<&str, Option<Label>> = data
        .items()
        .iter()
        .map(|t| (t.id.as_str(), t.label))
        .collect();
    ids.iter()
        .map(|id| match by_id.get(id.as_str()) {
            Some(Some(l)) => Ok(*l),
            Some(None) => Err(crate::corpus::CorpusError::Unlabeled(id.clone()).into()),
            None => Err(EnsembleError::MisalignedIds.into()),
        })
        .collect()
}

pub(crate) fn write_string(path: impl AsRef<Path>, text: &str) -> Result<()> {
    write_text(path.as_ref(), text)
}
