//! Labeled tweet datasets: TSV ingestion, stratified fold plans and a
//! synthetic corpus generator for desk-scale experiments.
//!
//! The on-disk format is UTF-8 with LF line endings and the columns
//! `id\ttext\tlabel` (the label column is absent for unlabeled data). A
//! header row is optional and is recognized by the literal first cell `id`.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: expected {expected} tab-separated columns, found {found}")]
    MalformedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unknown label {label:?}")]
    UnknownLabel { line: usize, label: String },
    #[error("duplicate tweet id {0:?}")]
    DuplicateId(String),
    #[error("dataset file contains no rows")]
    EmptyFile,
    #[error("tweet {id:?}: {reason}")]
    InvalidTweet { id: String, reason: &'static str },
    #[error("tweet {0:?} has no label")]
    Unlabeled(String),
    #[error("k = {k} is larger than the dataset size {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("k must be at least 2, got {0}")]
    KTooSmall(usize),
}

/// Binary tweet label. `Informative` is the positive class everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Uninformative = 0,
    Informative = 1,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Informative
    }

    pub fn from_positive(positive: bool) -> Self {
        if positive {
            Label::Informative
        } else {
            Label::Uninformative
        }
    }

    /// Target value used by the loss: 1.0 for the positive class.
    pub fn target(self) -> f64 {
        match self {
            Label::Informative => 1.0,
            Label::Uninformative => 0.0,
        }
    }

    pub fn flipped(self) -> Self {
        Self::from_positive(!self.is_positive())
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Informative => "INFORMATIVE",
            Label::Uninformative => "UNINFORMATIVE",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        if s.eq_ignore_ascii_case("INFORMATIVE") {
            Ok(Label::Informative)
        } else if s.eq_ignore_ascii_case("UNINFORMATIVE") {
            Ok(Label::Uninformative)
        } else {
            Err(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    pub label: Option<Label>,
}

impl Tweet {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Option<Label>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            label,
        }
    }
}

/// An ordered collection of tweets with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub name: String,
    items: Vec<Tweet>,
}

impl Dataset {
    /// Builds a dataset, checking id uniqueness and non-empty ids and texts.
    pub fn new(name: impl Into<String>, items: Vec<Tweet>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(items.len());
        for tweet in &items {
            if tweet.id.is_empty() {
                return Err(CorpusError::InvalidTweet {
                    id: tweet.id.clone(),
                    reason: "empty id",
                });
            }
            if tweet.text.trim().is_empty() {
                return Err(CorpusError::InvalidTweet {
                    id: tweet.id.clone(),
                    reason: "empty text",
                });
            }
            if !seen.insert(tweet.id.as_str()) {
                return Err(CorpusError::DuplicateId(tweet.id.clone()));
            }
        }
        Ok(Self {
            name: name.into(),
            items,
        })
    }

    pub fn items(&self) -> &[Tweet] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn is_labeled(&self) -> bool {
        self.items.iter().all(|t| t.label.is_some())
    }

    /// All labels, or `Unlabeled` naming the first tweet without one.
    pub fn labels(&self) -> Result<Vec<Label>, CorpusError> {
        self.items
            .iter()
            .map(|t| t.label.ok_or_else(|| CorpusError::Unlabeled(t.id.clone())))
            .collect()
    }

    pub fn ids(&self) -> Vec<String> {
        self.items.iter().map(|t| t.id.clone()).collect()
    }

    pub fn count_label(&self, label: Label) -> usize {
        self.items.iter().filter(|t| t.label == Some(label)).count()
    }

    /// Applies `f` to every text, keeping ids and labels.
    pub fn map_text<F: FnMut(&str) -> String>(&self, mut f: F) -> Result<Self, CorpusError> {
        let items = self
            .items
            .iter()
            .map(|t| Tweet::new(t.id.clone(), f(&t.text), t.label))
            .collect();
        Dataset::new(self.name.clone(), items)
    }

    /// Sub-dataset with the given item indices, in the given order.
    pub fn subset(&self, name: impl Into<String>, indices: &[usize]) -> Self {
        Self {
            name: name.into(),
            items: indices.iter().map(|&i| self.items[i].clone()).collect(),
        }
    }

    /// Appends another dataset, rejecting ids that collide.
    pub fn concat(mut self, other: Dataset) -> Result<Self, CorpusError> {
        self.items.extend(other.items);
        Dataset::new(self.name, self.items)
    }
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Reads a dataset from a TSV file. See [`parse_tsv`].
pub fn load_tsv(path: impl AsRef<Path>, has_labels: bool) -> Result<Dataset, CorpusError> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_tsv(&content, dataset_name(path), has_labels)
}

/// Parses TSV content in `id\ttext[\tlabel]` layout, preserving row order.
pub fn parse_tsv(
    content: &str,
    name: impl Into<String>,
    has_labels: bool,
) -> Result<Dataset, CorpusError> {
    let expected = if has_labels { 3 } else { 2 };
    let mut items = Vec::new();
    for (idx, raw) in content.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if idx == 0 && cols[0] == "id" {
            continue;
        }
        if cols.len() != expected {
            return Err(CorpusError::MalformedRow {
                line: line_no,
                expected,
                found: cols.len(),
            });
        }
        let label = if has_labels {
            let label = cols[2]
                .trim()
                .parse::<Label>()
                .map_err(|_| CorpusError::UnknownLabel {
                    line: line_no,
                    label: cols[2].to_string(),
                })?;
            Some(label)
        } else {
            None
        };
        items.push(Tweet::new(cols[0], cols[1], label));
    }
    if items.is_empty() {
        return Err(CorpusError::EmptyFile);
    }
    Dataset::new(name, items)
}

/// Serializes a dataset with a header row. The label column is written only
/// when every tweet carries a label.
pub fn to_tsv(data: &Dataset) -> Result<String, CorpusError> {
    let labeled = data.is_labeled();
    let mut out = String::from(if labeled { "id\ttext\tlabel\n" } else { "id\ttext\n" });
    for t in data.items() {
        for field in [&t.id, &t.text] {
            if field.contains(['\t', '\n', '\r']) {
                return Err(CorpusError::InvalidTweet {
                    id: t.id.clone(),
                    reason: "field contains a tab or line break",
                });
            }
        }
        out.push_str(&t.id);
        out.push('\t');
        out.push_str(&t.text);
        if let (true, Some(label)) = (labeled, t.label) {
            out.push('\t');
            out.push_str(label.as_str());
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_tsv(data: &Dataset, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let path = path.as_ref();
    fs::write(path, to_tsv(data)?).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Assignment of every dataset item to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub assignment: Vec<usize>,
}

impl FoldPlan {
    /// Indices of the items held out in `fold`, ascending.
    pub fn held_out(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    /// Indices of the items used for training when `fold` is held out.
    pub fn training(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Stratified k-fold assignment.
///
/// Each class is shuffled independently and dealt round-robin into the folds.
/// The deal counter carries over from one class to the next, so fold sizes
/// differ by at most one and every class count per fold is within one of its
/// proportional share.
pub fn stratified_folds(data: &Dataset, k: usize, seed: u64) -> Result<FoldPlan, CorpusError> {
    if k < 2 {
        return Err(CorpusError::KTooSmall(k));
    }
    if k > data.len() {
        return Err(CorpusError::KTooLarge { k, n: data.len() });
    }
    let labels = data.labels()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labels.len()];
    let mut next = 0usize;
    for class in [Label::Informative, Label::Uninformative] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next % k;
            next += 1;
        }
    }
    Ok(FoldPlan {
        k,
        seed,
        assignment,
    })
}

const PLACES: &[&str] = &[
    "Texas", "Ohio", "Lagos", "Mumbai", "Ontario", "Lombardy", "Madrid", "Queens",
    "Manila", "Victoria", "Bavaria", "Kerala", "Florida", "Gauteng", "Dublin",
];
const CASE_CUES: &[&str] = &[
    "cases", "deaths", "confirmed", "hospitalized", "recovered", "tested",
    "positive", "patients", "icu", "fatalities",
];
const REPORT_CUES: &[&str] = &[
    "reported", "announced", "officials", "update", "county", "ministry",
    "according", "total", "new", "health",
];
const OPINION_CUES: &[&str] = &[
    "lol", "honestly", "think", "feel", "hate", "love", "funny", "joke",
    "bored", "memes", "vibes", "ugh",
];
const MOOD_CUES: &[&str] = &[
    "quarantine", "netflix", "pizza", "nap", "sleep", "wine", "dog", "haircut",
    "zoom", "snacks",
];
const SHARED: &[&str] = &["covid", "coronavirus", "today", "the", "people", "now", "just"];
const EMOJI_TAILS: &[&str] = &["", "", " \u{1F637}", " \u{1F602}", " \u{1F64F}", " \u{1F622}"];

fn pick<'a, R: Rng>(rng: &mut R, words: &[&'a str]) -> &'a str {
    words[rng.random_range(0..words.len())]
}

fn synth_positive<R: Rng>(rng: &mut R) -> String {
    let n = rng.random_range(5..5000);
    let case = pick(rng, CASE_CUES);
    let place = pick(rng, PLACES);
    match rng.random_range(0..4) {
        0 => format!(
            "{} {n} {case} of {} in {place} {} HTTPURL",
            pick(rng, REPORT_CUES),
            pick(rng, SHARED),
            pick(rng, REPORT_CUES)
        ),
        1 => format!(
            "{place} {} {n} {case} and {} {} {} &amp; @USER",
            pick(rng, REPORT_CUES),
            rng.random_range(1..400),
            pick(rng, CASE_CUES),
            pick(rng, SHARED)
        ),
        2 => format!(
            "BREAKING: {} {case} in {place} rise to {n} {} {} HTTPURL",
            pick(rng, SHARED),
            pick(rng, REPORT_CUES),
            pick(rng, CASE_CUES)
        ),
        _ => format!(
            "{} {}: {n} {case}, {} {} in {place}",
            pick(rng, REPORT_CUES),
            pick(rng, SHARED),
            rng.random_range(1..90),
            pick(rng, CASE_CUES)
        ),
    }
}

fn synth_negative<R: Rng>(rng: &mut R) -> String {
    let opinion = pick(rng, OPINION_CUES);
    let mood = pick(rng, MOOD_CUES);
    match rng.random_range(0..4) {
        0 => format!(
            "{opinion} this {} {mood} is {} {} @USER",
            pick(rng, SHARED),
            pick(rng, OPINION_CUES),
            pick(rng, SHARED)
        ),
        1 => format!(
            "i {} {} {mood} {} &lt;3 {}",
            pick(rng, OPINION_CUES),
            pick(rng, SHARED),
            pick(rng, MOOD_CUES),
            opinion
        ),
        2 => format!(
            "{} day {} of {mood} and {opinion} {} HTTPURL",
            pick(rng, SHARED),
            rng.random_range(2..200),
            pick(rng, OPINION_CUES)
        ),
        _ => format!(
            "{opinion} {} {mood} {} {}",
            pick(rng, MOOD_CUES),
            pick(rng, SHARED),
            pick(rng, OPINION_CUES)
        ),
    }
}

/// Number of positives generated by [`synth_corpus`] before label noise:
/// `floor(n * positive_rate)`.
pub fn synth_positive_count(n: usize, positive_rate: f64) -> usize {
    // The small bias absorbs representation error such as 10 * 0.4.
    ((n as f64 * positive_rate) + 1e-9).floor() as usize
}

/// Generates a synthetic tweet corpus that is separable by cue words.
///
/// Positive tweets mention case counts, places and reporting words; negative
/// tweets carry opinion and leisure words. Both share filler words, `@USER`,
/// `HTTPURL`, escaped HTML and emoji so the preprocessing path is exercised.
/// Each label is flipped with probability `noise_rate`.
///
/// # Panics
///
/// Panics if `positive_rate` is outside (0, 1) or `noise_rate` outside [0, 0.5).
pub fn synth_corpus(n: usize, positive_rate: f64, noise_rate: f64, seed: u64) -> Dataset {
    assert!(n > 0, "n must be positive");
    assert!(
        positive_rate > 0.0 && positive_rate < 1.0,
        "positive_rate must be in (0, 1)"
    );
    assert!(
        (0.0..0.5).contains(&noise_rate),
        "noise_rate must be in [0, 0.5)"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Separate stream so the texts do not depend on the noise rate.
    let mut noise_rng = ChaCha8Rng::seed_from_u64(seed);
    noise_rng.set_stream(1);
    let n_pos = synth_positive_count(n, positive_rate);
    let mut labels: Vec<Label> = (0..n).map(|i| Label::from_positive(i < n_pos)).collect();
    labels.shuffle(&mut rng);
    let items = labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let mut text = if label.is_positive() {
                synth_positive(&mut rng)
            } else {
                synth_negative(&mut rng)
            };
            text.push_str(pick(&mut rng, EMOJI_TAILS));
            let observed = if noise_rate > 0.0 && noise_rng.random_bool(noise_rate) {
                label.flipped()
            } else {
                label
            };
            Tweet::new(format!("s{i:05}"), text, Some(observed))
        })
        .collect();
    Dataset::new(format!("synth-{n}-{seed}"), items).expect("synthetic ids are unique")
}
