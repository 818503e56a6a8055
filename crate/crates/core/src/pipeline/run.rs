use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::io::{format_folds, format_history, format_probs, read_probs, write_string};
use super::manifest::{
    AnalysisRecord, EnsembleRecord, FoldRecord, RunManifest, VariantRecord, MANIFEST_FILE,
    MANIFEST_VERSION,
};
use super::{ExperimentConfig, Variant};
use crate::advtrain::{train_fold, FoldResult, TrainConfig};
use crate::corpus::{stratified_folds, to_tsv, Dataset, FoldPlan, Label};
use crate::emoji_data::format_emoji_table;
use crate::ensemble::{apply_threshold, mean_of, optimize_threshold};
use crate::error::{Error, Result};
use crate::evalkit::{disagreement, precision_recall_f1, top_k_losses, top_k_tsv, Scores};
use crate::preprocess::{preprocess_text, EmojiTable};
use crate::textmodel::{build_vocab, load_checkpoint, save_checkpoint, Vocab};

const TOP_LOSSES: usize = 20;

/// Applies the full text normalization to every tweet.
pub fn preprocess_dataset(data: &Dataset, table: &EmojiTable) -> Result<Dataset> {
    Ok(data.map_text(|t| preprocess_text(t, table))?)
}

/// Training and held-out splits for `fold`, each in dataset order.
pub fn fold_split(data: &Dataset, plan: &FoldPlan, fold: usize) -> (Dataset, Dataset) {
    let train = data.subset(format!("{}-train{fold}", data.name), &plan.training(fold));
    let valid = data.subset(format!("{}-fold{fold}", data.name), &plan.held_out(fold));
    (train, valid)
}

/// Vocabulary built from a training split only.
pub fn fold_vocab(train: &Dataset, cfg: &TrainConfig) -> Result<Vocab> {
    let texts = train.items().iter().map(|t| t.text.as_str());
    Ok(build_vocab(texts, cfg.min_freq, cfg.max_vocab)?)
}

/// Builds the fold's vocabulary and trains on it.
pub fn train_cv_fold(
    data: &Dataset,
    plan: &FoldPlan,
    fold: usize,
    cfg: &TrainConfig,
) -> Result<FoldResult> {
    let (train, valid) = fold_split(data, plan, fold);
    let vocab = fold_vocab(&train, cfg)?;
    Ok(train_fold(&train, &valid, &vocab, cfg)?)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hex SHA-256 over a fold's training and held-out rows.
fn split_fingerprint(train: &Dataset, valid: &Dataset) -> String {
    let mut h = Sha256::new();
    for (tag, part) in [("train", train), ("valid", valid)] {
        h.update(tag.as_bytes());
        h.update(b"\n");
        for t in part.items() {
            let label = t.label.map(Label::as_str).unwrap_or("");
            h.update(format!("{}\t{}\t{}\n", t.id, t.text, label).as_bytes());
        }
    }
    hex(&h.finalize())
}

/// Written last into a fold directory; its presence marks the fold done.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FoldSummary {
    format_version: u32,
    variant: String,
    fold: usize,
    k: usize,
    train: TrainConfig,
    data_fingerprint: String,
    vocab_fingerprint: String,
    vocab_size: usize,
    train_size: usize,
    held_out: usize,
    best_epoch: usize,
    stopped_epoch: usize,
    history: Vec<f64>,
}

struct FoldOutcome {
    record: FoldRecord,
    oof: Vec<f64>,
}

fn fold_record(rel: &str, s: &FoldSummary) -> FoldRecord {
    FoldRecord {
        fold: s.fold,
        checkpoint: format!("{rel}/checkpoint.bin"),
        history: format!("{rel}/history.tsv"),
        oof: format!("{rel}/oof.tsv"),
        summary: format!("{rel}/summary.json"),
        vocab_fingerprint: s.vocab_fingerprint.clone(),
        vocab_size: s.vocab_size,
        train_size: s.train_size,
        held_out: s.held_out,
        best_epoch: s.best_epoch,
        stopped_epoch: s.stopped_epoch,
        best_f1: s.history[s.best_epoch - 1],
    }
}

/// A completed fold from an earlier run, if it matches what would be trained now.
fn resume_fold(root: &Path, rel: &str, expected: &FoldSummary, valid: &Dataset) -> Option<FoldOutcome> {
    let text = fs::read_to_string(root.join(rel).join("summary.json")).ok()?;
    let found: FoldSummary = serde_json::from_str(&text).ok()?;
    let same = found.format_version == expected.format_version
        && found.variant == expected.variant
        && found.fold == expected.fold
        && found.k == expected.k
        && found.train == expected.train
        && found.data_fingerprint == expected.data_fingerprint;
    if !same || found.history.is_empty() || found.best_epoch == 0 {
        return None;
    }
    let record = fold_record(rel, &found);
    let (_, vocab) = load_checkpoint(root.join(&record.checkpoint)).ok()?;
    if vocab.fingerprint() != found.vocab_fingerprint {
        return None;
    }
    let (ids, oof) = read_probs(root.join(&record.oof)).ok()?;
    if ids != valid.ids() {
        return None;
    }
    Some(FoldOutcome { record, oof })
}

fn run_fold(
    root: &Path,
    data: &Dataset,
    plan: &FoldPlan,
    variant: &Variant,
    fold: usize,
    resume: bool,
) -> Result<FoldOutcome> {
    let rel = format!("{}/fold{fold}", variant.name);
    let (train, valid) = fold_split(data, plan, fold);
    let mut summary = FoldSummary {
        format_version: MANIFEST_VERSION,
        variant: variant.name.clone(),
        fold,
        k: plan.k,
        train: variant.train.clone(),
        data_fingerprint: split_fingerprint(&train, &valid),
        vocab_fingerprint: String::new(),
        vocab_size: 0,
        train_size: train.len(),
        held_out: valid.len(),
        best_epoch: 0,
        stopped_epoch: 0,
        history: Vec::new(),
    };
    if resume {
        if let Some(done) = resume_fold(root, &rel, &summary, &valid) {
            log::info!("{rel}: reusing completed fold");
            return Ok(done);
        }
    }

    let start = Instant::now();
    let vocab = fold_vocab(&train, &variant.train)?;
    let result = train_fold(&train, &valid, &vocab, &variant.train)?;
    summary.vocab_fingerprint = vocab.fingerprint();
    summary.vocab_size = vocab.len();
    summary.best_epoch = result.best_epoch;
    summary.stopped_epoch = result.stopped_epoch;
    summary.history = result.history.clone();
    log::info!(
        "{rel}: best epoch {} f1 {:.4} ({:.1}s)",
        result.best_epoch,
        result.history[result.best_epoch - 1],
        start.elapsed().as_secs_f64()
    );

    let dir = root.join(&rel);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    // A stale summary must not vouch for half-written artifacts.
    let summary_path = dir.join("summary.json");
    if summary_path.exists() {
        fs::remove_file(&summary_path).map_err(|e| Error::io(&summary_path, e))?;
    }
    let record = fold_record(&rel, &summary);
    save_checkpoint(root.join(&record.checkpoint), &result.params, &vocab)?;
    write_string(root.join(&record.history), &format_history(&result.history))?;
    write_string(root.join(&record.oof), &format_probs(&valid.ids(), &result.oof))?;
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_string(&summary_path, &json)?;
    Ok(FoldOutcome {
        record,
        oof: result.oof,
    })
}

/// Runs `f(0..n)` on up to `jobs` threads; results come back in index order.
fn run_tasks<T: Send>(n: usize, jobs: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    if jobs <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..n).map(|_| Mutex::new(None)).collect();
    thread::scope(|s| {
        for _ in 0..jobs.min(n) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let out = f(i);
                *slots[i].lock().expect("task slot") = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("task slot").expect("task ran"))
        .collect()
}

/// Places each fold's held-out probabilities at their dataset positions,
/// checking that every sample is predicted exactly once.
fn assemble_oof(plan: &FoldPlan, folds: &[FoldOutcome]) -> Result<Vec<f64>> {
    let mut oof: Vec<Option<f64>> = vec![None; plan.assignment.len()];
    for outcome in folds {
        let held = plan.held_out(outcome.record.fold);
        if held.len() != outcome.oof.len() {
            return Err(Error::Manifest(format!(
                "fold {} predicted {} samples, holds out {}",
                outcome.record.fold,
                outcome.oof.len(),
                held.len()
            )));
        }
        for (&i, &p) in held.iter().zip(&outcome.oof) {
            if oof[i].replace(p).is_some() {
                return Err(Error::Manifest(format!("sample {i} predicted twice")));
            }
        }
    }
    oof.into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| Error::Manifest(format!("sample {i} has no OOF prediction"))))
        .collect()
}

/// Tuned threshold and the metrics it yields.
fn tune(probs: &[f64], gold: &[Label]) -> Result<(crate::ensemble::ThresholdReport, Scores)> {
    let report = optimize_threshold(probs, gold)?;
    let scores = precision_recall_f1(&apply_threshold(probs, report.threshold), gold)?;
    debug_assert_eq!(scores.f1, report.f1_at_threshold);
    Ok((report, scores))
}

/// Cross-validates every variant, ensembles them and writes the run
/// directory, ending with `manifest.json`.
pub fn run_cv(cfg: &ExperimentConfig) -> Result<RunManifest> {
    cfg.validate()?;
    let root = cfg
        .output_dir
        .as_deref()
        .ok_or_else(|| Error::Config("output_dir is required".into()))?;
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let start = Instant::now();

    let table = cfg.load_emoji_table()?;
    let data = preprocess_dataset(&cfg.load_data()?, &table)?;
    let gold = data.labels()?;
    let ids = data.ids();
    let plan = stratified_folds(&data, cfg.k, cfg.fold_seed)?;
    log::info!(
        "{} samples ({} informative), {} folds, {} variants",
        data.len(),
        data.count_label(Label::Informative),
        cfg.k,
        cfg.variants.len()
    );

    write_string(root.join("corpus.tsv"), &to_tsv(&data)?)?;
    write_string(root.join("emoji.tsv"), &format_emoji_table(&table))?;
    write_string(root.join("folds.tsv"), &format_folds(&ids, &plan))?;

    let k = cfg.k;
    let outcomes = run_tasks(cfg.variants.len() * k, cfg.jobs, |t| {
        run_fold(root, &data, &plan, &cfg.variants[t / k], t % k, cfg.resume)
    });
    let mut outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?.into_iter();

    let mut variants = Vec::new();
    let mut variant_oof = Vec::new();
    for v in &cfg.variants {
        let folds: Vec<FoldOutcome> = outcomes.by_ref().take(k).collect();
        let oof = assemble_oof(&plan, &folds)?;
        let (threshold, metrics) = tune(&oof, &gold)?;
        log::info!(
            "{}: OOF f1 {:.4} at threshold {:.4}",
            v.name,
            metrics.f1,
            threshold.threshold
        );
        let path = format!("{}/oof.tsv", v.name);
        write_string(root.join(&path), &format_probs(&ids, &oof))?;
        variants.push(VariantRecord {
            name: v.name.clone(),
            train: v.train.clone(),
            folds: folds.into_iter().map(|f| f.record).collect(),
            oof: path,
            threshold,
            metrics,
        });
        variant_oof.push(oof);
    }

    let members = cfg.ensemble_members();
    let member_oof: Vec<&[f64]> = members
        .iter()
        .map(|m| {
            let i = cfg.variants.iter().position(|v| &v.name == m).expect("validated");
            variant_oof[i].as_slice()
        })
        .collect();
    let ensemble_oof = mean_of(&member_oof)?;
    let (threshold, metrics) = tune(&ensemble_oof, &gold)?;
    log::info!(
        "ensemble: OOF f1 {:.4} at threshold {:.4}",
        metrics.f1,
        threshold.threshold
    );
    let ensemble_path = "ensemble/oof.tsv".to_string();
    write_string(root.join(&ensemble_path), &format_probs(&ids, &ensemble_oof))?;

    let analysis = if members.len() >= 2 {
        let a = variants_named(&variants, &members[0]);
        let b = variants_named(&variants, &members[1]);
        let pred_a = apply_threshold(member_oof[0], a.threshold.threshold);
        let pred_b = apply_threshold(member_oof[1], b.threshold.threshold);
        let report = disagreement(&pred_a, &pred_b, &gold, &ids)?;
        let top = top_k_losses(&ensemble_oof, &gold, &ids, TOP_LOSSES.min(ids.len()))?;
        let record = AnalysisRecord {
            a: a.name.clone(),
            b: b.name.clone(),
            errors_a: report.errors_a,
            errors_b: report.errors_b,
            a_wrong_b_right: report.a_wrong_b_right,
            b_wrong_a_right: report.b_wrong_a_right,
            both_wrong: report.both_wrong,
            disagreement: "analysis/disagreement.tsv".into(),
            top_losses: "analysis/top_losses.tsv".into(),
        };
        write_string(root.join(&record.disagreement), &report.to_tsv())?;
        write_string(root.join(&record.top_losses), &top_k_tsv(&top))?;
        Some(record)
    } else {
        None
    };

    let manifest = RunManifest {
        format_version: MANIFEST_VERSION,
        config: cfg.snapshot(),
        n_samples: data.len(),
        n_positive: data.count_label(Label::Informative),
        corpus: "corpus.tsv".into(),
        emoji_table: "emoji.tsv".into(),
        folds: "folds.tsv".into(),
        oof_order: ids,
        variants,
        ensemble: EnsembleRecord {
            members,
            oof: ensemble_path,
            threshold,
            metrics,
        },
        analysis,
    };
    manifest.save(root.join(MANIFEST_FILE))?;
    log::info!("run finished in {:.1}s", start.elapsed().as_secs_f64());
    Ok(manifest)
}

fn variants_named<'a>(variants: &'a [VariantRecord], name: &str) -> &'a VariantRecord {
    variants.iter().find(|v| v.name == name).expect("validated")
}
