use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use advtext::advtrain::TrainConfig;
use advtext::corpus::{load_tsv, stratified_folds, synth_corpus, write_tsv, FoldPlan};
use advtext::emoji_data::{load_emoji_table, shipped_table};
use advtext::ensemble::{apply_threshold, optimize_threshold, EnsembleError, PredictionMatrix};
use advtext::evalkit::{disagreement, precision_recall_f1, top_k_losses, top_k_tsv};
use advtext::pipeline::io::{
    format_history, gold_for, read_folds, read_predictions, read_probs, write_folds,
    write_labels, write_probs, Predictions,
};
use advtext::pipeline::{
    predict_unlabeled, preprocess_dataset, run_cv, train_cv_fold, ExperimentConfig, RunManifest,
};
use advtext::textmodel::save_checkpoint;
use advtext::{Error, Result};

#[derive(Parser)]
#[command(name = "advtext", version, about = "Adversarially trained informative-tweet classifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Fold,
    Model,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full cross-validation experiment from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Retrain folds even if completed ones exist.
        #[arg(long)]
        no_resume: bool,
    },
    /// Label unlabeled tweets with a finished run's ensemble.
    Predict {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Input has a label column, which is ignored.
        #[arg(long)]
        labeled: bool,
        /// Also write ensemble probabilities here.
        #[arg(long)]
        probs: Option<PathBuf>,
    },
    /// Normalize tweet texts.
    Preprocess {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        emoji_table: Option<PathBuf>,
        #[arg(long)]
        unlabeled: bool,
    },
    /// Assign a labeled dataset to stratified folds (`id\tfold`).
    Folds {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the model for one held-out fold.
    TrainFold {
        /// Preprocessed labeled data.
        #[arg(long)]
        data: PathBuf,
        /// `id\tfold` file from `folds`.
        #[arg(long)]
        folds: PathBuf,
        #[arg(long)]
        fold: usize,
        /// TrainConfig JSON; defaults otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        adversarial: bool,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Average `id\tprob` files.
    Ensemble {
        #[arg(long, value_enum)]
        level: Level,
        #[arg(long)]
        out: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Find the F1-maximizing threshold for out-of-fold probabilities.
    TuneThreshold {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
    },
    /// Score predictions (probabilities or labels) against gold labels.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Applied to probability files.
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
    },
    /// Rank per-sample losses and compare two prediction sets.
    Analyze {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred_a: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold_a: f64,
        #[arg(long)]
        pred_b: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        threshold_b: f64,
        #[arg(long, default_value_t = 20)]
        top_k: usize,
        /// Write top_losses.tsv and disagreement.tsv here instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Generate a synthetic labeled corpus.
    Synth {
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 0.47)]
        positive_rate: f64,
        #[arg(long, default_value_t = 0.0)]
        noise_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Run {
            config,
            out,
            jobs,
            no_resume,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if out.is_some() {
                cfg.output_dir = out;
            }
            if let Some(j) = jobs {
                cfg.jobs = j;
            }
            cfg.resume &= !no_resume;
            let m = run_cv(&cfg)?;
            for v in &m.variants {
                println!("{}\tf1 {:.6}\tthreshold {}", v.name, v.metrics.f1, v.threshold.threshold);
            }
            println!(
                "ensemble\tf1 {:.6}\tthreshold {}",
                m.ensemble.metrics.f1, m.ensemble.threshold.threshold
            );
        }
        Command::Predict {
            manifest,
            input,
            out,
            labeled,
            probs,
        } => {
            let m = RunManifest::load(&manifest)?;
            let root = manifest.parent().unwrap_or(std::path::Path::new("."));
            let data = load_tsv(&input, labeled)?;
            let preds = predict_unlabeled(&m, root, &data)?;
            write_labels(&out, &preds.ids, &preds.labels)?;
            if let Some(p) = probs {
                write_probs(p, &preds.ids, &preds.probs)?;
            }
        }
        Command::Preprocess {
            input,
            out,
            emoji_table,
            unlabeled,
        } => {
            let table = match emoji_table {
                Some(p) => load_emoji_table(p)?,
                None => shipped_table(),
            };
            let data = load_tsv(&input, !unlabeled)?;
            write_tsv(&preprocess_dataset(&data, &table)?, &out)?;
        }
        Command::Folds { input, k, seed, out } => {
            let data = load_tsv(&input, true)?;
            let plan = stratified_folds(&data, k, seed)?;
            write_folds(&out, &data.ids(), &plan)?;
        }
        Command::TrainFold {
            data,
            folds,
            fold,
            config,
            adversarial,
            epsilon,
            out,
        } => {
            let mut cfg: TrainConfig = match &config {
                Some(p) => read_json(p)?,
                None => TrainConfig::default(),
            };
            cfg.adversarial |= adversarial;
            if let Some(e) = epsilon {
                cfg.epsilon = e;
            }
            let data = load_tsv(&data, true)?;
            let (fold_ids, assignment) = read_folds(&folds)?;
            if fold_ids != data.ids() {
                return Err(EnsembleError::MisalignedIds.into());
            }
            let k = assignment.iter().max().map_or(0, |m| m + 1);
            if fold >= k {
                return Err(usage(format!("fold {fold} out of range for {k} folds")));
            }
            let plan = FoldPlan {
                k,
                seed: 0,
                assignment,
            };
            let result = train_cv_fold(&data, &plan, fold, &cfg)?;
            fs::create_dir_all(&out).map_err(|source| Error::Io {
                path: out.clone(),
                source,
            })?;
            save_checkpoint(out.join("checkpoint.bin"), &result.params, &result.vocab)?;
            let history = out.join("history.tsv");
            fs::write(&history, format_history(&result.history))
                .map_err(|source| Error::Io { path: history, source })?;
            let held: Vec<String> = plan.held_out(fold).iter().map(|&i| data.items()[i].id.clone()).collect();
            write_probs(out.join("oof.tsv"), &held, &result.oof)?;
            println!(
                "best epoch {} of {}\tf1 {:.6}",
                result.best_epoch,
                result.stopped_epoch,
                result.history[result.best_epoch - 1]
            );
        }
        Command::Ensemble { level, out, inputs } => {
            if matches!(level, Level::Model) && inputs.len() < 2 {
                return Err(usage("model-level ensembling needs at least two inputs"));
            }
            // Each file is one labelled run; naming a file twice is an error.
            let (ids, first) = read_probs(&inputs[0])?;
            let mut runs = PredictionMatrix::new(ids);
            runs.add_run(&inputs[0].display().to_string(), first)?;
            for p in &inputs[1..] {
                let (other_ids, probs) = read_probs(p)?;
                if other_ids != runs.ids() {
                    return Err(EnsembleError::MisalignedIds.into());
                }
                runs.add_run(&p.display().to_string(), probs)?;
            }
            write_probs(&out, runs.ids(), &runs.mean()?)?;
        }
        Command::TuneThreshold { pred, gold } => {
            let (ids, probs) = read_probs(&pred)?;
            let gold = gold_for(&ids, &load_tsv(&gold, true)?)?;
            let r = optimize_threshold(&probs, &gold)?;
            println!("threshold\t{}", r.threshold);
            println!("f1\t{:.6}", r.f1_at_threshold);
            println!("candidates\t{}", r.candidates_examined);
        }
        Command::Evaluate {
            pred,
            gold,
            threshold,
        } => {
            let (ids, preds) = read_predictions(&pred)?;
            let gold = gold_for(&ids, &load_tsv(&gold, true)?)?;
            let labels = match preds {
                Predictions::Labels(l) => l,
                Predictions::Probs(p) => apply_threshold(&p, threshold),
            };
            print!("{}", precision_recall_f1(&labels, &gold)?.report());
        }
        Command::Analyze {
            gold,
            pred_a,
            threshold_a,
            pred_b,
            threshold_b,
            top_k,
            out_dir,
        } => {
            let (ids, probs_a) = read_probs(&pred_a)?;
            let gold = gold_for(&ids, &load_tsv(&gold, true)?)?;
            let top = top_k_losses(&probs_a, &gold, &ids, top_k.min(ids.len()))?;
            let mut outputs = vec![("top_losses.tsv", top_k_tsv(&top))];
            if let Some(pb) = pred_b {
                let (ids_b, probs_b) = read_probs(&pb)?;
                if ids_b != ids {
                    return Err(EnsembleError::MisalignedIds.into());
                }
                let report = disagreement(
                    &apply_threshold(&probs_a, threshold_a),
                    &apply_threshold(&probs_b, threshold_b),
                    &gold,
                    &ids,
                )?;
                print!("{}", report.summary("A", "B"));
                outputs.push(("disagreement.tsv", report.to_tsv()));
            }
            match out_dir {
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|source| Error::Io {
                        path: dir.clone(),
                        source,
                    })?;
                    for (name, text) in outputs {
                        let path = dir.join(name);
                        fs::write(&path, text).map_err(|source| Error::Io { path, source })?;
                    }
                }
                None => outputs.iter().for_each(|(_, text)| print!("{text}")),
            }
        }
        Command::Synth {
            n,
            positive_rate,
            noise_rate,
            seed,
            out,
        } => {
            if n == 0 || !(positive_rate > 0.0 && positive_rate < 1.0) || !(0.0..0.5).contains(&noise_rate) {
                return Err(usage("need n > 0, positive_rate in (0, 1), noise_rate in [0, 0.5)"));
            }
            write_tsv(&synth_corpus(n, positive_rate, noise_rate, seed), &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
