//! Full experiment on a synthetic corpus: 5-fold CV of a plain and an
//! adversarial variant, model-level ensemble, then prediction on fresh
//! unlabeled tweets from the saved run directory.
//!
//! ```text
//! cargo run --release --example cross_validation [-- <output-dir>]
//! ```

use std::path::PathBuf;
use std::time::Instant;

use advtext::corpus::{synth_corpus, Dataset, Tweet};
use advtext::pipeline::{predict_unlabeled, run_cv, DataSource, ExperimentConfig, RunManifest, MANIFEST_FILE};

fn main() -> advtext::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("advtext-cv"));

    let mut cfg = ExperimentConfig::new(DataSource::Synthetic {
        n: 2000,
        positive_rate: 0.47,
        noise_rate: 0.0,
        seed: 7,
    });
    cfg.output_dir = Some(out.clone());
    cfg.resume = false;

    let start = Instant::now();
    let manifest = run_cv(&cfg)?;
    println!("cross-validation took {:.1}s", start.elapsed().as_secs_f64());
    for v in &manifest.variants {
        println!(
            "{:<6} OOF F1 {:.4} at threshold {:.4}",
            v.name, v.metrics.f1, v.threshold.threshold
        );
    }
    println!(
        "ensemble OOF F1 {:.4} at threshold {:.4}",
        manifest.ensemble.metrics.f1, manifest.ensemble.threshold.threshold
    );
    if let Some(a) = &manifest.analysis {
        println!(
            "{} errors {}, {} errors {}, both wrong {}",
            a.a, a.errors_a, a.b, a.errors_b, a.both_wrong
        );
    }

    // Reload the run from disk as a separate process would.
    let manifest = RunManifest::load(out.join(MANIFEST_FILE))?;
    let fresh = synth_corpus(6, 0.5, 0.0, 99);
    let unlabeled = Dataset::new(
        "fresh",
        fresh
            .items()
            .iter()
            .map(|t| Tweet::new(t.id.clone(), t.text.clone(), None))
            .collect(),
    )?;
    let preds = predict_unlabeled(&manifest, &out, &unlabeled)?;
    for ((t, p), l) in fresh.items().iter().zip(&preds.probs).zip(&preds.labels) {
        println!("{:.3} {:<13} (truth {:<13}) {}", p, l, t.label.unwrap(), t.text);
    }
    println!("run directory: {}", out.display());
    Ok(())
}
