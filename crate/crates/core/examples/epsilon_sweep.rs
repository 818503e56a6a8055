//! Sensitivity of adversarial training to epsilon on a noisy synthetic
//! corpus: out-of-fold F1 of 5-fold cross-validation per epsilon.
//!
//! Epsilon is an absolute norm on the embedded sequence, so its effect
//! depends on the embedding scale (rows start at unit expected norm).
//!
//! ```text
//! cargo run --release --example epsilon_sweep [-- <noise-rate>]
//! ```

use advtext::advtrain::TrainConfig;
use advtext::pipeline::{run_cv, DataSource, ExperimentConfig, Variant};

fn main() -> advtext::Result<()> {
    let noise_rate: f64 = std::env::args()
        .nth(1)
        .map_or(0.1, |a| a.parse().expect("noise rate must be a number"));
    let out = std::env::temp_dir().join("advtext-epsilon-sweep");

    let mut cfg = ExperimentConfig::new(DataSource::Synthetic {
        n: 1000,
        positive_rate: 0.47,
        noise_rate,
        seed: 17,
    });
    cfg.variants = [0.0, 0.1, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&eps| Variant {
            name: format!("eps{}", eps).replace('.', "_"),
            train: TrainConfig::adversarial(eps),
        })
        .collect();
    cfg.output_dir = Some(out.clone());
    cfg.jobs = std::thread::available_parallelism().map_or(1, |n| n.get());

    let manifest = run_cv(&cfg)?;
    println!("noise rate {noise_rate}");
    println!("variant\tF1@tuned\tthreshold\tmean best epoch");
    for v in &manifest.variants {
        let epochs = v.folds.iter().map(|f| f.best_epoch as f64).sum::<f64>() / v.folds.len() as f64;
        println!(
            "{}\t{:.4}\t{:.4}\t{epochs:.1}",
            v.name, v.metrics.f1, v.threshold.threshold
        );
    }
    println!("artifacts in {}", out.display());
    Ok(())
}
