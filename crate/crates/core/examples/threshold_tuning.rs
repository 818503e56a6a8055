//! Fold-level and model-level averaging of noisy probability runs, then
//! the F1-optimal decision threshold on the averaged vector.
//!
//! ```text
//! cargo run --example threshold_tuning
//! ```

use advtext::corpus::Label;
use advtext::ensemble::{
    apply_threshold, fold_average, model_average, optimize_threshold, PredictionMatrix,
};
use advtext::evalkit::precision_recall_f1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> advtext::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let n = 400;
    let gold: Vec<Label> = (0..n).map(|_| Label::from_positive(rng.random_bool(0.45))).collect();
    let ids: Vec<String> = (0..n).map(|i| format!("t{i:03}")).collect();

    // Two "models", five folds each: shifted and noisy copies of the truth.
    let mut variant = |shift: f64, spread: f64| -> advtext::Result<Vec<f64>> {
        let mut runs = PredictionMatrix::new(ids.clone());
        for fold in 0..5 {
            let probs = gold
                .iter()
                .map(|g| {
                    let centre = if g.is_positive() { 0.6 } else { 0.35 } + shift;
                    (centre + rng.random_range(-spread..spread)).clamp(0.0, 1.0)
                })
                .collect();
            runs.add_run(&format!("fold{fold}"), probs)?;
        }
        Ok(fold_average(&runs)?)
    };
    let plain = variant(-0.05, 0.5)?;
    let adv = variant(0.03, 0.45)?;
    let both = model_average(&plain, &adv)?;

    for (name, probs) in [("plain", &plain), ("adv", &adv), ("ensemble", &both)] {
        let at_half = precision_recall_f1(&apply_threshold(probs, 0.5), &gold)?;
        let tuned = optimize_threshold(probs, &gold)?;
        println!(
            "{name:<8} F1@0.5 {:.4}  tuned threshold {:.4} -> F1 {:.4} ({} candidates)",
            at_half.f1, tuned.threshold, tuned.f1_at_threshold, tuned.candidates_examined
        );
    }
    Ok(())
}
