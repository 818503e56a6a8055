//! Error analysis between two thresholded ensembles: where each is wrong,
//! where only one is, and which samples carry the largest loss.
//!
//! ```text
//! cargo run --example error_analysis
//! ```

use advtext::corpus::Label;
use advtext::ensemble::{apply_threshold, model_average};
use advtext::evalkit::{disagreement, per_sample_bce, precision_recall_f1, top_k_losses, top_k_tsv};

fn main() -> advtext::Result<()> {
    use Label::{Informative as P, Uninformative as N};
    let ids: Vec<String> = (1..=10).map(|i| format!("tweet{i:02}")).collect();
    let gold = [P, P, P, P, N, N, N, N, P, N];
    let probs_a = [0.91, 0.62, 0.45, 0.30, 0.10, 0.52, 0.20, 0.05, 0.77, 0.49];
    let probs_b = [0.88, 0.41, 0.58, 0.35, 0.12, 0.47, 0.61, 0.08, 0.81, 0.30];
    let (theta_a, theta_b) = (0.5, 0.45);

    let pred_a = apply_threshold(&probs_a, theta_a);
    let pred_b = apply_threshold(&probs_b, theta_b);
    for (name, pred) in [("plain", &pred_a), ("adv", &pred_b)] {
        print!("{name}\n{}", precision_recall_f1(pred, &gold)?.report());
    }

    let report = disagreement(&pred_a, &pred_b, &gold, &ids)?;
    println!("{}", report.summary("plain", "adv"));
    assert_eq!(
        report.errors_a - report.a_wrong_b_right,
        report.errors_b - report.b_wrong_a_right
    );
    print!("{}", report.to_tsv());

    let averaged = model_average(&probs_a, &probs_b)?;
    let losses = per_sample_bce(&averaged, &gold)?;
    println!(
        "mean ensemble loss {:.4}",
        losses.iter().sum::<f64>() / losses.len() as f64
    );
    print!("{}", top_k_tsv(&top_k_losses(&averaged, &gold, &ids, 3)?));
    Ok(())
}
