//! Stratified k-fold assignment on a synthetic corpus, with per-fold class
//! counts and the training/held-out split sizes.
//!
//! ```text
//! cargo run --example stratified_folds [-- <k> <seed>]
//! ```

use advtext::corpus::{stratified_folds, synth_corpus, Label};

fn main() -> advtext::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().map_or(5, |a| a.parse().expect("k must be an integer"));
    let seed: u64 = args.next().map_or(0, |a| a.parse().expect("seed must be an integer"));

    let data = synth_corpus(103, 0.4, 0.0, 11);
    let labels = data.labels()?;
    let plan = stratified_folds(&data, k, seed)?;
    let total_pos = data.count_label(Label::Informative);
    println!(
        "{} samples, {} informative, k={k}, seed={seed}",
        data.len(),
        total_pos
    );
    println!("fold\tsize\tinformative\texpected\ttrain");
    for f in 0..k {
        let held = plan.held_out(f);
        let pos = held.iter().filter(|&&i| labels[i].is_positive()).count();
        let expected = held.len() as f64 * total_pos as f64 / data.len() as f64;
        println!(
            "{f}\t{}\t{pos}\t{expected:.2}\t{}",
            held.len(),
            plan.training(f).len()
        );
    }
    // Same seed, same plan.
    assert_eq!(stratified_folds(&data, k, seed)?, plan);
    Ok(())
}
