//! Trains one cross-validation fold with adversarial training, saves the
//! checkpoint and checks that the reloaded model predicts identically.
//!
//! ```text
//! cargo run --release --example train_fold
//! ```

use advtext::advtrain::{encode_dataset, train_fold, TrainConfig};
use advtext::corpus::{stratified_folds, synth_corpus};
use advtext::emoji_data::shipped_table;
use advtext::pipeline::{fold_split, fold_vocab, preprocess_dataset};
use advtext::textmodel::{load_checkpoint, predict_probs, save_checkpoint};

fn main() -> advtext::Result<()> {
    let data = preprocess_dataset(&synth_corpus(1000, 0.47, 0.05, 3), &shipped_table())?;
    let plan = stratified_folds(&data, 5, 0)?;
    let (train, valid) = fold_split(&data, &plan, 0);

    let cfg = TrainConfig::adversarial(1.0);
    let vocab = fold_vocab(&train, &cfg)?;
    println!(
        "train {} / valid {}, vocabulary {} tokens",
        train.len(),
        valid.len(),
        vocab.len()
    );
    let result = train_fold(&train, &valid, &vocab, &cfg)?;
    for (epoch, f1) in result.history.iter().enumerate() {
        println!("epoch {}  valid F1 {f1:.4}", epoch + 1);
    }
    println!(
        "best epoch {}, stopped after {}",
        result.best_epoch, result.stopped_epoch
    );

    let path = std::env::temp_dir().join("advtext-fold0.bin");
    save_checkpoint(&path, &result.params, &vocab)?;
    let (params, loaded_vocab) = load_checkpoint(&path)?;
    assert_eq!(loaded_vocab, vocab);
    let probs = predict_probs(&params, &encode_dataset(&valid, &loaded_vocab, params.hyper.max_len))?;
    assert_eq!(probs, result.oof);
    println!("checkpoint {} reproduces all {} OOF probabilities", path.display(), probs.len());
    Ok(())
}
