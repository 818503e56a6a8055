//! One fast-gradient perturbation of an embedded tweet: its size and
//! direction, and how it moves the loss as epsilon grows.
//!
//! ```text
//! cargo run --example fgm_perturbation
//! ```

use advtext::advtrain::{adversarial_loss, adversarial_perturbation};
use advtext::corpus::Label;
use advtext::textmodel::{backward, bce_loss, build_vocab, forward, ModelHyper, ModelParams};

fn main() -> advtext::Result<()> {
    let texts = ["12 new cases confirmed in the county", "this lockdown is a joke lol"];
    let vocab = build_vocab(texts.iter().copied(), 1, 100)?;
    let hyper = ModelHyper {
        vocab_size: vocab.len(),
        dim: 16,
        max_len: 10,
    };
    let params = ModelParams::init(hyper, 5);
    let ids = vocab.encode(texts[0], hyper.max_len);
    let label = Label::Informative;

    let trace = forward(&params, &ids)?;
    let clean = bce_loss(trace.prob, label);
    // g is the gradient of log p, the negated loss gradient.
    let g = backward(&params, &trace, label).wrt_embedded.scaled(-1.0);
    println!("ids {ids:?}");
    println!("clean prob {:.6}, loss {clean:.6}, |g| {:.3e}", trace.prob, g.norm());

    for eps in [0.01, 0.1, 0.5, 1.0, 2.0] {
        let z = adversarial_perturbation(&g, eps)?;
        let cosine = z.wrt_embedded.dot(&g) / (z.norm() * g.norm());
        let (adv, _) = adversarial_loss(&params, &ids, label, &z)?;
        println!(
            "eps {eps:<4} |z| {:.6} cos(z, g) {cosine:+.6} adversarial loss {adv:.6} ({:+.6})",
            z.norm(),
            adv - clean
        );
    }
    Ok(())
}
