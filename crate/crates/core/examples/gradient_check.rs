//! Compares every analytic gradient of a small random model with central
//! finite differences, including the gradient with respect to the
//! embedded sequence that FGM uses.
//!
//! ```text
//! cargo run --release --example gradient_check
//! ```

use advtext::corpus::Label;
use advtext::textmodel::{
    backward, bce_loss, forward, forward_embedded, ModelHyper, ModelParams, ARRAY_NAMES, PAD_ID,
};

const H: f64 = 1e-4;

fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-6)
}

fn main() -> advtext::Result<()> {
    let hyper = ModelHyper {
        vocab_size: 12,
        dim: 6,
        max_len: 5,
    };
    let params = ModelParams::init(hyper, 3);
    let ids = vec![4, 9, 2, PAD_ID, PAD_ID];
    let label = Label::Informative;

    let trace = forward(&params, &ids)?;
    let grads = backward(&params, &trace, label);
    println!("prob {:.6}, loss {:.6}", trace.prob, bce_loss(trace.prob, label));

    let loss = |p: &ModelParams| bce_loss(forward(p, &ids).unwrap().prob, label);
    let analytic = grads.weights.slices();
    for (a, name) in ARRAY_NAMES.iter().enumerate() {
        let mut worst: f64 = 0.0;
        for (i, &grad) in analytic[a].iter().enumerate() {
            let mut p = params.clone();
            let x = p.weights.slices()[a][i];
            p.weights.slices_mut()[a][i] = x + H;
            let up = loss(&p);
            p.weights.slices_mut()[a][i] = x - H;
            let down = loss(&p);
            worst = worst.max(rel_err(grad, (up - down) / (2.0 * H)));
        }
        println!("{name:<10} max relative error {worst:.2e}");
    }

    let mut worst: f64 = 0.0;
    for i in 0..trace.embedded.as_slice().len() {
        let at = |delta: f64| {
            let mut t = trace.embedded.clone();
            t.as_mut_slice()[i] += delta;
            bce_loss(forward_embedded(&params, &ids, t).unwrap().prob, label)
        };
        let numeric = (at(H) - at(-H)) / (2.0 * H);
        worst = worst.max(rel_err(grads.wrt_embedded.as_slice()[i], numeric));
    }
    println!("{:<10} max relative error {worst:.2e}", "embedded");
    Ok(())
}
