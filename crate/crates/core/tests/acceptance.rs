//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed.

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use advtext::advtrain::{adversarial_perturbation, TrainError, MIN_GRADIENT_NORM};
use advtext::corpus::{stratified_folds, Dataset, Label, Tweet};
use advtext::emoji_data::shipped_table;
use advtext::ensemble::{
    apply_threshold, fold_average, mean_of, model_average, optimize_threshold, PredictionMatrix,
};
use advtext::evalkit::{precision_recall_f1, ConfusionCounts};
use advtext::matrix::Matrix;
use advtext::pipeline::{run_cv, DataSource, ExperimentConfig, RunManifest};
use advtext::preprocess::{
    demojize, normalize_whitespace, preprocess_text, replace_url_token, unescape_html,
};
use advtext::textmodel::{backward, forward, forward_embedded, ModelHyper};
use common::*;
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1. Analytic gradients against central finite differences.
fn gradient_correctness() -> Outcome {
    const H: f64 = 1e-4;
    const TOL: f64 = 1e-4;
    // Entries whose true gradient is zero (pad rows, unused vocabulary) have
    // finite differences of rounding size only; below this magnitude the
    // comparison is absolute.
    const FLOOR: f64 = 1e-6;
    let start = Instant::now();
    let mut checked = 0usize;
    let mut worst = 0.0f64;
    for seed in 0..8u64 {
        let mut rng = rng(1000 + seed);
        let hyper = ModelHyper {
            vocab_size: rng.random_range(3..=20),
            dim: rng.random_range(1..=8),
            max_len: rng.random_range(1..=6),
        };
        let mut params = random_params(hyper, 0.5, &mut rng);
        let ids = random_ids(hyper, &mut rng);
        let label = random_label(&mut rng);
        let trace = forward(&params, &ids).unwrap();
        let grads = backward(&params, &trace, label);

        let analytic: Vec<Vec<f64>> = grads.weights.slices().iter().map(|s| s.to_vec()).collect();
        for (a, analytic_slice) in analytic.iter().enumerate() {
            for (j, &grad) in analytic_slice.iter().enumerate() {
                let x0 = params.weights.slices()[a][j];
                let numeric = central_difference(
                    H,
                    |x| {
                        params.weights.slices_mut()[a][j] = x;
                        loss_at(&params, &ids, label)
                    },
                    x0,
                );
                params.weights.slices_mut()[a][j] = x0;
                let err = relative_error(grad, numeric, FLOOR);
                worst = worst.max(err);
                checked += 1;
                check(err <= TOL, || {
                    format!("seed {seed} array {a} entry {j}: analytic {grad} numeric {numeric}")
                })?;
            }
        }
        let mut t = trace.embedded.clone();
        for r in 0..t.rows() {
            for c in 0..t.cols() {
                let x0 = t[(r, c)];
                let numeric = central_difference(
                    H,
                    |x| {
                        t[(r, c)] = x;
                        loss_at_embedded(&params, &ids, label, &t)
                    },
                    x0,
                );
                t[(r, c)] = x0;
                let err = relative_error(grads.wrt_embedded[(r, c)], numeric, FLOOR);
                worst = worst.max(err);
                checked += 1;
                check(err <= TOL, || {
                    format!("seed {seed} wrt_embedded ({r},{c}): analytic {} numeric {numeric}", grads.wrt_embedded[(r, c)])
                })?;
            }
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("8 configs, {checked} entries, worst rel err {worst:.2e}, {elapsed:.2?}"))
}

// 2. FGM perturbation geometry.
fn fgm_invariants() -> Outcome {
    let mut rng = rng(2);
    let mut zero_cases = 0;
    for draw in 0..2000 {
        let rows = rng.random_range(1..=6);
        let cols = rng.random_range(1..=8);
        let magnitude = 10f64.powf(rng.random_range(-16.0..4.0));
        let data: Vec<f64> = (0..rows * cols)
            .map(|_| rng.random_range(-1.0..1.0) * magnitude)
            .collect();
        let g = Matrix::from_vec(rows, cols, data);
        let eps = rng.random_range(1e-3..10.0);
        let norm = g.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - MIN_GRADIENT_NORM).abs() <= 1e-9 * MIN_GRADIENT_NORM {
            continue;
        }
        match adversarial_perturbation(&g, eps) {
            Err(TrainError::ZeroGradient) => {
                check(norm < MIN_GRADIENT_NORM, || format!("draw {draw}: ZeroGradient at norm {norm:e}"))?;
                zero_cases += 1;
            }
            Err(e) => return Err(format!("draw {draw}: {e}")),
            Ok(z) => {
                check(norm >= MIN_GRADIENT_NORM, || format!("draw {draw}: accepted norm {norm:e}"))?;
                let z = z.wrt_embedded;
                let zn = z.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
                check((zn - eps).abs() <= 1e-9, || format!("draw {draw}: |z| {zn} vs eps {eps}"))?;
                let dot: f64 = z.as_slice().iter().zip(g.as_slice()).map(|(a, b)| a * b).sum();
                let cos = dot / (zn * norm);
                check((cos + 1.0).abs() <= 1e-9, || format!("draw {draw}: cosine {cos}"))?;
                let c = 10f64.powf(rng.random_range(-3.0..3.0));
                let scaled = Matrix::from_vec(rows, cols, g.as_slice().iter().map(|x| x * c).collect());
                if let Ok(z2) = adversarial_perturbation(&scaled, eps) {
                    let diff = z2
                        .wrt_embedded
                        .as_slice()
                        .iter()
                        .zip(z.as_slice())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    check(diff <= 1e-9, || format!("draw {draw}: scaling by {c} moved z by {diff}"))?;
                }
            }
        }
    }
    check(matches!(adversarial_perturbation(&Matrix::zeros(2, 3), 1.0), Err(TrainError::ZeroGradient)), || "zero matrix accepted".into())?;
    check(zero_cases > 50, || format!("only {zero_cases} sub-threshold draws"))?;
    Ok(format!("2000 draws, {zero_cases} below the zero-gradient threshold"))
}

// 3. The FGM step never increases the log-likelihood.
fn adversarial_descent() -> Outcome {
    let mut rng = rng(3);
    let mut tested = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut attempts = 0;
    while tested < 200 {
        attempts += 1;
        let hyper = ModelHyper {
            vocab_size: rng.random_range(3..=20),
            dim: rng.random_range(1..=8),
            max_len: rng.random_range(1..=6),
        };
        let params = random_params(hyper, 0.5, &mut rng);
        let ids = random_ids(hyper, &mut rng);
        let label = random_label(&mut rng);
        let eps = rng.random_range(1e-4..=0.1);
        let trace = forward(&params, &ids).unwrap();
        let g = backward(&params, &trace, label).wrt_embedded.scaled(-1.0);
        // Non-degenerate: the first-order term dominates at this ε.
        if g.norm() < 1e-3 {
            continue;
        }
        let z = adversarial_perturbation(&g, eps).map_err(|e| e.to_string())?;
        let mut t = trace.embedded.clone();
        t.add_scaled(&z.wrt_embedded, 1.0);
        let perturbed = forward_embedded(&params, &ids, t).unwrap().prob;
        let clean_ll = -plain_bce(trace.prob, label);
        let adv_ll = -plain_bce(perturbed, label);
        worst = worst.max(adv_ll - clean_ll);
        check(adv_ll <= clean_ll + 1e-9, || {
            format!("model {attempts}: log p rose from {clean_ll} to {adv_ll} (eps {eps}, |g| {})", g.norm())
        })?;
        tested += 1;
    }
    Ok(format!("{tested} models ({attempts} drawn), max Δlog p {worst:.3e}"))
}

// 4. Threshold search against brute force over all cut points.
fn threshold_oracle() -> Outcome {
    let mut rng = rng(4);
    let mut instances = 0;
    while instances < 300 {
        let n = rng.random_range(1..=50);
        let coarse = rng.random_bool(0.5);
        let probs: Vec<f64> = (0..n)
            .map(|_| {
                if coarse {
                    rng.random_range(0..=10) as f64 / 10.0
                } else {
                    rng.random_range(0.0..=1.0)
                }
            })
            .collect();
        let gold: Vec<Label> = (0..n).map(|_| Label::from_positive(rng.random_bool(0.4))).collect();
        if !gold.iter().any(|g| g.is_positive()) {
            continue;
        }
        let r = optimize_threshold(&probs, &gold).map_err(|e| e.to_string())?;
        let best = brute_force_best_f1(&probs, &gold);
        check(r.f1_at_threshold == best, || format!("n={n}: got {} brute force {best}", r.f1_at_threshold))?;
        let gold_pos: Vec<bool> = gold.iter().map(|g| g.is_positive()).collect();
        let at = f1_oracle(&probs.iter().map(|&p| p >= r.threshold).collect::<Vec<_>>(), &gold_pos);
        check(at == best, || format!("n={n}: F1 at returned threshold {at} != {best}"))?;
        for i in 0..=1000 {
            let theta = i as f64 / 1000.0;
            let grid = f1_oracle(&probs.iter().map(|&p| p >= theta).collect::<Vec<_>>(), &gold_pos);
            check(grid <= best, || format!("grid θ={theta} beats the search: {grid} > {best}"))?;
        }
        instances += 1;
    }
    Ok(format!("{instances} instances, exact F1 agreement, 1001-point grid dominated"))
}

// 5. Hand-computed metric fixtures.
fn metric_fixtures() -> Outcome {
    use Label::{Informative as P, Uninformative as N};
    // (pred, gold, precision, recall, f1)
    type Fixture<'a> = (&'a [Label], &'a [Label], f64, f64, f64);
    let cases: [Fixture; 6] = [
        // tp=2 fp=1 fn=0: P=2/3, R=1, F1 = 2·(2/3)/(5/3) = 0.8
        (&[P, P, P, N], &[P, P, N, N], 2.0 / 3.0, 1.0, 0.8),
        // tp=1 fp=1 fn=1: P=R=F1=1/2
        (&[P, P, N, N], &[P, N, P, N], 0.5, 0.5, 0.5),
        // tp=1 fp=0 fn=2: P=1, R=1/3, F1=2·(1/3)/(4/3)=0.5
        (&[P, N, N], &[P, P, P], 1.0, 1.0 / 3.0, 0.5),
        // perfect
        (&[P, N, P], &[P, N, P], 1.0, 1.0, 1.0),
        // no predicted positives, gold has positives
        (&[N, N, N], &[P, N, P], 0.0, 0.0, 0.0),
        // no positives anywhere
        (&[N, N], &[N, N], 0.0, 0.0, 0.0),
    ];
    for (i, (pred, gold, p, r, f1)) in cases.iter().enumerate() {
        let s = precision_recall_f1(pred, gold).map_err(|e| e.to_string())?;
        check(
            (s.precision - p).abs() <= 1e-12 && (s.recall - r).abs() <= 1e-12 && (s.f1 - f1).abs() <= 1e-12,
            || format!("case {i}: got P={} R={} F1={}", s.precision, s.recall, s.f1),
        )?;
        check(s.counts.total() == pred.len(), || format!("case {i}: counts {:?}", s.counts))?;
    }
    let s = precision_recall_f1(&[P, P, P, N], &[P, P, N, N]).unwrap();
    check(s.counts == ConfusionCounts { tp: 2, fp: 1, fn_: 0, tn: 1 }, || format!("{:?}", s.counts))?;
    check(precision_recall_f1(&[P], &[P, N]).is_err(), || "length mismatch accepted".into())?;
    Ok(format!("{} fixtures to 1e-12, zero-division cases included", cases.len()))
}

// 6. Stratified fold bounds.
fn stratification_bound() -> Outcome {
    let mut rng = rng(6);
    for trial in 0..200 {
        let k = rng.random_range(2..=10);
        let n = rng.random_range(k..=400);
        let rate = rng.random_range(0.0..=1.0);
        let items: Vec<Tweet> = (0..n)
            .map(|i| Tweet::new(format!("t{i}"), "x", Some(Label::from_positive(rng.random_bool(rate)))))
            .collect();
        let data = Dataset::new("d", items).unwrap();
        let seed = rng.random::<u64>();
        let plan = stratified_folds(&data, k, seed).map_err(|e| e.to_string())?;
        check(plan.assignment.len() == n && plan.assignment.iter().all(|&f| f < k), || {
            format!("trial {trial}: assignment is not a partition into {k} folds")
        })?;
        let mut size = vec![0usize; k];
        let mut pos = vec![0usize; k];
        for (t, &f) in data.items().iter().zip(&plan.assignment) {
            size[f] += 1;
            pos[f] += usize::from(t.label.unwrap().is_positive());
        }
        check(size.iter().sum::<usize>() == n, || "sizes do not sum to n".into())?;
        let (lo, hi) = (size.iter().min().unwrap(), size.iter().max().unwrap());
        check(hi - lo <= 1, || format!("trial {trial} (n={n}, k={k}): sizes {size:?}"))?;
        let n_pos = data.count_label(Label::Informative) as f64;
        let n_neg = n as f64 - n_pos;
        for f in 0..k {
            let neg = (size[f] - pos[f]) as f64;
            check((pos[f] as f64 - n_pos / k as f64).abs() <= 1.0, || {
                format!("trial {trial}: fold {f} has {} positives, share {}", pos[f], n_pos / k as f64)
            })?;
            check((neg - n_neg / k as f64).abs() <= 1.0, || {
                format!("trial {trial}: fold {f} has {neg} negatives, share {}", n_neg / k as f64)
            })?;
        }
        let again = stratified_folds(&data, k, seed).unwrap();
        check(again == plan, || format!("trial {trial}: not deterministic"))?;
    }
    Ok("200 (n, balance, k) triples: partition, sizes ±1, class counts ±1".into())
}

// 7. Preprocessing golden fixtures.
fn preprocessing_golden() -> Outcome {
    let table = shipped_table();
    type Step<'a> = Box<dyn Fn(&str) -> String + 'a>;
    let steps: [(&str, Step); 5] = [
        ("unescape", Box::new(unescape_html)),
        ("demojize", Box::new(|s: &str| demojize(s, &table))),
        ("url", Box::new(replace_url_token)),
        ("whitespace", Box::new(normalize_whitespace)),
        ("full", Box::new(|s: &str| preprocess_text(s, &table))),
    ];
    let fixtures: &[(&str, &str, &str)] = &[
        ("unescape", "Stay &amp; safe", "Stay & safe"),
        ("unescape", "a &lt;3 b &gt; c", "a <3 b > c"),
        ("unescape", "&quot;quoted&quot; &#39;x&#39;", "\"quoted\" 'x'"),
        ("unescape", "&#x1F637; hex and &#128567; dec", "😷 hex and 😷 dec"),
        ("unescape", "&amp;amp; once", "&amp; once"),
        ("unescape", "AT&T &bogus; & &", "AT&T &bogus; & &"),
        ("demojize", "mask 😷", "mask  :face_with_medical_mask: "),
        ("demojize", "love ❤️ and ❤", "love  :red_heart:  and  :red_heart: "),
        ("demojize", "🇺🇸", " :united_states: "),
        ("demojize", "😂😂", " :face_with_tears_of_joy:  :face_with_tears_of_joy: "),
        ("demojize", "no emoji here", "no emoji here"),
        ("url", "see HTTPURL now", "see URL now"),
        ("url", "HTTPURL", "URL"),
        ("url", "HTTPURLS and xHTTPURL stay", "HTTPURLS and xHTTPURL stay"),
        ("url", "a\tHTTPURL\nb", "a\tURL\nb"),
        ("whitespace", "  a \t b\n\nc  ", "a b c"),
        ("whitespace", "", ""),
        ("whitespace", "one", "one"),
        ("full", "Stay &amp; safe 😷  HTTPURL", "Stay & safe :face_with_medical_mask: URL"),
        ("full", "@USER  Cases up &gt; 500 HTTPURL😷", "@USER Cases up > 500 URL :face_with_medical_mask:"),
        ("full", "&amp;amp;lt;", "<"),
        ("full", "  \u{00A0}New   cases\n", "New cases"),
        ("full", "&#x1F637;HTTPURL", ":face_with_medical_mask: URL"),
        ("full", "plain text", "plain text"),
    ];
    for (step, input, expected) in fixtures {
        let f = &steps.iter().find(|(n, _)| n == step).unwrap().1;
        let got = f(input);
        check(got == *expected, || format!("{step}({input:?}) = {got:?}, expected {expected:?}"))?;
        let once = preprocess_text(input, &table);
        let twice = preprocess_text(&once, &table);
        check(once == twice, || format!("not idempotent on {input:?}: {once:?} -> {twice:?}"))?;
    }
    Ok(format!("{} byte-exact fixtures over all steps, idempotence on each", fixtures.len()))
}

fn desk_config(noise_rate: f64, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(DataSource::Synthetic {
        n: 2000,
        positive_rate: 0.47,
        noise_rate,
        seed: 2020,
    });
    cfg.output_dir = Some(out.to_path_buf());
    cfg.resume = false;
    cfg
}

fn read_dir_files(root: &Path, rels: &[&str]) -> Vec<Vec<u8>> {
    rels.iter().map(|r| fs::read(root.join(r)).unwrap()).collect()
}

// 8 and 9. The desk experiment and its reproducibility.
fn desk_experiment() -> (Outcome, Outcome) {
    let tmp = tempfile::tempdir().unwrap();
    let (dir_a, dir_b, dir_noisy) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("noisy"));

    let start = Instant::now();
    let first = run_cv(&desk_config(0.0, &dir_a));
    let elapsed = start.elapsed();
    let eight = (|| -> Outcome {
        let m = first.as_ref().map_err(|e| e.to_string())?;
        m.verify(&dir_a).map_err(|e| e.to_string())?;
        let plain = m.variant("plain").ok_or("no plain variant")?.metrics.f1;
        let adv = m.variant("adv").ok_or("no adv variant")?.metrics.f1;
        let ens = m.ensemble.metrics.f1;
        check(m.variant("adv").unwrap().train.adversarial && m.variant("adv").unwrap().train.epsilon == 1.0, || "adv variant misconfigured".into())?;
        check(ens >= 0.95, || format!("ensemble OOF F1 {ens}"))?;
        check(adv >= plain - 0.02, || format!("adversarial F1 {adv} vs plain {plain}"))?;
        check(elapsed < Duration::from_secs(300), || format!("runtime {elapsed:?}"))?;
        check(m.oof_order.len() == 2000, || "OOF length".into())?;

        let noisy = run_cv(&desk_config(0.1, &dir_noisy)).map_err(|e| e.to_string())?;
        let a = noisy.analysis.as_ref().ok_or("no disagreement report")?;
        check(fs::metadata(dir_noisy.join(&a.disagreement)).is_ok(), || "report file missing".into())?;
        check(a.errors_a - a.a_wrong_b_right == a.errors_b - a.b_wrong_a_right, || format!("identity fails: {a:?}"))?;
        check(a.errors_a - a.a_wrong_b_right == a.both_wrong, || format!("shared errors: {a:?}"))?;
        let (pf, af) = (noisy.variant("plain").unwrap().metrics.f1, noisy.variant("adv").unwrap().metrics.f1);
        Ok(format!(
            "F1 plain {plain:.4} adv {adv:.4} ensemble {ens:.4} in {elapsed:.1?}; noise 0.1: plain {pf:.4} ({} errors) adv {af:.4} ({} errors), {} fixed by adv, {} fixed by plain, {} shared",
            a.errors_a, a.errors_b, a.a_wrong_b_right, a.b_wrong_a_right, a.both_wrong
        ))
    })();

    let nine = (|| -> Outcome {
        let m1 = first.as_ref().map_err(|e| e.to_string())?;
        let m2 = run_cv(&desk_config(0.0, &dir_b)).map_err(|e| e.to_string())?;
        check(*m1 == m2, || "manifests differ".into())?;
        let json_a = fs::read(dir_a.join("manifest.json")).unwrap();
        let json_b = fs::read(dir_b.join("manifest.json")).unwrap();
        check(json_a == json_b, || "manifest bytes differ".into())?;
        let reloaded = RunManifest::load(dir_a.join("manifest.json")).map_err(|e| e.to_string())?;
        check(reloaded == m2, || "manifest does not round-trip".into())?;
        let arts = m1.artifacts();
        check(read_dir_files(&dir_a, &arts) == read_dir_files(&dir_b, &arts), || "artifacts differ".into())?;
        let t1: Vec<u64> = m1.variants.iter().map(|v| v.threshold.threshold.to_bits()).collect();
        let t2: Vec<u64> = m2.variants.iter().map(|v| v.threshold.threshold.to_bits()).collect();
        check(t1 == t2 && m1.ensemble.threshold == m2.ensemble.threshold, || "thresholds differ".into())?;
        Ok(format!("two runs: identical manifests and {} artifacts byte for byte", arts.len()))
    })();
    (eight, nine)
}

// 10. Two-level averaging equals the flat mean.
fn ensembling_algebra() -> Outcome {
    let mut rng = rng(10);
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let k = rng.random_range(1..=10);
        let n = rng.random_range(1..=60);
        let ids: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let mut all = Vec::new();
        let mut levels = Vec::new();
        for model in 0..2 {
            let mut m = PredictionMatrix::new(ids.clone());
            for f in 0..k {
                let run: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
                m.add_run(&format!("m{model}f{f}"), run.clone()).map_err(|e| e.to_string())?;
                all.push(run);
            }
            levels.push(fold_average(&m).map_err(|e| e.to_string())?);
        }
        let two_level = model_average(&levels[0], &levels[1]).map_err(|e| e.to_string())?;
        let flat: Vec<f64> = (0..n).map(|i| all.iter().map(|r| r[i]).sum::<f64>() / all.len() as f64).collect();
        for (a, b) in two_level.iter().zip(&flat) {
            worst = worst.max((a - b).abs());
            check((a - b).abs() <= 1e-12, || format!("trial {trial}: {a} vs {b}"))?;
            check((0.0..=1.0).contains(a), || format!("trial {trial}: {a} outside [0, 1]"))?;
        }
        check(mean_of(&all).map_err(|e| e.to_string())?.len() == n, || "flat mean length".into())?;
        let labels = apply_threshold(&two_level, 0.5);
        check(labels.len() == n, || "threshold length".into())?;
    }
    Ok(format!("200 random trials, max deviation {worst:.1e}"))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(e) => Err(e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into())),
    }
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "gradient correctness", guarded(gradient_correctness)),
        (2, "FGM invariants", guarded(fgm_invariants)),
        (3, "adversarial descent", guarded(adversarial_descent)),
        (4, "threshold oracle equivalence", guarded(threshold_oracle)),
        (5, "metric fixtures", guarded(metric_fixtures)),
        (6, "stratification bound", guarded(stratification_bound)),
        (7, "preprocessing golden suite", guarded(preprocessing_golden)),
    ];
    let (eight, nine) = match panic::catch_unwind(desk_experiment) {
        Ok(pair) => pair,
        Err(_) => (Err("panicked".into()), Err("panicked".into())),
    };
    results.push((8, "end-to-end desk experiment", eight));
    results.push((9, "determinism", nine));
    results.push((10, "ensembling algebra", guarded(ensembling_algebra)));

    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
