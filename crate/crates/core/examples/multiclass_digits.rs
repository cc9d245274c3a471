//! One-vs-rest classification of three or four digits from the Bloch
//! vectors of every kept qubit.
//!
//! cargo run --release --example multiclass_digits -- [data_dir] [digits e.g. 018] [layers] [seeds]

use std::path::PathBuf;

use qae::experiment::{load_mnist, mean_std, prepare, run_multiclass, ExperimentConfig};
use qae::training::GradientMethod;
use qae::QaeError;

fn main() -> qae::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dir = PathBuf::from(args.first().map_or("data/mnist", String::as_str));
    let digits = args.get(1).map_or("018", String::as_str);
    let classes = digits
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as u8))
        .collect::<Option<Vec<u8>>>()
        .ok_or_else(|| QaeError::Config(format!("bad digit list '{digits}'")))?;
    let layers: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(2);
    let seeds: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(4);

    let mnist = load_mnist(&dir)?;
    let mut accs = Vec::new();
    for seed in 0..seeds {
        let mut cfg = ExperimentConfig::default();
        cfg.train.classes = classes.clone();
        cfg.train.layers = layers;
        cfg.train.seed = seed;
        cfg.train.gradient = GradientMethod::Adjoint;
        let prepared = prepare(&cfg, &mnist, None)?;
        let acc = run_multiclass(&cfg, &prepared)?;
        println!("seed {seed}: {acc:.4}");
        accs.push(acc);
    }
    let (m, s) = mean_std(&accs);
    println!("digits {classes:?}, {layers} layers: {m:.4} ± {s:.4}");
    Ok(())
}
