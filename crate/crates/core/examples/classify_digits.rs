//! Trains a QCNN encoder on MNIST 0 vs 1 and reports test accuracy.
//!
//! cargo run --release --example classify_digits -- [data_dir] [seed] [architecture] [gradient]

use std::path::PathBuf;
use std::time::Instant;

use qae::experiment::{load_mnist, prepare, run_classification, ExperimentConfig};

fn main() -> qae::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dir = PathBuf::from(args.first().map_or("data/mnist", String::as_str));
    let mut cfg = ExperimentConfig::default();
    if let Some(s) = args.get(1) {
        cfg.train.seed = s.parse().map_err(|e| qae::QaeError::Config(format!("seed '{s}': {e}")))?;
    }
    if let Some(a) = args.get(2) {
        cfg.train.architecture = a.parse()?;
    }
    if let Some(g) = args.get(3) {
        cfg.train.gradient = g.parse()?;
    }

    let mnist = load_mnist(&dir)?;
    let start = Instant::now();
    let prepared = prepare(&cfg, &mnist, None)?;
    println!("prepared {} training samples in {:.1?}", prepared.train.features.len(), start.elapsed());

    let out = run_classification(&cfg, &prepared)?;
    let losses = &out.report.losses;
    println!(
        "{} params, loss {:.4} -> {:.4}, trained in {:.1}s",
        out.encoder.n_params(),
        losses[0],
        losses[losses.len() - 1],
        out.report.wall_time
    );
    println!("plane normal {:?} offset {:.4}", out.plane.normal, out.plane.offset);
    for c in &out.per_class {
        println!("digit {}: {}/{}", c.label, c.correct, c.total);
    }
    println!("accuracy {:.4}", out.accuracy);
    Ok(())
}
