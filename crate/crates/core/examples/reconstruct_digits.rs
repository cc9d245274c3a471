//! Trains encoder and decoder together on MNIST 0/1 and compares the
//! reconstruction rate with the untrained starting point.
//!
//! cargo run --release --example reconstruct_digits -- [data_dir] [architecture] [tied] [seed]

use std::path::PathBuf;

use qae::experiment::{load_mnist, prepare, run_reconstruction, ExperimentConfig};
use qae::training::GradientMethod;

fn main() -> qae::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dir = PathBuf::from(args.first().map_or("data/mnist", String::as_str));
    let mut cfg = ExperimentConfig::default();
    cfg.train.gradient = GradientMethod::Adjoint;
    if let Some(a) = args.get(1) {
        cfg.train.architecture = a.parse()?;
    }
    cfg.train.tied_decoder = args.get(2).is_some_and(|t| t == "tied");
    if let Some(s) = args.get(3) {
        cfg.train.seed = s.parse().map_err(|e| qae::QaeError::Config(format!("seed '{s}': {e}")))?;
    }

    let mnist = load_mnist(&dir)?;
    let prepared = prepare(&cfg, &mnist, None)?;
    let r = run_reconstruction(&cfg, &prepared)?;
    let l = &r.report.losses;
    println!(
        "{} ({}), {} params, loss {:.5} -> {:.5}",
        cfg.train.architecture,
        if cfg.train.tied_decoder { "tied" } else { "untied" },
        r.n_params,
        l[0],
        l[l.len() - 1]
    );
    println!("reconstruction rate {:.6} (untrained {:.6})", r.rate, r.baseline_rate);
    Ok(())
}
