//! Varies one protocol setting at a time and prints mean accuracy per variant.
//!
//! cargo run --release --example ablation_sweep -- [data_dir] [seeds]

use std::path::PathBuf;

use qae::ansatz::{ConvType, PoolKind};
use qae::encoding::{Encoding, Reducer};
use qae::experiment::{fit_pixel_reducer, load_mnist, mean_std, prepare, run_classification, ExperimentConfig};
use qae::training::{Architecture, GradientMethod, LossKind};

type Tweak = fn(&mut ExperimentConfig);

fn main() -> qae::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dir = PathBuf::from(args.first().map_or("data/mnist", String::as_str));
    let seeds: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let mnist = load_mnist(&dir)?;
    let reducer: Reducer = fit_pixel_reducer(&mnist.train, 8)?;

    let variants: [(&str, Tweak); 10] = [
        ("baseline", |_| {}),
        ("amplitude encoding", |c| c.train.encoding = Encoding::Amplitude),
        ("generalized pooling", |c| c.train.pool_kind = PoolKind::Generalized),
        ("no pooling", |c| c.train.pool_kind = PoolKind::None),
        ("type 2 conv", |c| c.train.conv_type = ConvType::Type2),
        ("type 3 conv", |c| c.train.conv_type = ConvType::Type3),
        ("mse loss", |c| c.train.loss = LossKind::Mse),
        ("untrained", |c| c.train.learning_rate = 0.0),
        ("arch a", |c| c.train.architecture = Architecture::ArchA),
        ("arch b", |c| c.train.architecture = Architecture::ArchB),
    ];
    for (name, tweak) in variants {
        let mut accs = Vec::new();
        for seed in 0..seeds {
            let mut cfg = ExperimentConfig::default();
            cfg.train.seed = seed;
            cfg.train.gradient = GradientMethod::Adjoint;
            tweak(&mut cfg);
            let red = (cfg.train.encoding == Encoding::Angle).then_some(&reducer);
            let prepared = prepare(&cfg, &mnist, red)?;
            accs.push(run_classification(&cfg, &prepared)?.accuracy);
        }
        let (m, s) = mean_std(&accs);
        println!("{name:<20} {m:.4} ± {s:.4}");
    }
    Ok(())
}
