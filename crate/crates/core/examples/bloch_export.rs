//! Trains on MNIST 0/1, aligns the separating plane with z and writes the
//! test-set Bloch points before and after the rotation.
//!
//! cargo run --release --example bloch_export -- [data_dir] [out_dir] [shots]

use std::path::PathBuf;

use qae::cli::artifacts::write_bloch_csv;
use qae::eval::BlochPoint;
use qae::experiment::{load_mnist, prepare, run_classification, ExperimentConfig};
use qae::training::GradientMethod;

fn mean_abs_z(points: &[BlochPoint]) -> f64 {
    points.iter().map(|p| p.z.abs()).sum::<f64>() / points.len() as f64
}

fn main() -> qae::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dir = PathBuf::from(args.first().map_or("data/mnist", String::as_str));
    let out = PathBuf::from(args.get(1).map_or("runs/bloch", String::as_str));
    let mut cfg = ExperimentConfig::default();
    cfg.train.gradient = GradientMethod::Adjoint;
    cfg.shots = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0);

    let mnist = load_mnist(&dir)?;
    let prepared = prepare(&cfg, &mnist, None)?;
    let c = run_classification(&cfg, &prepared)?;
    println!(
        "plane normal {:?} offset {:.4}; rotate RX({:.4}) then RY({:.4}); |0> side is digit {}",
        c.plane.normal, c.plane.offset, c.alignment.alpha, c.alignment.beta, c.alignment.class_of_zero
    );
    println!("mean |z| before {:.4}, after {:.4}", mean_abs_z(&c.pre_align), mean_abs_z(&c.post_align));
    println!("accuracy {:.4}", c.accuracy);

    std::fs::create_dir_all(&out)?;
    write_bloch_csv(&out.join("bloch_pre.csv"), &c.pre_align, "pre_align")?;
    write_bloch_csv(&out.join("bloch_post.csv"), &c.post_align, "post_align")?;
    println!("wrote {}", out.display());
    Ok(())
}
