//! Builds the three encoder families, dumps one as text and runs it on an
//! angle-encoded input.
//!
//! cargo run --release --example circuit_tour

use std::f64::consts::PI;

use qae::ansatz::{build_arch_a, build_arch_b, build_qcnn, CircuitSpec, ConvType, PoolKind};
use qae::encoding::angle_encode;
use qae::sim::DensityMatrix;
use qae::training::trash_probs;

fn main() -> qae::Result<()> {
    for (name, spec) in [
        ("qcnn(8,3) type1 zx", build_qcnn(8, 3, ConvType::Type1, PoolKind::Zx)?),
        ("qcnn(8,3) type3 generalized", build_qcnn(8, 3, ConvType::Type3, PoolKind::Generalized)?),
        ("arch a(8)", build_arch_a(8)?),
        ("arch b(8)", build_arch_b(8)?),
    ] {
        println!(
            "{name:<28} {:>3} gates {:>4} params {:>3} two-qubit  trash {:?}  keep {:?}",
            spec.ops().len(),
            spec.n_params(),
            spec.two_qubit_gate_count(),
            spec.trash(),
            spec.compressed()
        );
    }

    let small = build_qcnn(4, 2, ConvType::Type2, PoolKind::Zx)?;
    println!("\n{}", small.to_text());
    let parsed = CircuitSpec::from_text(&small.to_text())?;
    assert_eq!(parsed, small);

    let spec = build_qcnn(8, 3, ConvType::Type1, PoolKind::Zx)?;
    let params: Vec<f64> = (0..spec.n_params()).map(|i| (i as f64 * 0.731).sin() * PI).collect();
    let x: Vec<f64> = (0..8).map(|i| i as f64 * PI / 8.0).collect();
    let input = angle_encode(&x)?;
    let out = spec.run(&params, &input)?;
    let q = spec.compressed()[0];
    println!("compressed qubit {q} bloch vector {:?}", out.bloch_vector(q)?);
    println!("trash P(1) {:?}", trash_probs(&spec, &params, &input)?);

    let kept = DensityMatrix::from_pure(&out).partial_trace(&[q])?;
    println!("compressed purity {:.6}", kept.purity());

    let back = spec.invert().run(&params, &out)?;
    println!("|<x|E^-1 E|x>|^2 = {:.12}", back.overlap(&input));
    Ok(())
}
