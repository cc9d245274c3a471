//! Parameter-shift and adjoint gradients of the trash loss against central
//! finite differences, with timings.
//!
//! cargo run --release --example gradient_check -- [n_qubits]

use std::time::Instant;

use qae::ansatz::{build_qcnn, ConvType, PoolKind};
use qae::encoding::angle_encode;
use qae::training::{GradientMethod, LossKind, SampleObjective, TrashObjective};

fn main() -> qae::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(8, |s| s.parse().unwrap_or(8));
    let layers = n.trailing_zeros() as usize;
    let spec = build_qcnn(n, layers, ConvType::Type1, PoolKind::Zx)?;
    let obj = TrashObjective {
        spec: spec.clone(),
        loss: LossKind::Bce,
    };
    let params: Vec<f64> = (0..spec.n_params()).map(|i| 1.0 + (i as f64 * 1.37).cos()).collect();
    let x: Vec<f64> = (0..n).map(|i| 0.3 + 0.2 * i as f64).collect();
    let input = angle_encode(&x)?;

    let mut grads = Vec::new();
    for method in [GradientMethod::ParameterShift, GradientMethod::Adjoint] {
        let mut g = vec![0.0; params.len()];
        let t = Instant::now();
        let loss = obj.value_and_grad(&params, &input, method, &mut g)?;
        println!("{:<16} loss {loss:.10}  {:>8.2?}", method.to_string(), t.elapsed());
        grads.push(g);
    }

    let h = 1e-5;
    let t = Instant::now();
    let fd: Vec<f64> = (0..params.len())
        .map(|j| {
            let mut p = params.clone();
            p[j] += h;
            let up = obj.value(&p, &input)?;
            p[j] -= 2.0 * h;
            Ok((up - obj.value(&p, &input)?) / (2.0 * h))
        })
        .collect::<qae::Result<_>>()?;
    println!("{:<16} {:>30.2?}", "finite diff", t.elapsed());

    let scale = fd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (name, g) in ["parameter_shift", "adjoint"].iter().zip(&grads) {
        let err = g.iter().zip(&fd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        println!("{name:<16} max |g - fd| / max |fd| = {:.2e}", err / scale);
    }
    Ok(())
}
