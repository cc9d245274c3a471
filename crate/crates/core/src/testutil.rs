//! Shared generators for the property tests.

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use crate::ansatz::{build_arch_a, build_arch_b, build_qcnn, CircuitSpec, ConvType, PoolKind};
use crate::sim::{gates, StateVector};

pub fn state_from(n: usize, raw: &[f64]) -> StateVector {
    let amps: Vec<C64> = raw.chunks(2).take(1 << n).map(|c| C64::new(c[0], c[1])).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let amps = amps.into_iter().map(|a| a / norm).collect();
    StateVector::from_amplitudes(n, amps).unwrap()
}

pub fn random_state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(-1.0f64..1.0, 2 << n)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(move |v| state_from(n, &v))
}

pub fn mat2(v: &[f64]) -> gates::Mat2 {
    let g = C64::from_polar(1.0, v[3]);
    gates::u3(v[0], v[1], v[2]).map(|row| row.map(|x| x * g))
}

pub fn circuit(kind: u8, n: usize) -> CircuitSpec {
    let layers = if n >= 4 { 2 } else { 1 };
    match kind % 5 {
        0 => build_qcnn(n, layers, ConvType::Type1, PoolKind::Zx).unwrap(),
        1 => build_qcnn(n, 1, ConvType::Type2, PoolKind::Generalized).unwrap(),
        2 => build_qcnn(n, layers, ConvType::Type3, PoolKind::Zx).unwrap(),
        3 => build_arch_a(n).unwrap(),
        _ => build_arch_b(n).unwrap(),
    }
}

pub fn params(spec: &CircuitSpec, raw: &[f64]) -> Vec<f64> {
    (0..spec.n_params()).map(|i| raw[i % raw.len()] * (1.0 + i as f64 * 0.37)).collect()
}

pub fn max_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
