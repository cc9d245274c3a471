//! Encoder → trash reset → decoder overlap with the input.
//!
//! The decoder is an `n`-qubit circuit sharing the encoder's partition: its
//! trash qubits are the positions that receive fresh `|0⟩` references.

use crate::ansatz::CircuitSpec;
use crate::error::{QaeError, Result};
use crate::sim::{QubitIndex, StateVector};

use super::gradient::{accumulate_expectation_gradient, GradientMethod};
use super::observable::{CompressedProjector, Partition, TrashZeroDensity};

/// Decoder structure for `enc`: the inverted encoder, same partition.
pub fn decoder_for(enc: &CircuitSpec) -> CircuitSpec {
    enc.invert()
}

/// Physical placement of the decoder on the `n + t` qubit register:
/// compressed qubits stay put, trash qubit `trash[j]` moves to ancilla `n + j`.
pub fn decoder_map(enc: &CircuitSpec) -> Vec<QubitIndex> {
    let n = enc.n_qubits();
    let mut map: Vec<QubitIndex> = (0..n).collect();
    for (j, &q) in enc.trash().iter().enumerate() {
        map[q] = n + j;
    }
    map
}

fn check_pair(enc: &CircuitSpec, dec: &CircuitSpec, input: &StateVector) -> Result<()> {
    if dec.n_qubits() != enc.n_qubits() {
        return Err(QaeError::DimensionMismatch {
            expected: enc.n_qubits(),
            got: dec.n_qubits(),
        });
    }
    if dec.trash() != enc.trash() {
        return Err(QaeError::Validation(
            "decoder reference qubits must match the encoder trash qubits".into(),
        ));
    }
    if input.n_qubits() != enc.n_qubits() {
        return Err(QaeError::DimensionMismatch {
            expected: enc.n_qubits(),
            got: input.n_qubits(),
        });
    }
    Ok(())
}

/// `|⟨φ|ψ_out⟩|²` on the full `c + 2t` qubit circuit: encoder on `0..n`,
/// decoder on the compressed qubits plus `t` fresh ancillas, original trash
/// traced out.
pub fn reconstruction_overlap_ancilla(
    enc: &CircuitSpec,
    theta: &[f64],
    dec: &CircuitSpec,
    theta_dec: &[f64],
    input: &StateVector,
) -> Result<f64> {
    check_pair(enc, dec, input)?;
    let n = enc.n_qubits();
    let t = enc.trash().len();
    let mut state = enc.run(theta, input)?;
    if t > 0 {
        state = state.tensor(&StateVector::zero(t)?)?;
    }
    let map = decoder_map(enc);
    let placed = dec.remap(&map, n + t)?;
    let out = placed.run(theta_dec, &state)?;
    let partition = Partition::new(&map, enc.trash());
    let phi = input.amplitudes();
    let overlap = (0..partition.trash.len())
        .map(|k| {
            partition
                .slice(&out, k)
                .iter()
                .zip(phi)
                .map(|(a, p)| p.conj() * a)
                .sum::<num_complex::Complex64>()
                .norm_sqr()
        })
        .sum::<f64>();
    Ok(overlap.clamp(0.0, 1.0))
}

/// Same overlap evaluated with two `n`-qubit simulations: `ψ = E(θ)φ` and
/// `χ = D(θ′)†φ`, giving `Σ_t |⟨χ₀|ψ_t⟩|²`.
pub fn reconstruction_overlap(
    enc: &CircuitSpec,
    theta: &[f64],
    dec: &CircuitSpec,
    theta_dec: &[f64],
    input: &StateVector,
) -> Result<f64> {
    check_pair(enc, dec, input)?;
    let psi = enc.run(theta, input)?;
    let chi = dec.invert().run(theta_dec, input)?;
    let partition = Partition::new(enc.compressed(), enc.trash());
    let obs = CompressedProjector {
        chi: partition.slice(&chi, 0),
        partition,
    };
    Ok(super::observable::Observable::expectation(&obs, &psi).clamp(0.0, 1.0))
}

/// `1 − overlap`.
pub fn reconstruction_loss(
    enc: &CircuitSpec,
    theta: &[f64],
    dec: &CircuitSpec,
    theta_dec: &[f64],
    input: &StateVector,
) -> Result<f64> {
    Ok(1.0 - reconstruction_overlap(enc, theta, dec, theta_dec, input)?)
}

/// Loss `1 − overlap` and its gradients: `grad_enc += scale·∂/∂θ`,
/// `grad_dec += scale·∂/∂θ′`.
#[allow(clippy::too_many_arguments)]
pub fn reconstruction_loss_grad(
    enc: &CircuitSpec,
    theta: &[f64],
    dec: &CircuitSpec,
    theta_dec: &[f64],
    input: &StateVector,
    method: GradientMethod,
    scale: f64,
    grad_enc: &mut [f64],
    grad_dec: &mut [f64],
) -> Result<f64> {
    check_pair(enc, dec, input)?;
    let partition = Partition::new(enc.compressed(), enc.trash());
    let inv = dec.invert();
    let psi = enc.run(theta, input)?;
    let chi = inv.run(theta_dec, input)?;

    let proj = CompressedProjector {
        chi: partition.slice(&chi, 0),
        partition: partition.clone(),
    };
    let overlap = accumulate_expectation_gradient(enc, theta, input, &proj, method, -scale, grad_enc)?;

    let dens = TrashZeroDensity {
        rho: partition.reduced(&psi),
        partition,
    };
    accumulate_expectation_gradient(&inv, theta_dec, input, &dens, method, -scale, grad_dec)?;
    Ok(1.0 - overlap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::*;
    use crate::encoding::amplitude_encode;
    use crate::sim::gates::{adjoint2, Mat2};
    use nalgebra::DMatrix;
    use num_complex::Complex64 as C64;
    use std::f64::consts::TAU;

    fn rng(seed: u64) -> impl FnMut() -> f64 {
        let mut s = seed.wrapping_mul(0x2545F4914F6CDD1D) | 1;
        move || {
            s ^= s >> 12;
            s ^= s << 25;
            s ^= s >> 27;
            (s.wrapping_mul(0x2545F4914F6CDD1D) >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    fn m2(u: &Mat2) -> DMatrix<C64> {
        DMatrix::from_fn(2, 2, |r, c| u[r][c])
    }

    /// `A_{n-1} ⊗ … ⊗ A_0` with `parts[q]` acting on qubit `q`.
    fn kron_all(parts: &[DMatrix<C64>]) -> DMatrix<C64> {
        let mut out = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for p in parts.iter().rev() {
            out = out.kronecker(p);
        }
        out
    }

    fn embed(n: usize, ops: &[(QubitIndex, DMatrix<C64>)]) -> DMatrix<C64> {
        let mut parts = vec![DMatrix::<C64>::identity(2, 2); n];
        for (q, m) in ops {
            parts[*q] = m.clone();
        }
        kron_all(&parts)
    }

    fn gate_unitary(op: &GateOp, params: &[f64], n: usize) -> DMatrix<C64> {
        // Angles bound in forward orientation; adjoint taken on the matrix.
        let mut a = [0.0; 3];
        for (i, &s) in op.slots.iter().enumerate() {
            a[i] = params[s];
        }
        let u = op.kind.target_matrix(a);
        let u = if op.adjoint { adjoint2(&u) } else { u };
        if op.qubits.len() == 1 {
            return embed(n, &[(op.qubits[0], m2(&u))]);
        }
        let (c, t) = (op.qubits[0], op.qubits[1]);
        let p0 = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::default(), C64::default(), C64::default()]);
        let p1 = DMatrix::from_row_slice(2, 2, &[C64::default(), C64::default(), C64::default(), C64::new(1.0, 0.0)]);
        embed(n, &[(c, p0)]) + embed(n, &[(c, p1), (t, m2(&u))])
    }

    fn circuit_unitary(spec: &CircuitSpec, params: &[f64]) -> DMatrix<C64> {
        let d = 1 << spec.n_qubits();
        spec.ops()
            .iter()
            .fold(DMatrix::identity(d, d), |acc, op| gate_unitary(op, params, spec.n_qubits()) * acc)
    }

    /// `D (Tr_t[E ρ E†] ⊗ |0⟩⟨0|_t) D†` via reset Kraus operators `|0⟩⟨b|`.
    fn oracle_overlap(enc: &CircuitSpec, th: &[f64], dec: &CircuitSpec, thd: &[f64], phi: &StateVector) -> f64 {
        let n = enc.n_qubits();
        let v = DMatrix::from_column_slice(1 << n, 1, phi.amplitudes());
        let rho = &v * v.adjoint();
        let u = circuit_unitary(enc, th);
        let rho = &u * rho * u.adjoint();
        let zero = C64::new(1.0, 0.0);
        let mut reset = rho.clone();
        for &q in enc.trash() {
            let k0 = DMatrix::from_row_slice(2, 2, &[zero, C64::default(), C64::default(), C64::default()]);
            let k1 = DMatrix::from_row_slice(2, 2, &[C64::default(), zero, C64::default(), C64::default()]);
            let e0 = embed(n, &[(q, k0)]);
            let e1 = embed(n, &[(q, k1)]);
            reset = &e0 * &reset * e0.adjoint() + &e1 * &reset * e1.adjoint();
        }
        let w = circuit_unitary(dec, thd);
        let out = &w * reset * w.adjoint();
        (v.adjoint() * out * v)[(0, 0)].re
    }

    fn instances() -> Vec<CircuitSpec> {
        vec![
            build_qcnn(4, 2, ConvType::Type1, PoolKind::Zx).unwrap(),
            build_qcnn(4, 1, ConvType::Type3, PoolKind::Generalized).unwrap(),
            build_qcnn(4, 2, ConvType::Type2, PoolKind::None).unwrap(),
            build_arch_a(4).unwrap().with_compressed_count(2).unwrap(),
            build_arch_b(4).unwrap(),
        ]
    }

    #[test]
    fn ancilla_and_contracted_paths_match_density_oracle() {
        let mut r = rng(17);
        let specs = instances();
        for i in 0..20 {
            let enc = &specs[i % specs.len()];
            let dec = decoder_for(enc);
            let th: Vec<f64> = (0..enc.n_params()).map(|_| r() * TAU).collect();
            let thd: Vec<f64> = (0..dec.n_params()).map(|_| r() * TAU).collect();
            let x: Vec<f64> = (0..16).map(|_| r() - 0.5).collect();
            let phi = amplitude_encode(&x).unwrap();
            let want = oracle_overlap(enc, &th, &dec, &thd, &phi);
            let a = reconstruction_overlap_ancilla(enc, &th, &dec, &thd, &phi).unwrap();
            let b = reconstruction_overlap(enc, &th, &dec, &thd, &phi).unwrap();
            assert!((a - want).abs() < 1e-8, "instance {i}: ancilla {a} vs oracle {want}");
            assert!((b - want).abs() < 1e-8, "instance {i}: contracted {b} vs oracle {want}");
        }
    }

    #[test]
    fn no_compression_tied_decoder_is_lossless() {
        let enc = build_qcnn(4, 2, ConvType::Type1, PoolKind::Zx)
            .unwrap()
            .with_compressed_count(4)
            .unwrap();
        let dec = decoder_for(&enc);
        let mut r = rng(3);
        let th: Vec<f64> = (0..enc.n_params()).map(|_| r() * TAU).collect();
        let phi = amplitude_encode(&(0..16).map(|_| r()).collect::<Vec<_>>()).unwrap();
        assert!(reconstruction_loss(&enc, &th, &dec, &th, &phi).unwrap().abs() < 1e-10);
        let a = reconstruction_overlap_ancilla(&enc, &th, &dec, &th, &phi).unwrap();
        assert!((a - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let enc = build_qcnn(4, 1, ConvType::Type3, PoolKind::Zx).unwrap();
        let dec = decoder_for(&enc);
        let mut r = rng(5);
        let th: Vec<f64> = (0..enc.n_params()).map(|_| r() * TAU).collect();
        let thd: Vec<f64> = (0..dec.n_params()).map(|_| r() * TAU).collect();
        let phi = amplitude_encode(&(0..16).map(|_| r() - 0.3).collect::<Vec<_>>()).unwrap();
        for method in [GradientMethod::ParameterShift, GradientMethod::Adjoint] {
            let mut ge = vec![0.0; th.len()];
            let mut gd = vec![0.0; thd.len()];
            let loss = reconstruction_loss_grad(&enc, &th, &dec, &thd, &phi, method, 1.0, &mut ge, &mut gd).unwrap();
            assert!((loss - reconstruction_loss(&enc, &th, &dec, &thd, &phi).unwrap()).abs() < 1e-12);
            let h = 1e-5;
            for j in 0..th.len() {
                let (mut up, mut dn) = (th.clone(), th.clone());
                up[j] += h;
                dn[j] -= h;
                let fd = (reconstruction_loss(&enc, &up, &dec, &thd, &phi).unwrap()
                    - reconstruction_loss(&enc, &dn, &dec, &thd, &phi).unwrap())
                    / (2.0 * h);
                assert!((fd - ge[j]).abs() < 1e-8, "{method} enc {j}");
                let (mut up, mut dn) = (thd.clone(), thd.clone());
                up[j] += h;
                dn[j] -= h;
                let fd = (reconstruction_loss(&enc, &th, &dec, &up, &phi).unwrap()
                    - reconstruction_loss(&enc, &th, &dec, &dn, &phi).unwrap())
                    / (2.0 * h);
                assert!((fd - gd[j]).abs() < 1e-8, "{method} dec {j}");
            }
        }
    }

    #[test]
    fn decoder_map_moves_trash_to_ancillas() {
        let enc = build_qcnn(4, 2, ConvType::Type2, PoolKind::Zx).unwrap();
        let map = decoder_map(&enc);
        for (j, &q) in enc.trash().iter().enumerate() {
            assert_eq!(map[q], 4 + j);
        }
        for &q in enc.compressed() {
            assert_eq!(map[q], q);
        }
    }

    #[test]
    fn rejects_mismatched_decoder() {
        let enc = build_qcnn(4, 2, ConvType::Type2, PoolKind::Zx).unwrap();
        let dec = build_arch_b(4).unwrap().with_compressed_count(2).unwrap();
        let phi = StateVector::zero(4).unwrap();
        assert!(reconstruction_loss(&enc, &vec![0.0; enc.n_params()], &dec, &vec![0.0; dec.n_params()], &phi).is_err());
    }
}
