//! Encoder layouts: QCNN (convolution + pooling with per-layer weight
//! sharing) and the two programmable comparison circuits.

use std::fmt;
use std::str::FromStr;

use super::circuit::CircuitSpec;
use super::gate::{GateKind, GateOp};
use crate::error::{QaeError, Result};
use crate::sim::QubitIndex;

/// Two-qubit convolution ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConvType {
    /// General SU(4) block, 15 parameters.
    Type1,
    /// RY ⊗ RY then CNOT, 2 parameters.
    Type2,
    /// RY ⊗ RY then CRZ, 3 parameters.
    Type3,
}

impl ConvType {
    pub fn n_params(self) -> usize {
        match self {
            ConvType::Type1 => 15,
            ConvType::Type2 => 2,
            ConvType::Type3 => 3,
        }
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(ConvType::Type1),
            2 => Ok(ConvType::Type2),
            3 => Ok(ConvType::Type3),
            _ => Err(QaeError::Validation(format!("unknown convolution type {i}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            ConvType::Type1 => 1,
            ConvType::Type2 => 2,
            ConvType::Type3 => 3,
        }
    }
}

/// Pooling ansatz. `None` discards qubits without any gates (ablation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoolKind {
    Zx,
    Generalized,
    None,
}

impl PoolKind {
    pub fn n_params(self) -> usize {
        match self {
            PoolKind::Zx => 2,
            PoolKind::Generalized => 6,
            PoolKind::None => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PoolKind::Zx => "zx",
            PoolKind::Generalized => "generalized",
            PoolKind::None => "none",
        }
    }
}

impl fmt::Display for PoolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PoolKind {
    type Err = QaeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zx" => Ok(PoolKind::Zx),
            "generalized" => Ok(PoolKind::Generalized),
            "none" => Ok(PoolKind::None),
            _ => Err(QaeError::Validation(format!("unknown pooling kind '{s}'"))),
        }
    }
}

fn slots(base: usize, n: usize) -> Vec<usize> {
    (base..base + n).collect()
}

/// Convolution block on `(a, b)` reading parameters from `base_slot..`.
pub fn conv_block(kind: ConvType, pair: (QubitIndex, QubitIndex), base_slot: usize) -> Result<Vec<GateOp>> {
    let (a, b) = pair;
    if a == b {
        return Err(QaeError::Validation("convolution needs distinct qubits".into()));
    }
    let s = |k: usize| base_slot + k;
    use GateKind::*;
    Ok(match kind {
        ConvType::Type1 => vec![
            GateOp::one(U3, a, &slots(s(0), 3)),
            GateOp::one(U3, b, &slots(s(3), 3)),
            GateOp::two(Cnot, b, a, &[]),
            GateOp::one(Rz, a, &[s(6)]),
            GateOp::one(Ry, b, &[s(7)]),
            GateOp::two(Cnot, a, b, &[]),
            GateOp::one(Ry, b, &[s(8)]),
            GateOp::two(Cnot, b, a, &[]),
            GateOp::one(U3, a, &slots(s(9), 3)),
            GateOp::one(U3, b, &slots(s(12), 3)),
        ],
        ConvType::Type2 => vec![
            GateOp::one(Ry, a, &[s(0)]),
            GateOp::one(Ry, b, &[s(1)]),
            GateOp::two(Cnot, a, b, &[]),
        ],
        ConvType::Type3 => vec![
            GateOp::one(Ry, a, &[s(0)]),
            GateOp::one(Ry, b, &[s(1)]),
            GateOp::two(Crz, a, b, &[s(2)]),
        ],
    })
}

/// Pooling block; `control` is the qubit that gets discarded afterwards.
pub fn pool_block(kind: PoolKind, control: QubitIndex, target: QubitIndex, base_slot: usize) -> Result<Vec<GateOp>> {
    if control == target {
        return Err(QaeError::Validation("pooling needs distinct qubits".into()));
    }
    use GateKind::*;
    Ok(match kind {
        PoolKind::Zx => vec![
            GateOp::two(Crz, control, target, &[base_slot]),
            GateOp::one(X, control, &[]),
            GateOp::two(Crx, control, target, &[base_slot + 1]),
        ],
        PoolKind::Generalized => vec![
            GateOp::two(Cu3, control, target, &slots(base_slot, 3)),
            GateOp::one(X, control, &[]),
            GateOp::two(Cu3, control, target, &slots(base_slot + 3, 3)),
        ],
        PoolKind::None => Vec::new(),
    })
}

/// QCNN on `n = 2^m` qubits with `layers` convolution/pooling rounds.
///
/// Each round runs the convolution on even-adjacent active pairs, then on
/// odd-adjacent pairs closing the ring (skipped with two active qubits), then
/// pools each pair `(a₂ᵢ, a₂ᵢ₊₁)` discarding `a₂ᵢ`. All convolution blocks of
/// a round share one slot group, as do all pooling blocks. Active qubits
/// start as `0..n` in wire order.
pub fn build_qcnn(n: usize, layers: usize, conv: ConvType, pool: PoolKind) -> Result<CircuitSpec> {
    if n < 2 || !n.is_power_of_two() {
        return Err(QaeError::Validation(format!("QCNN width {n} is not a power of two ≥ 2")));
    }
    let depth = n.trailing_zeros() as usize;
    if layers > depth {
        return Err(QaeError::Validation(format!(
            "{layers} layers requested but {n} qubits allow at most {depth}"
        )));
    }
    let mut active: Vec<QubitIndex> = (0..n).collect();
    let mut ops = Vec::new();
    let mut trash = Vec::new();
    let mut n_params = 0;
    for _ in 0..layers {
        let m = active.len();
        let conv_base = n_params;
        n_params += conv.n_params();
        for i in (0..m).step_by(2) {
            ops.extend(conv_block(conv, (active[i], active[i + 1]), conv_base)?);
        }
        if m > 2 {
            for i in (1..m).step_by(2) {
                ops.extend(conv_block(conv, (active[i], active[(i + 1) % m]), conv_base)?);
            }
        }
        let pool_base = n_params;
        n_params += pool.n_params();
        let mut kept = Vec::with_capacity(m / 2);
        for i in (0..m).step_by(2) {
            ops.extend(pool_block(pool, active[i], active[i + 1], pool_base)?);
            trash.push(active[i]);
            kept.push(active[i + 1]);
        }
        active = kept;
    }
    CircuitSpec::new(n, ops, n_params, trash, active)
}

/// Programmable circuit with `n` layers of single-qubit rotations followed by
/// a fan of controlled rotations from qubit `k−1` onto every other qubit
/// (axis cycling X, Y, Z), closed by a final rotation layer. Compressed
/// qubit defaults to `n − 1`.
pub fn build_arch_a(n: usize) -> Result<CircuitSpec> {
    if n < 2 {
        return Err(QaeError::Validation("architecture A needs at least 2 qubits".into()));
    }
    let mut ops = Vec::new();
    let mut next = 0;
    let mut take = || {
        next += 1;
        next - 1
    };
    let rotation_layer = |ops: &mut Vec<GateOp>, take: &mut dyn FnMut() -> usize| {
        for q in 0..n {
            ops.push(GateOp::one(GateKind::Rz, q, &[take()]));
            ops.push(GateOp::one(GateKind::Ry, q, &[take()]));
        }
    };
    for layer in 0..n {
        rotation_layer(&mut ops, &mut take);
        let kind = [GateKind::Crx, GateKind::Cry, GateKind::Crz][layer % 3];
        for target in (0..n).filter(|&t| t != layer) {
            ops.push(GateOp::two(kind, layer, target, &[take()]));
        }
    }
    rotation_layer(&mut ops, &mut take);
    let n_params = take();
    CircuitSpec::new(n, ops, n_params, (0..n - 1).collect(), vec![n - 1])
}

/// Gate pairs of layer `k` (1-based) in architecture B: `(q, q + k)` for
/// `q = 0, k+1, 2(k+1), …` while `q + k < n`.
pub fn arch_b_pairs(n: usize, k: usize) -> Vec<(QubitIndex, QubitIndex)> {
    (0..n)
        .step_by(k + 1)
        .take_while(|q| q + k < n)
        .map(|q| (q, q + k))
        .collect()
}

/// Programmable circuit with `n − 1` layers of unshared Type-1 blocks; layer
/// `k` couples qubits `k` apart. Compressed qubit defaults to `n − 1`.
pub fn build_arch_b(n: usize) -> Result<CircuitSpec> {
    if n < 2 {
        return Err(QaeError::Validation("architecture B needs at least 2 qubits".into()));
    }
    let mut ops = Vec::new();
    let mut n_params = 0;
    for k in 1..n {
        for pair in arch_b_pairs(n, k) {
            ops.extend(conv_block(ConvType::Type1, pair, n_params)?);
            n_params += ConvType::Type1.n_params();
        }
    }
    CircuitSpec::new(n, ops, n_params, (0..n - 1).collect(), vec![n - 1])
}
