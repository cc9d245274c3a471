//! Hermitian observables whose expectation values drive training.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::sim::density::scatter_bits;
use crate::sim::{QubitIndex, StateVector};

/// A Hermitian operator `O` on the full register.
pub trait Observable: Sync {
    /// `⟨ψ|O|ψ⟩`.
    fn expectation(&self, state: &StateVector) -> f64;
    /// `O|ψ⟩` (not normalized).
    fn apply(&self, state: &StateVector) -> StateVector;
}

/// `Σᵢ wᵢ · |1⟩⟨1|_{qᵢ}` over the trash qubits.
#[derive(Debug, Clone)]
pub struct TrashWeights {
    pub qubits: Vec<QubitIndex>,
    pub weights: Vec<f64>,
}

impl TrashWeights {
    fn weight_of(&self, index: usize) -> f64 {
        self.qubits
            .iter()
            .zip(&self.weights)
            .filter(|(&q, _)| index >> q & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }
}

impl Observable for TrashWeights {
    fn expectation(&self, state: &StateVector) -> f64 {
        self.qubits
            .iter()
            .zip(&self.weights)
            .map(|(&q, w)| w * state.prob_one_unchecked(q))
            .sum()
    }

    fn apply(&self, state: &StateVector) -> StateVector {
        let amps = state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| a * self.weight_of(i))
            .collect();
        StateVector::from_raw(state.n_qubits(), amps)
    }
}

/// Basis-index bookkeeping for a compressed/trash split: the full index is
/// `comp[c] | trash[t]`, with bit `j` of `c` on `compressed[j]` and bit `j`
/// of `t` on `trash[j]`.
#[derive(Debug, Clone)]
pub struct Partition {
    pub comp: Vec<usize>,
    pub trash: Vec<usize>,
}

impl Partition {
    pub fn new(compressed: &[QubitIndex], trash: &[QubitIndex]) -> Self {
        Self {
            comp: (0..1usize << compressed.len()).map(|v| scatter_bits(v, compressed)).collect(),
            trash: (0..1usize << trash.len()).map(|v| scatter_bits(v, trash)).collect(),
        }
    }

    /// Compressed-register slice with the trash bits fixed to `t`.
    pub fn slice(&self, state: &StateVector, t: usize) -> Vec<C64> {
        let amps = state.amplitudes();
        let off = self.trash[t];
        self.comp.iter().map(|&c| amps[c | off]).collect()
    }

    /// Reduced density matrix of the compressed register (trash traced out).
    pub fn reduced(&self, state: &StateVector) -> DMatrix<C64> {
        let k = self.comp.len();
        let mut rho = DMatrix::<C64>::zeros(k, k);
        for t in 0..self.trash.len() {
            let v = self.slice(state, t);
            for r in 0..k {
                for c in 0..k {
                    rho[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        rho
    }
}

/// `I_trash ⊗ |χ⟩⟨χ|_compressed` for an unnormalized compressed vector `χ`.
#[derive(Debug, Clone)]
pub struct CompressedProjector {
    pub partition: Partition,
    pub chi: Vec<C64>,
}

impl CompressedProjector {
    fn inner(&self, state: &StateVector, t: usize) -> C64 {
        let amps = state.amplitudes();
        let off = self.partition.trash[t];
        self.partition
            .comp
            .iter()
            .zip(&self.chi)
            .map(|(&c, x)| x.conj() * amps[c | off])
            .sum()
    }
}

impl Observable for CompressedProjector {
    fn expectation(&self, state: &StateVector) -> f64 {
        (0..self.partition.trash.len())
            .map(|t| self.inner(state, t).norm_sqr())
            .sum()
    }

    fn apply(&self, state: &StateVector) -> StateVector {
        let mut out = vec![C64::new(0.0, 0.0); state.dim()];
        for t in 0..self.partition.trash.len() {
            let s = self.inner(state, t);
            let off = self.partition.trash[t];
            for (&c, x) in self.partition.comp.iter().zip(&self.chi) {
                out[c | off] = x * s;
            }
        }
        StateVector::from_raw(state.n_qubits(), out)
    }
}

/// `|0⟩⟨0|_trash ⊗ ρ_compressed`.
#[derive(Debug, Clone)]
pub struct TrashZeroDensity {
    pub partition: Partition,
    pub rho: DMatrix<C64>,
}

impl TrashZeroDensity {
    fn rho_times(&self, state: &StateVector) -> (Vec<C64>, Vec<C64>) {
        let v = self.partition.slice(state, 0);
        let k = v.len();
        let rv = (0..k).map(|r| (0..k).map(|c| self.rho[(r, c)] * v[c]).sum()).collect();
        (v, rv)
    }
}

impl Observable for TrashZeroDensity {
    fn expectation(&self, state: &StateVector) -> f64 {
        let (v, rv) = self.rho_times(state);
        v.iter().zip(&rv).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }

    fn apply(&self, state: &StateVector) -> StateVector {
        let (_, rv) = self.rho_times(state);
        let mut out = vec![C64::new(0.0, 0.0); state.dim()];
        let off = self.partition.trash[0];
        for (&c, x) in self.partition.comp.iter().zip(rv) {
            out[c | off] = x;
        }
        StateVector::from_raw(state.n_qubits(), out)
    }
}
