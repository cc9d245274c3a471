use num_complex::Complex64 as C64;

use super::gates::{is_unitary2, is_unitary4, Mat2, Mat4};
use crate::error::{validation, QaeError, Result};

/// Largest register the simulator will allocate (2^24 amplitudes ≈ 256 MB).
pub const MAX_QUBITS: usize = 24;

pub const UNITARY_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-9;

/// Index of a qubit inside a register. Qubit 0 is the least significant bit
/// of the basis-state label.
pub type QubitIndex = usize;

/// Single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Pure state of `n` qubits stored as `2^n` complex amplitudes.
///
/// Gate methods mutate in place; the state has a single owner and is
/// otherwise treated as a value (clone to branch).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(QaeError::Capacity(format!(
            "qubit count {n} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        check_count(n)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    /// Builds a state from explicit amplitudes. The vector must have length
    /// `2^n` and unit norm within `1e-9`.
    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        check_count(n)?;
        if amps.len() != 1 << n {
            return Err(QaeError::DimensionMismatch {
                expected: 1 << n,
                got: amps.len(),
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return validation(format!("amplitude vector has norm {norm}, expected 1"));
        }
        Ok(Self { n_qubits: n, amps })
    }

    pub fn from_real(n: usize, amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(n, amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Wraps amplitudes without the normalization check. Used internally for
    /// intermediate vectors (e.g. `O|ψ⟩`) that are not states.
    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Product state with `self` on the low qubits and `high` on qubits
    /// `self.n_qubits()..`.
    pub fn tensor(&self, high: &StateVector) -> Result<StateVector> {
        let n = self.n_qubits + high.n_qubits;
        check_count(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for h in &high.amps {
            amps.extend(self.amps.iter().map(|l| l * h));
        }
        Ok(Self { n_qubits: n, amps })
    }

    pub(crate) fn check_qubit(&self, q: QubitIndex) -> Result<()> {
        if q >= self.n_qubits {
            return validation(format!(
                "qubit {q} out of range for a {}-qubit state",
                self.n_qubits
            ));
        }
        Ok(())
    }

    /// Applies a 2×2 unitary to qubit `q`.
    pub fn apply_1q(&mut self, u: &Mat2, q: QubitIndex) -> Result<()> {
        self.check_qubit(q)?;
        if !is_unitary2(u, UNITARY_TOL) {
            return validation("single-qubit matrix is not unitary");
        }
        self.apply_mat2(u, q);
        Ok(())
    }

    /// Applies a 4×4 unitary to the ordered pair `(q1, q2)`; `q1` is the
    /// more significant bit of `u`'s basis ordering.
    pub fn apply_2q(&mut self, u: &Mat4, q1: QubitIndex, q2: QubitIndex) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return validation("two-qubit gate needs distinct qubits");
        }
        if !is_unitary4(u, UNITARY_TOL) {
            return validation("two-qubit matrix is not unitary");
        }
        self.apply_mat4(u, q1, q2);
        Ok(())
    }

    /// Unchecked kernel; also used for non-unitary matrices (gate derivatives).
    pub(crate) fn apply_mat2(&mut self, u: &Mat2, q: QubitIndex) {
        let s = 1usize << q;
        let [[u00, u01], [u10, u11]] = *u;
        for base in (0..self.amps.len()).step_by(2 * s) {
            let (lo, hi) = self.amps[base..base + 2 * s].split_at_mut(s);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = u00 * x + u01 * y;
                *b = u10 * x + u11 * y;
            }
        }
    }

    /// Applies `u` to `target` on the subspace where `control` is 1.
    pub(crate) fn apply_controlled(&mut self, u: &Mat2, control: QubitIndex, target: QubitIndex) {
        let s = 1usize << target;
        let cmask = 1usize << control;
        let [[u00, u01], [u10, u11]] = *u;
        for base in (0..self.amps.len()).step_by(2 * s) {
            for i in base..base + s {
                if i & cmask == 0 {
                    continue;
                }
                let (x, y) = (self.amps[i], self.amps[i + s]);
                self.amps[i] = u00 * x + u01 * y;
                self.amps[i + s] = u10 * x + u11 * y;
            }
        }
    }

    /// `⟨self| (u on q) |psi⟩` without forming the product.
    pub(crate) fn sandwich_mat2(&self, u: &Mat2, q: QubitIndex, psi: &StateVector) -> C64 {
        let s = 1usize << q;
        let [[u00, u01], [u10, u11]] = *u;
        let mut acc = C64::new(0.0, 0.0);
        for base in (0..self.amps.len()).step_by(2 * s) {
            let (l0, l1) = self.amps[base..base + 2 * s].split_at(s);
            let (p0, p1) = psi.amps[base..base + 2 * s].split_at(s);
            for i in 0..s {
                let (x, y) = (p0[i], p1[i]);
                acc += l0[i].conj() * (u00 * x + u01 * y) + l1[i].conj() * (u10 * x + u11 * y);
            }
        }
        acc
    }

    /// `⟨self| (|1⟩⟨1|_control ⊗ u_target) |psi⟩`.
    pub(crate) fn sandwich_controlled(
        &self,
        u: &Mat2,
        control: QubitIndex,
        target: QubitIndex,
        psi: &StateVector,
    ) -> C64 {
        let s = 1usize << target;
        let cmask = 1usize << control;
        let [[u00, u01], [u10, u11]] = *u;
        let mut acc = C64::new(0.0, 0.0);
        for base in (0..self.amps.len()).step_by(2 * s) {
            for i in base..base + s {
                if i & cmask == 0 {
                    continue;
                }
                let (x, y) = (psi.amps[i], psi.amps[i + s]);
                acc += self.amps[i].conj() * (u00 * x + u01 * y) + self.amps[i + s].conj() * (u10 * x + u11 * y);
            }
        }
        acc
    }

    pub(crate) fn apply_cnot(&mut self, control: QubitIndex, target: QubitIndex) {
        let s = 1usize << target;
        let cmask = 1usize << control;
        for base in (0..self.amps.len()).step_by(2 * s) {
            for i in base..base + s {
                if i & cmask != 0 {
                    self.amps.swap(i, i + s);
                }
            }
        }
    }

    pub(crate) fn apply_x(&mut self, q: QubitIndex) {
        let s = 1usize << q;
        for base in (0..self.amps.len()).step_by(2 * s) {
            let (lo, hi) = self.amps[base..base + 2 * s].split_at_mut(s);
            lo.swap_with_slice(hi);
        }
    }

    pub(crate) fn apply_mat4(&mut self, u: &Mat4, q1: QubitIndex, q2: QubitIndex) {
        let (m1, m2) = (1usize << q1, 1usize << q2);
        for i in 0..self.amps.len() {
            if i & (m1 | m2) != 0 {
                continue;
            }
            let idx = [i, i | m2, i | m1, i | m1 | m2];
            let v = idx.map(|k| self.amps[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amps[k] = u[r][0] * v[0] + u[r][1] * v[1] + u[r][2] * v[2] + u[r][3] * v[3];
            }
        }
    }

    /// Probability of reading `1` on qubit `q`.
    pub fn prob_one(&self, q: QubitIndex) -> Result<f64> {
        self.check_qubit(q)?;
        Ok(self.prob_one_unchecked(q))
    }

    pub(crate) fn prob_one_unchecked(&self, q: QubitIndex) -> f64 {
        let m = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// `⟨ψ|P_q|ψ⟩` for a single-qubit Pauli on `q`.
    pub fn expectation_pauli(&self, q: QubitIndex, axis: Axis) -> Result<f64> {
        let [x, y, z] = self.bloch_vector(q)?;
        Ok(match axis {
            Axis::X => x,
            Axis::Y => y,
            Axis::Z => z,
        })
    }

    /// `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of qubit `q` in one pass.
    pub fn bloch_vector(&self, q: QubitIndex) -> Result<[f64; 3]> {
        self.check_qubit(q)?;
        let s = 1usize << q;
        let (mut p0, mut p1) = (0.0, 0.0);
        let mut rho01 = C64::new(0.0, 0.0);
        for base in (0..self.amps.len()).step_by(2 * s) {
            for i in base..base + s {
                let (a, b) = (self.amps[i], self.amps[i + s]);
                p0 += a.norm_sqr();
                p1 += b.norm_sqr();
                rho01 += a * b.conj();
            }
        }
        Ok([2.0 * rho01.re, -2.0 * rho01.im, p0 - p1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::gates::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_amps(s: &StateVector, expected: &[C64]) {
        assert_eq!(s.dim(), expected.len());
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-12, "{:?} vs {:?}", s.amplitudes(), expected);
        }
    }

    #[test]
    fn zero_state_examples() {
        assert_amps(&StateVector::zero(1).unwrap(), &[c(1., 0.), c(0., 0.)]);
        assert_amps(&StateVector::zero(2).unwrap(), &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        let s3 = StateVector::zero(3).unwrap();
        assert_eq!(s3.dim(), 8);
        assert_eq!(s3.amplitudes()[0], c(1., 0.));
        assert!(matches!(StateVector::zero(0), Err(QaeError::Capacity(_))));
        assert!(matches!(StateVector::zero(25), Err(QaeError::Capacity(_))));
    }

    #[test]
    fn single_qubit_examples() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_1q(&ry(PI), 0).unwrap();
        assert_amps(&s, &[c(0., 0.), c(1., 0.)]);

        let mut s = StateVector::from_real(1, &[0.6, 0.8]).unwrap();
        s.apply_1q(&ry(0.0), 0).unwrap();
        assert_amps(&s, &[c(0.6, 0.), c(0.8, 0.)]);

        let mut s = StateVector::zero(1).unwrap();
        s.apply_1q(&rx(PI / 2.0), 0).unwrap();
        assert_amps(&s, &[c(FRAC_1_SQRT_2, 0.), c(0., -FRAC_1_SQRT_2)]);

        let bad = [[c(1., 0.), c(1., 0.)], [c(0., 0.), c(1., 0.)]];
        assert!(matches!(s.apply_1q(&bad, 0), Err(QaeError::Validation(_))));
        assert!(s.apply_1q(&ry(0.1), 3).is_err());
    }

    #[test]
    fn two_qubit_examples() {
        let mut s = StateVector::from_real(2, &[0., 1., 0., 0.]).unwrap();
        s.apply_2q(&cnot4(), 0, 1).unwrap();
        assert_amps(&s, &[c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);

        let mut s = StateVector::zero(2).unwrap();
        s.apply_2q(&cnot4(), 0, 1).unwrap();
        assert_amps(&s, &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);

        let mut s = StateVector::from_real(2, &[0., 0.6, 0.8, 0.]).unwrap();
        s.apply_2q(&swap4(), 0, 1).unwrap();
        assert_amps(&s, &[c(0., 0.), c(0.8, 0.), c(0.6, 0.), c(0., 0.)]);

        assert!(matches!(s.apply_2q(&swap4(), 1, 1), Err(QaeError::Validation(_))));
    }

    #[test]
    fn fast_kernels_agree_with_dense_two_qubit_kernel() {
        let amps: Vec<C64> = (0..8).map(|k| c(0.1 * k as f64 + 0.05, 0.03 * k as f64)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let base = StateVector::from_amplitudes(3, amps.iter().map(|a| a / norm).collect()).unwrap();
        for (ctl, tgt) in [(0, 1), (2, 0), (1, 2)] {
            let mut a = base.clone();
            a.apply_cnot(ctl, tgt);
            let mut b = base.clone();
            b.apply_mat4(&cnot4(), ctl, tgt);
            assert_amps(&a, b.amplitudes());

            let mut a = base.clone();
            a.apply_controlled(&u3(0.4, 1.0, -0.3), ctl, tgt);
            let mut b = base.clone();
            b.apply_mat4(&controlled4(&u3(0.4, 1.0, -0.3)), ctl, tgt);
            assert_amps(&a, b.amplitudes());
        }
        let mut a = base.clone();
        a.apply_x(1);
        let mut b = base.clone();
        b.apply_mat2(&pauli_x(), 1);
        assert_amps(&a, b.amplitudes());
    }

    #[test]
    fn set_amplitudes_examples() {
        assert_amps(
            &StateVector::from_real(2, &[1., 0., 0., 0.]).unwrap(),
            &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)],
        );
        assert!(matches!(
            StateVector::from_real(2, &[1., 0., 0.]),
            Err(QaeError::DimensionMismatch { expected: 4, got: 3 })
        ));
        assert!(matches!(StateVector::from_real(1, &[1., 1.]), Err(QaeError::Validation(_))));
    }

    #[test]
    fn marginal_examples() {
        let plus = StateVector::from_real(1, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!((plus.prob_one(0).unwrap() - 0.5).abs() < 1e-12);
        let z = StateVector::zero(4).unwrap();
        for q in 0..4 {
            assert_eq!(z.prob_one(q).unwrap(), 0.0);
        }
        let s = StateVector::from_real(1, &[0.6, 0.8]).unwrap();
        assert!((s.prob_one(0).unwrap() - 0.64).abs() < 1e-12);
        assert!(s.prob_one(1).is_err());
    }

    #[test]
    fn pauli_examples() {
        let z = StateVector::zero(1).unwrap();
        assert!((z.expectation_pauli(0, Axis::Z).unwrap() - 1.0).abs() < 1e-12);
        let plus = StateVector::from_real(1, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!((plus.expectation_pauli(0, Axis::X).unwrap() - 1.0).abs() < 1e-12);
        assert!(plus.expectation_pauli(0, Axis::Z).unwrap().abs() < 1e-12);
        let minus_i =
            StateVector::from_amplitudes(1, vec![c(FRAC_1_SQRT_2, 0.), c(0., -FRAC_1_SQRT_2)]).unwrap();
        assert!((minus_i.expectation_pauli(0, Axis::Y).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn bloch_vector_on_inner_qubit() {
        // |0⟩ ⊗ |+⟩ ⊗ |1⟩ with qubit 1 = |+⟩.
        let mut s = StateVector::zero(3).unwrap();
        s.apply_mat2(&hadamard(), 1);
        s.apply_x(2);
        let b = s.bloch_vector(1).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-12 && b[1].abs() < 1e-12 && b[2].abs() < 1e-12);
        assert!((s.bloch_vector(2).unwrap()[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_places_high_factor_on_upper_qubits() {
        let lo = StateVector::from_real(1, &[0.6, 0.8]).unwrap();
        let hi = StateVector::from_real(1, &[0.0, 1.0]).unwrap();
        let t = lo.tensor(&hi).unwrap();
        assert_amps(&t, &[c(0., 0.), c(0., 0.), c(0.6, 0.), c(0.8, 0.)]);
    }
}
