use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::state::{QubitIndex, StateVector, MAX_QUBITS};
use crate::error::{validation, QaeError, Result};

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-9;
const PURITY_TOL: f64 = 1e-10;

/// Mixed state on `n` qubits, stored as a dense `2^n × 2^n` matrix.
/// Row/column indices use the same little-endian labelling as [`StateVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity before wrapping.
    pub fn from_matrix(n_qubits: usize, mat: DMatrix<C64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS / 2 {
            return Err(QaeError::Capacity(format!(
                "density matrix on {n_qubits} qubits not supported"
            )));
        }
        let dim = 1usize << n_qubits;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(QaeError::DimensionMismatch {
                expected: dim,
                got: mat.nrows().max(mat.ncols()),
            });
        }
        let herm_err = (&mat - mat.adjoint()).camax();
        if herm_err > HERMITIAN_TOL {
            return validation(format!("matrix is not Hermitian (max deviation {herm_err:e})"));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return validation(format!("trace {tr} is not 1"));
        }
        let min_eig = hermitian_eigenvalues(&mat)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -EIGEN_TOL {
            return validation(format!("matrix has negative eigenvalue {min_eig:e}"));
        }
        Ok(Self { n_qubits, mat })
    }

    pub(crate) fn from_matrix_unchecked(n_qubits: usize, mat: DMatrix<C64>) -> Self {
        Self { n_qubits, mat }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self {
            n_qubits: state.n_qubits(),
            mat: &v * v.adjoint(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        trace_of_product(&self.mat, &self.mat)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    /// Reduced state on `keep`. Kept qubits are relabelled `0..keep.len()` in
    /// ascending order of their original index.
    pub fn partial_trace(&self, keep: &[QubitIndex]) -> Result<DensityMatrix> {
        let (kept, traced) = split_offsets(self.n_qubits, keep)?;
        let k = kept.len();
        let mut out = DMatrix::<C64>::zeros(k, k);
        for r in 0..k {
            for c in 0..k {
                out[(r, c)] = traced
                    .iter()
                    .map(|&t| self.mat[(kept[r] | t, kept[c] | t)])
                    .sum();
            }
        }
        Ok(Self::from_matrix_unchecked(keep.len(), out))
    }

    /// `self ⊗ |0⟩⟨0|^{⊗t}` with the new qubits appended as the most
    /// significant labels (`n..n+t`).
    pub fn tensor_with_zeros(&self, t: usize) -> Result<DensityMatrix> {
        if t == 0 {
            return validation("tensor_with_zeros needs at least one new qubit");
        }
        let n = self.n_qubits + t;
        if n > MAX_QUBITS / 2 {
            return Err(QaeError::Capacity(format!("density matrix on {n} qubits")));
        }
        let d = self.dim();
        let mut out = DMatrix::<C64>::zeros(d << t, d << t);
        out.view_mut((0, 0), (d, d)).copy_from(&self.mat);
        Ok(Self::from_matrix_unchecked(n, out))
    }

    fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() < PURITY_TOL
    }
}

impl StateVector {
    /// Reduced density matrix of this pure state on `keep` (see
    /// [`DensityMatrix::partial_trace`] for the labelling).
    pub fn partial_trace(&self, keep: &[QubitIndex]) -> Result<DensityMatrix> {
        let (kept, traced) = split_offsets(self.n_qubits(), keep)?;
        let amps = self.amplitudes();
        let k = kept.len();
        let mut out = DMatrix::<C64>::zeros(k, k);
        for &t in &traced {
            for r in 0..k {
                let a = amps[kept[r] | t];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..k {
                    out[(r, c)] += a * amps[kept[c] | t].conj();
                }
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(keep.len(), out))
    }
}

/// Spreads the bits of `value` onto the qubit positions in `positions`
/// (bit j of `value` lands on `positions[j]`).
pub(crate) fn scatter_bits(value: usize, positions: &[QubitIndex]) -> usize {
    positions
        .iter()
        .enumerate()
        .filter(|(j, _)| value >> j & 1 == 1)
        .fold(0, |acc, (_, &q)| acc | 1 << q)
}

/// Basis offsets for kept and traced qubit subsets.
fn split_offsets(n: usize, keep: &[QubitIndex]) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return validation("partial trace needs a non-empty keep set");
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return validation("keep set contains duplicate qubits");
    }
    if let Some(&q) = sorted.iter().find(|&&q| q >= n) {
        return validation(format!("qubit {q} out of range for {n} qubits"));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !sorted.contains(q)).collect();
    let kept_off = (0..1usize << sorted.len())
        .map(|v| scatter_bits(v, &sorted))
        .collect();
    let traced_off = (0..1usize << traced.len())
        .map(|v| scatter_bits(v, &traced))
        .collect();
    Ok((kept_off, traced_off))
}

fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    sym.symmetric_eigenvalues().iter().copied().collect()
}

/// `Re Tr(a·b)` without forming the product.
fn trace_of_product(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            acc += a[(r, c)] * b[(c, r)];
        }
    }
    acc.re
}

fn check_same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(QaeError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(())
}

/// Uhlmann fidelity `(Tr√(√a b √a))²`.
///
/// When either argument is pure this reduces to `Tr(a·b)`, which is used
/// directly; otherwise `√a` comes from a Hermitian eigendecomposition.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_same_dim(a, b)?;
    let f = if a.is_pure() || b.is_pure() {
        trace_of_product(&a.mat, &b.mat)
    } else {
        let eig = ((&a.mat + a.mat.adjoint()) * C64::new(0.5, 0.0)).symmetric_eigen();
        let sqrt_vals = eig
            .eigenvalues
            .map(|l| C64::new(l.max(0.0).sqrt(), 0.0));
        let sqrt_a = &eig.eigenvectors
            * DMatrix::from_diagonal(&sqrt_vals)
            * eig.eigenvectors.adjoint();
        let inner = &sqrt_a * &b.mat * &sqrt_a;
        let s: f64 = hermitian_eigenvalues(&inner)
            .into_iter()
            .map(|l| l.max(0.0).sqrt())
            .sum();
        s * s
    };
    Ok(f.clamp(0.0, 1.0))
}

/// `½‖a − b‖₁` from the eigenvalues of `a − b`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_same_dim(a, b)?;
    let diff = &a.mat - &b.mat;
    let d: f64 = hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>() / 2.0;
    Ok(d.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn dm(n: usize, rows: &[&[f64]]) -> DensityMatrix {
        let d = rows.len();
        let m = DMatrix::from_fn(d, d, |r, c| C64::new(rows[r][c], 0.0));
        DensityMatrix::from_matrix(n, m).unwrap()
    }

    fn close(a: &DMatrix<C64>, b: &DMatrix<C64>, tol: f64) -> bool {
        (a - b).camax() < tol
    }

    fn ket0() -> DensityMatrix {
        dm(1, &[&[1., 0.], &[0., 0.]])
    }
    fn ket1() -> DensityMatrix {
        dm(1, &[&[0., 0.], &[0., 1.]])
    }
    fn plus() -> DensityMatrix {
        dm(1, &[&[0.5, 0.5], &[0.5, 0.5]])
    }

    #[test]
    fn partial_trace_examples() {
        let z = StateVector::zero(2).unwrap();
        let r = z.partial_trace(&[0]).unwrap();
        assert!(close(r.matrix(), ket0().matrix(), 1e-12));

        let bell = StateVector::from_real(2, &[FRAC_1_SQRT_2, 0., 0., FRAC_1_SQRT_2]).unwrap();
        let r = bell.partial_trace(&[0]).unwrap();
        let half = dm(1, &[&[0.5, 0.], &[0., 0.5]]);
        assert!(close(r.matrix(), half.matrix(), 1e-12));

        let psi = StateVector::from_real(1, &[0.6, 0.8]).unwrap();
        let phi = StateVector::from_real(1, &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
        let prod = psi.tensor(&phi).unwrap();
        let r = prod.partial_trace(&[0]).unwrap();
        assert!(close(r.matrix(), DensityMatrix::from_pure(&psi).matrix(), 1e-12));

        assert!(matches!(z.partial_trace(&[]), Err(QaeError::Validation(_))));
        assert!(z.partial_trace(&[2]).is_err());
    }

    #[test]
    fn density_partial_trace_agrees_with_pure_path() {
        let amps: Vec<f64> = (1..=8).map(|k| k as f64).collect();
        let n = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        let s = StateVector::from_real(3, &amps.iter().map(|a| a / n).collect::<Vec<_>>()).unwrap();
        let rho = DensityMatrix::from_pure(&s);
        for keep in [vec![0], vec![1, 2], vec![0, 2], vec![2]] {
            let a = s.partial_trace(&keep).unwrap();
            let b = rho.partial_trace(&keep).unwrap();
            assert!(close(a.matrix(), b.matrix(), 1e-12));
            assert!((a.trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_examples() {
        assert!((fidelity(&plus(), &plus()).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&ket0(), &ket1()).unwrap().abs() < 1e-12);
        assert!((fidelity(&ket0(), &plus()).unwrap() - 0.5).abs() < 1e-12);
        let two = DensityMatrix::from_pure(&StateVector::zero(2).unwrap());
        assert!(matches!(
            fidelity(&ket0(), &two),
            Err(QaeError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_mixed_path() {
        let a = dm(1, &[&[0.7, 0.1], &[0.1, 0.3]]);
        let b = dm(1, &[&[0.4, -0.2], &[-0.2, 0.6]]);
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        assert!((fab - fba).abs() < 1e-9);
        // Qubit closed form: F = Tr(ab) + 2√(det a · det b).
        let tr_ab = 0.7 * 0.4 - 0.1 * 0.2 - 0.1 * 0.2 + 0.3 * 0.6;
        let closed = tr_ab + 2.0 * ((0.21 - 0.01f64) * (0.24 - 0.04)).sqrt();
        assert!((fab - closed).abs() < 1e-10, "{fab} vs {closed}");
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn trace_distance_examples() {
        assert!(trace_distance(&plus(), &plus()).unwrap().abs() < 1e-12);
        assert!((trace_distance(&ket0(), &ket1()).unwrap() - 1.0).abs() < 1e-12);
        assert!((trace_distance(&ket0(), &plus()).unwrap() - FRAC_1_SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn tensor_with_zeros_examples() {
        let half = dm(1, &[&[0.5, 0.], &[0., 0.5]]);
        let t = half.tensor_with_zeros(1).unwrap();
        // Kronecker oracle: new qubit is the more significant factor.
        let zero = DMatrix::from_row_slice(2, 2, &[1., 0., 0., 0.].map(|x| C64::new(x, 0.)));
        assert!(close(t.matrix(), &zero.kronecker(half.matrix()), 1e-15));
        let diag: Vec<f64> = (0..4).map(|i| t.matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![0.5, 0.5, 0.0, 0.0]);

        let t = ket0().tensor_with_zeros(1).unwrap();
        let expect = DensityMatrix::from_pure(&StateVector::zero(2).unwrap());
        assert!(close(t.matrix(), expect.matrix(), 1e-15));
        assert!((plus().tensor_with_zeros(3).unwrap().trace().re - 1.0).abs() < 1e-15);
        assert!(ket0().tensor_with_zeros(0).is_err());
    }

    #[test]
    fn from_matrix_rejects_invalid() {
        let m = |v: [f64; 4]| DMatrix::from_row_slice(2, 2, &v.map(|x| C64::new(x, 0.)));
        assert!(DensityMatrix::from_matrix(1, m([0.5, 0.1, 0.2, 0.5])).is_err());
        assert!(DensityMatrix::from_matrix(1, m([0.6, 0., 0., 0.6])).is_err());
        assert!(DensityMatrix::from_matrix(1, m([1.2, 0., 0., -0.2])).is_err());
        assert!(DensityMatrix::from_matrix(2, m([1., 0., 0., 0.])).is_err());
    }
}
