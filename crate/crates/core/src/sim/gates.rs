//! Fixed gate matrices and rotation families.
//!
//! Rotations follow `R_P(θ) = exp(-iθP/2)`. The three-angle gate is the
//! standard `U3(θ, φ, λ) = P(φ)·RY(θ)·P(λ)` with `P(a) = diag(1, e^{ia})`.

use num_complex::Complex64 as C64;

/// Row-major 2×2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];
/// Row-major 4×4 complex matrix.
pub type Mat4 = [[C64; 4]; 4];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub fn identity2() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Mat2 {
    [[ZERO, -I], [I, ZERO]]
}

pub fn pauli_z() -> Mat2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn hadamard() -> Mat2 {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]]
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
}

pub fn rz(theta: f64) -> Mat2 {
    let h = theta / 2.0;
    [[C64::from_polar(1.0, -h), ZERO], [ZERO, C64::from_polar(1.0, h)]]
}

pub fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), -C64::from_polar(s, lambda)],
        [C64::from_polar(s, phi), C64::from_polar(c, phi + lambda)],
    ]
}

/// Derivatives of the rotation families with respect to their angles.
pub fn rx_deriv(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(-s / 2.0, 0.0), C64::new(0.0, -c / 2.0)],
        [C64::new(0.0, -c / 2.0), C64::new(-s / 2.0, 0.0)],
    ]
}

pub fn ry_deriv(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [C64::new(-s / 2.0, 0.0), C64::new(-c / 2.0, 0.0)],
        [C64::new(c / 2.0, 0.0), C64::new(-s / 2.0, 0.0)],
    ]
}

pub fn rz_deriv(theta: f64) -> Mat2 {
    let h = theta / 2.0;
    [
        [C64::from_polar(0.5, -h) * -I, ZERO],
        [ZERO, C64::from_polar(0.5, h) * I],
    ]
}

/// Partial derivative of `u3` with respect to angle `which` (0 = θ, 1 = φ, 2 = λ).
pub fn u3_deriv(theta: f64, phi: f64, lambda: f64, which: usize) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    match which {
        0 => [
            [C64::new(-s / 2.0, 0.0), -C64::from_polar(c / 2.0, lambda)],
            [C64::from_polar(c / 2.0, phi), C64::from_polar(-s / 2.0, phi + lambda)],
        ],
        1 => [
            [ZERO, ZERO],
            [I * C64::from_polar(s, phi), I * C64::from_polar(c, phi + lambda)],
        ],
        2 => [
            [ZERO, -I * C64::from_polar(s, lambda)],
            [ZERO, I * C64::from_polar(c, phi + lambda)],
        ],
        _ => panic!("u3 has three angles, got index {which}"),
    }
}

/// CNOT with the first (more significant) qubit of the pair as control.
pub fn cnot4() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[1][1] = ONE;
    m[2][3] = ONE;
    m[3][2] = ONE;
    m
}

pub fn swap4() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[1][2] = ONE;
    m[2][1] = ONE;
    m[3][3] = ONE;
    m
}

/// Kronecker product `a ⊗ b`; `a` acts on the more significant qubit.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = a[r >> 1][c >> 1] * b[r & 1][c & 1];
        }
    }
    m
}

/// Controlled-`u` with the more significant qubit of the pair as control.
pub fn controlled4(u: &Mat2) -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[1][1] = ONE;
    m[2][2] = u[0][0];
    m[2][3] = u[0][1];
    m[3][2] = u[1][0];
    m[3][3] = u[1][1];
    m
}

pub fn adjoint2(u: &Mat2) -> Mat2 {
    [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]]
}

pub fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            m[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    m
}

fn unitarity_error<const N: usize>(u: &[[C64; N]; N]) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..N {
        for c in 0..N {
            let mut acc = ZERO;
            for k in 0..N {
                acc += u[k][r].conj() * u[k][c];
            }
            let target = if r == c { ONE } else { ZERO };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}

pub fn is_unitary2(u: &Mat2, tol: f64) -> bool {
    unitarity_error(u) <= tol
}

pub fn is_unitary4(u: &Mat4, tol: f64) -> bool {
    unitarity_error(u) <= tol
}
