use std::fmt;
use std::str::FromStr;

use crate::error::{QaeError, Result};
use crate::sim::gates::{self, Mat2};
use num_complex::Complex64 as C64;
use crate::sim::{QubitIndex, StateVector};

/// Gate vocabulary of the circuit IR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    U3,
    Cnot,
    Crx,
    Cry,
    Crz,
    Cu3,
    X,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::U3,
        GateKind::Cnot,
        GateKind::Crx,
        GateKind::Cry,
        GateKind::Crz,
        GateKind::Cu3,
        GateKind::X,
    ];

    pub fn n_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz => 1,
            GateKind::Crx | GateKind::Cry | GateKind::Crz => 1,
            GateKind::U3 | GateKind::Cu3 => 3,
            GateKind::Cnot | GateKind::X => 0,
        }
    }

    pub fn n_qubits(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::U3 | GateKind::X => 1,
            _ => 2,
        }
    }

    pub fn is_controlled(self) -> bool {
        self.n_qubits() == 2
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::U3 => "U3",
            GateKind::Cnot => "CNOT",
            GateKind::Crx => "CRX",
            GateKind::Cry => "CRY",
            GateKind::Crz => "CRZ",
            GateKind::Cu3 => "CU3",
            GateKind::X => "X",
        }
    }

    /// Shift rule that differentiates bound angle `pos` of this kind.
    pub fn shift_rule(self, pos: usize) -> ShiftRule {
        match (self, pos) {
            (GateKind::Crx | GateKind::Cry | GateKind::Crz, _) => ShiftRule::FourTerm,
            (GateKind::Cu3, 0) => ShiftRule::FourTerm,
            _ => ShiftRule::TwoTerm,
        }
    }

    /// Target-qubit matrix at the given bound angles (the X matrix for CNOT).
    pub fn target_matrix(self, a: [f64; 3]) -> Mat2 {
        match self {
            GateKind::Rx | GateKind::Crx => gates::rx(a[0]),
            GateKind::Ry | GateKind::Cry => gates::ry(a[0]),
            GateKind::Rz | GateKind::Crz => gates::rz(a[0]),
            GateKind::U3 | GateKind::Cu3 => gates::u3(a[0], a[1], a[2]),
            GateKind::Cnot | GateKind::X => gates::pauli_x(),
        }
    }

    /// Derivative of [`Self::target_matrix`] with respect to bound angle `pos`.
    pub fn target_matrix_deriv(self, a: [f64; 3], pos: usize) -> Mat2 {
        match self {
            GateKind::Rx | GateKind::Crx => gates::rx_deriv(a[0]),
            GateKind::Ry | GateKind::Cry => gates::ry_deriv(a[0]),
            GateKind::Rz | GateKind::Crz => gates::rz_deriv(a[0]),
            GateKind::U3 | GateKind::Cu3 => gates::u3_deriv(a[0], a[1], a[2], pos),
            GateKind::Cnot | GateKind::X => panic!("{} has no angles", self.name()),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = QaeError;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| QaeError::Validation(format!("unknown gate kind '{s}'")))
    }
}

/// Parameter-shift recipe for one angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftRule {
    /// Generator eigenvalues `±½` (or `{0, 1}`): `[f(+π/2) − f(−π/2)] / 2`.
    TwoTerm,
    /// Generator eigenvalues `{0, ±½}`: shifts `±π/2` and `±3π/2`.
    FourTerm,
}

impl ShiftRule {
    /// `(shift, coefficient)` pairs; the derivative is
    /// `Σ c·[f(x + s) − f(x − s)]`.
    pub fn terms(self) -> &'static [(f64, f64)] {
        use std::f64::consts::{FRAC_PI_2, SQRT_2};
        const THREE_HALF_PI: f64 = 3.0 * FRAC_PI_2;
        match self {
            ShiftRule::TwoTerm => &[(FRAC_PI_2, 0.5)],
            ShiftRule::FourTerm => &[
                (FRAC_PI_2, (SQRT_2 + 1.0) / (4.0 * SQRT_2)),
                (THREE_HALF_PI, -(SQRT_2 - 1.0) / (4.0 * SQRT_2)),
            ],
        }
    }
}

/// One gate of a parameterized circuit. Controlled kinds list the control
/// first. `adjoint` marks a gate taken from an inverted circuit: its bound
/// angles are transformed so the gate becomes the inverse of the original.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<QubitIndex>,
    pub slots: Vec<usize>,
    pub adjoint: bool,
}

/// Where a parameter slot lands in a gate's bound angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binding {
    pub slot: usize,
    pub pos: usize,
    pub sign: f64,
}

impl GateOp {
    pub fn new(kind: GateKind, qubits: &[QubitIndex], slots: &[usize]) -> Result<Self> {
        if qubits.len() != kind.n_qubits() {
            return Err(QaeError::Validation(format!(
                "{kind} acts on {} qubits, got {}",
                kind.n_qubits(),
                qubits.len()
            )));
        }
        if slots.len() != kind.n_params() {
            return Err(QaeError::Validation(format!(
                "{kind} takes {} parameters, got {}",
                kind.n_params(),
                slots.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(QaeError::Validation(format!("{kind} needs distinct qubits")));
        }
        Ok(Self {
            kind,
            qubits: qubits.to_vec(),
            slots: slots.to_vec(),
            adjoint: false,
        })
    }

    pub(crate) fn one(kind: GateKind, q: QubitIndex, slots: &[usize]) -> Self {
        Self::new(kind, &[q], slots).expect("builder produced a malformed gate")
    }

    pub(crate) fn two(kind: GateKind, control: QubitIndex, target: QubitIndex, slots: &[usize]) -> Self {
        Self::new(kind, &[control, target], slots).expect("builder produced a malformed gate")
    }

    pub fn inverse(&self) -> Self {
        Self {
            adjoint: !self.adjoint,
            ..self.clone()
        }
    }

    /// Slot-to-angle bindings, accounting for the adjoint transform
    /// (rotations negate; `U3(θ,φ,λ)† = U3(−θ,−λ,−φ)`).
    pub fn bindings(&self) -> impl Iterator<Item = Binding> + '_ {
        let adj = self.adjoint;
        let three = self.kind.n_params() == 3;
        self.slots.iter().enumerate().map(move |(i, &slot)| {
            let pos = if adj && three && i > 0 { 3 - i } else { i };
            Binding {
                slot,
                pos,
                sign: if adj { -1.0 } else { 1.0 },
            }
        })
    }

    pub fn bound_angles(&self, params: &[f64]) -> [f64; 3] {
        let mut a = [0.0; 3];
        for b in self.bindings() {
            a[b.pos] = b.sign * params[b.slot];
        }
        a
    }

    /// Applies the gate with explicit bound angles.
    pub fn apply_angles(&self, state: &mut StateVector, angles: [f64; 3]) {
        match self.kind {
            GateKind::Cnot => state.apply_cnot(self.qubits[0], self.qubits[1]),
            GateKind::X => state.apply_x(self.qubits[0]),
            k if k.is_controlled() => {
                state.apply_controlled(&k.target_matrix(angles), self.qubits[0], self.qubits[1])
            }
            k => state.apply_mat2(&k.target_matrix(angles), self.qubits[0]),
        }
    }

    pub fn apply(&self, state: &mut StateVector, params: &[f64]) {
        self.apply_angles(state, self.bound_angles(params));
    }

    /// `⟨lambda| ∂U/∂(bound angle pos) |psi⟩`.
    pub(crate) fn deriv_overlap(&self, lambda: &StateVector, psi: &StateVector, angles: [f64; 3], pos: usize) -> C64 {
        let du = self.kind.target_matrix_deriv(angles, pos);
        if self.kind.is_controlled() {
            lambda.sandwich_controlled(&du, self.qubits[0], self.qubits[1], psi)
        } else {
            lambda.sandwich_mat2(&du, self.qubits[0], psi)
        }
    }

    /// Applies `U†` at the given bound angles.
    pub(crate) fn apply_dagger(&self, state: &mut StateVector, angles: [f64; 3]) {
        match self.kind {
            GateKind::Cnot => state.apply_cnot(self.qubits[0], self.qubits[1]),
            GateKind::X => state.apply_x(self.qubits[0]),
            k => {
                let u = gates::adjoint2(&k.target_matrix(angles));
                if k.is_controlled() {
                    state.apply_controlled(&u, self.qubits[0], self.qubits[1]);
                } else {
                    state.apply_mat2(&u, self.qubits[0]);
                }
            }
        }
    }
}
