//! Analytic gradients of circuit expectation values.
//!
//! Both engines return `∂⟨ψ(θ)|O|ψ(θ)⟩/∂θⱼ` for every slot, summing the
//! contributions of all gates that share a slot.

use std::fmt;
use std::str::FromStr;

use crate::ansatz::CircuitSpec;
use crate::error::{validation, QaeError, Result};
use crate::sim::StateVector;

use super::observable::Observable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GradientMethod {
    /// Shifted re-evaluation of the circuit suffix for every gate angle.
    #[default]
    ParameterShift,
    /// Reverse-mode sweep with one backward pass (same values, far fewer
    /// circuit evaluations; used for wide registers).
    Adjoint,
}

impl GradientMethod {
    pub fn name(self) -> &'static str {
        match self {
            GradientMethod::ParameterShift => "parameter_shift",
            GradientMethod::Adjoint => "adjoint",
        }
    }
}

impl fmt::Display for GradientMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GradientMethod {
    type Err = QaeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "parameter_shift" | "shift" => Ok(GradientMethod::ParameterShift),
            "adjoint" => Ok(GradientMethod::Adjoint),
            _ => validation(format!("unknown gradient method '{s}'")),
        }
    }
}

/// Adds `scale · ∂⟨O⟩/∂θ` into `grad` and returns `⟨O⟩` at `params`.
pub fn accumulate_expectation_gradient(
    spec: &CircuitSpec,
    params: &[f64],
    input: &StateVector,
    obs: &dyn Observable,
    method: GradientMethod,
    scale: f64,
    grad: &mut [f64],
) -> Result<f64> {
    spec.check_inputs(params, input)?;
    if grad.len() != params.len() {
        return Err(QaeError::DimensionMismatch {
            expected: params.len(),
            got: grad.len(),
        });
    }
    Ok(match method {
        GradientMethod::ParameterShift => parameter_shift(spec, params, input, obs, scale, grad),
        GradientMethod::Adjoint => adjoint(spec, params, input, obs, scale, grad),
    })
}

/// Like [`accumulate_expectation_gradient`] when the caller already holds the
/// circuit output for `input`; the adjoint method then skips its forward pass.
pub(crate) fn accumulate_with_output(
    spec: &CircuitSpec,
    params: &[f64],
    input: &StateVector,
    output: StateVector,
    obs: &dyn Observable,
    method: GradientMethod,
    grad: &mut [f64],
) -> Result<()> {
    match method {
        GradientMethod::Adjoint if grad.len() == params.len() => {
            adjoint_backward(spec, params, output, obs, 1.0, grad);
            Ok(())
        }
        _ => accumulate_expectation_gradient(spec, params, input, obs, method, 1.0, grad).map(|_| ()),
    }
}

/// `∂⟨O⟩/∂θ` as a fresh vector.
pub fn expectation_gradient(
    spec: &CircuitSpec,
    params: &[f64],
    input: &StateVector,
    obs: &dyn Observable,
    method: GradientMethod,
) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; params.len()];
    accumulate_expectation_gradient(spec, params, input, obs, method, 1.0, &mut grad)?;
    Ok(grad)
}

fn parameter_shift(
    spec: &CircuitSpec,
    params: &[f64],
    input: &StateVector,
    obs: &dyn Observable,
    scale: f64,
    grad: &mut [f64],
) -> f64 {
    let ops = spec.ops();
    let mut prefix = input.clone();
    let mut shifted = input.clone();
    for (k, op) in ops.iter().enumerate() {
        let angles = op.bound_angles(params);
        for b in op.bindings() {
            let mut d = 0.0;
            for &(shift, coef) in op.kind.shift_rule(b.pos).terms() {
                for dir in [1.0, -1.0] {
                    shifted.amplitudes_mut().copy_from_slice(prefix.amplitudes());
                    let mut a = angles;
                    a[b.pos] += dir * shift;
                    op.apply_angles(&mut shifted, a);
                    for later in &ops[k + 1..] {
                        later.apply(&mut shifted, params);
                    }
                    d += dir * coef * obs.expectation(&shifted);
                }
            }
            grad[b.slot] += scale * b.sign * d;
        }
        op.apply_angles(&mut prefix, angles);
    }
    obs.expectation(&prefix)
}

fn adjoint(
    spec: &CircuitSpec,
    params: &[f64],
    input: &StateVector,
    obs: &dyn Observable,
    scale: f64,
    grad: &mut [f64],
) -> f64 {
    let mut psi = input.clone();
    spec.apply_in_place(params, &mut psi);
    let value = obs.expectation(&psi);
    adjoint_backward(spec, params, psi, obs, scale, grad);
    value
}

/// Backward sweep of the adjoint method from the circuit output `psi`.
pub(crate) fn adjoint_backward(
    spec: &CircuitSpec,
    params: &[f64],
    mut psi: StateVector,
    obs: &dyn Observable,
    scale: f64,
    grad: &mut [f64],
) {
    let mut lambda = obs.apply(&psi);
    for op in spec.ops().iter().rev() {
        let angles = op.bound_angles(params);
        op.apply_dagger(&mut psi, angles);
        for b in op.bindings() {
            let overlap = op.deriv_overlap(&lambda, &psi, angles, b.pos);
            grad[b.slot] += scale * b.sign * 2.0 * overlap.re;
        }
        op.apply_dagger(&mut lambda, angles);
    }
}
