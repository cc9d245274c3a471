use std::fmt;
use std::str::FromStr;

use crate::error::{validation, QaeError, Result};

/// Probability clamp used by the cross-entropy loss.
pub const BCE_EPS: f64 = 1e-12;

/// Trash-qubit loss. Every trash qubit targets `|0⟩`, so the per-qubit
/// quantity is the probability `pᵢ` of reading `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossKind {
    Mse,
    Bce,
}

impl LossKind {
    pub fn name(self) -> &'static str {
        match self {
            LossKind::Mse => "mse",
            LossKind::Bce => "bce",
        }
    }

    pub fn value(self, p: &[f64]) -> f64 {
        match self {
            LossKind::Mse => mse_loss(p),
            LossKind::Bce => bce_loss(p),
        }
    }

    /// Loss and `∂L/∂pᵢ` for every trash probability.
    pub fn value_and_weights(self, p: &[f64]) -> (f64, Vec<f64>) {
        let t = p.len() as f64;
        let w = match self {
            LossKind::Mse => p.iter().map(|&pi| 2.0 * pi / t).collect(),
            LossKind::Bce => p
                .iter()
                .map(|&pi| {
                    let q = 1.0 - pi;
                    if (BCE_EPS..=1.0 - BCE_EPS).contains(&q) {
                        1.0 / (t * q)
                    } else {
                        0.0
                    }
                })
                .collect(),
        };
        (self.value(p), w)
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = QaeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mse" => Ok(LossKind::Mse),
            "bce" => Ok(LossKind::Bce),
            _ => validation(format!("unknown loss '{s}' (expected mse or bce)")),
        }
    }
}

/// `(1/T) Σ pᵢ²`.
pub fn mse_loss(p: &[f64]) -> f64 {
    if p.is_empty() {
        return 0.0;
    }
    p.iter().map(|v| v * v).sum::<f64>() / p.len() as f64
}

/// `−(1/T) Σ ln(1 − pᵢ)` with `pᵢ` clamped to `[ε, 1 − ε]` (applied to
/// `1 − pᵢ`, which is exact at the saturated end).
pub fn bce_loss(p: &[f64]) -> f64 {
    if p.is_empty() {
        return 0.0;
    }
    let total: f64 = p
        .iter()
        .map(|&pi| -(1.0 - pi).clamp(BCE_EPS, 1.0 - BCE_EPS).ln())
        .sum();
    total / p.len() as f64
}
