//! Classical-to-quantum data encodings and the PCA reducer that feeds the
//! angle path.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{validation, QaeError, Result};
use crate::sim::StateVector;

const PCA_HEADER: &str = "QAEPCA v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoding {
    /// One feature per qubit as an RY angle in `[0, π]`.
    Angle,
    /// `2^n` features written into the amplitudes.
    Amplitude,
}

impl Encoding {
    pub fn encode(self, x: &[f64]) -> Result<StateVector> {
        match self {
            Encoding::Angle => angle_encode(x),
            Encoding::Amplitude => amplitude_encode(x),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Encoding::Angle => "angle",
            Encoding::Amplitude => "amplitude",
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Encoding {
    type Err = QaeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "angle" => Ok(Encoding::Angle),
            "amplitude" => Ok(Encoding::Amplitude),
            _ => validation(format!("unknown encoding '{s}'")),
        }
    }
}

/// `⊗ᵢ RY(xᵢ)|0⟩` with feature `i` on qubit `i`.
pub fn angle_encode(x: &[f64]) -> Result<StateVector> {
    if x.is_empty() {
        return validation("angle encoding needs at least one feature");
    }
    if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !(0.0..=PI).contains(*v)) {
        return validation(format!("feature {i} = {v} is outside [0, π]"));
    }
    let mut amps = vec![C64::new(1.0, 0.0)];
    for &angle in x {
        let (s, c) = (angle / 2.0).sin_cos();
        let low: Vec<C64> = amps.iter().map(|a| a * c).collect();
        let high: Vec<C64> = amps.iter().map(|a| a * s).collect();
        amps = low;
        amps.extend(high);
    }
    StateVector::from_amplitudes(x.len(), amps)
}

/// `Σ xᵢ/‖x‖ |i⟩`, injected directly as amplitudes.
pub fn amplitude_encode(x: &[f64]) -> Result<StateVector> {
    if x.len() < 2 || !x.len().is_power_of_two() {
        return validation(format!("amplitude encoding needs 2^n features, got {}", x.len()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return validation("feature vector contains non-finite values");
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return validation("cannot amplitude-encode the zero vector");
    }
    let n = x.len().trailing_zeros() as usize;
    StateVector::from_amplitudes(n, x.iter().map(|v| C64::new(v / norm, 0.0)).collect())
}

/// Principal-component projection followed by a per-dimension affine map
/// onto `[0, π]` fitted to the training projections.
#[derive(Debug, Clone, PartialEq)]
pub struct Reducer {
    mean: Vec<f64>,
    /// `d` rows of length `input_dim`, orthonormal, by decreasing variance.
    components: Vec<Vec<f64>>,
    out_min: Vec<f64>,
    out_max: Vec<f64>,
}

impl Reducer {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.out_min, &self.out_max)
    }

    /// Centered projection onto the components (no rescaling).
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(QaeError::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(self
            .components
            .iter()
            .map(|row| row.iter().zip(x).zip(&self.mean).map(|((w, v), m)| w * (v - m)).sum())
            .collect())
    }

    /// Projects and maps each coordinate from `[out_min, out_max]` to
    /// `[0, π]`, clamping values outside the training range.
    pub fn reduce_and_scale(&self, x: &[f64]) -> Result<Vec<f64>> {
        let p = self.project(x)?;
        Ok(p.iter()
            .zip(self.out_min.iter().zip(&self.out_max))
            .map(|(&v, (&lo, &hi))| {
                let span = hi - lo;
                let t = if span > 0.0 { (v - lo) / span } else { 0.5 };
                (t * PI).clamp(0.0, PI)
            })
            .collect())
    }

    pub fn to_text(&self) -> String {
        let line = |v: &[f64]| v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(" ");
        let mut out = format!("{PCA_HEADER}\n{} {}\n", self.output_dim(), self.input_dim());
        for row in &self.components {
            out.push_str(&line(row));
            out.push('\n');
        }
        for v in [&self.mean, &self.out_min, &self.out_max] {
            out.push_str(&line(v));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Reducer> {
        let err = |line: usize, msg: String| QaeError::Format {
            format: "QAEPCA",
            line,
            msg,
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        if lines.next().map(|(_, l)| l) != Some(PCA_HEADER) {
            return Err(err(1, "missing 'QAEPCA v1' header".into()));
        }
        let mut row = |expect: usize| -> Result<Vec<f64>> {
            let (ln, l) = lines.next().ok_or_else(|| err(0, "unexpected end of file".into()))?;
            let vals: Vec<f64> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| err(ln, format!("bad number '{t}'"))))
                .collect::<Result<_>>()?;
            if vals.len() != expect {
                return Err(err(ln, format!("expected {expect} values, found {}", vals.len())));
            }
            Ok(vals)
        };
        let dims = row(2)?;
        let (d, n) = (dims[0] as usize, dims[1] as usize);
        let components = (0..d).map(|_| row(n)).collect::<Result<Vec<_>>>()?;
        let mean = row(n)?;
        let out_min = row(d)?;
        let out_max = row(d)?;
        Ok(Reducer {
            mean,
            components,
            out_min,
            out_max,
        })
    }
}

/// Fits the top-`d` principal components of `data` and records the range of
/// the training projections for rescaling.
pub fn fit_reducer(data: &[Vec<f64>], d: usize) -> Result<Reducer> {
    let m = data.len();
    let Some(first) = data.first() else {
        return validation("cannot fit a reducer on an empty dataset");
    };
    let n = first.len();
    if d == 0 || d > n {
        return validation(format!("cannot reduce {n} dimensions to {d}"));
    }
    if m < d {
        return validation(format!("need at least {d} samples, got {m}"));
    }
    if let Some(bad) = data.iter().position(|x| x.len() != n) {
        return Err(QaeError::DimensionMismatch {
            expected: n,
            got: data[bad].len(),
        });
    }
    let mut mean = vec![0.0; n];
    for x in data {
        for (acc, v) in mean.iter_mut().zip(x) {
            *acc += v;
        }
    }
    mean.iter_mut().for_each(|v| *v /= m as f64);
    let centered = DMatrix::from_fn(m, n, |r, c| data[r][c] - mean[c]);
    let denom = (m.max(2) - 1) as f64;
    let cov = (centered.transpose() * &centered) / denom;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues[order[0]].max(0.0);
    let cutoff = top * 1e-12;
    if top <= 0.0 || eig.eigenvalues[order[d - 1]] <= cutoff {
        return Err(QaeError::Numeric(format!(
            "covariance has rank below {d}; cannot fit {d} components"
        )));
    }
    let components: Vec<Vec<f64>> = order[..d]
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            // Sign convention: largest-magnitude entry positive.
            let pivot = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(1.0);
            if pivot < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    let mut reducer = Reducer {
        mean,
        components,
        out_min: vec![f64::INFINITY; d],
        out_max: vec![f64::NEG_INFINITY; d],
    };
    for x in data {
        let p = reducer.project(x)?;
        for (j, v) in p.into_iter().enumerate() {
            reducer.out_min[j] = reducer.out_min[j].min(v);
            reducer.out_max[j] = reducer.out_max[j].max(v);
        }
    }
    Ok(reducer)
}
