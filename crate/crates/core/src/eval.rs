//! Bloch-sphere readout, SVM planes, alignment rotations and scoring.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::ansatz::CircuitSpec;
use crate::error::{validation, QaeError, Result};
use crate::sim::gates::{rx, ry};
use crate::sim::{Axis, StateVector};
use crate::training::{reconstruction_overlap, SampleSource};

pub const SVM_LAMBDA: f64 = 1e-3;
pub const SVM_PASSES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub label: u8,
}

impl BlochPoint {
    pub fn vector(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of every compressed qubit after encoding, concatenated
/// in compressed order.
pub fn compressed_features(spec: &CircuitSpec, params: &[f64], input: &StateVector) -> Result<Vec<f64>> {
    let out = spec.run(params, input)?;
    let mut f = Vec::with_capacity(3 * spec.compressed().len());
    for &q in spec.compressed() {
        f.extend(out.bloch_vector(q)?);
    }
    Ok(f)
}

fn single_compressed(spec: &CircuitSpec) -> Result<usize> {
    match spec.compressed() {
        [q] => Ok(*q),
        c => validation(format!("expected exactly one compressed qubit, found {}", c.len())),
    }
}

/// Bloch vector of the single compressed qubit for every sample.
pub fn bloch_readout(
    spec: &CircuitSpec,
    params: &[f64],
    data: &dyn SampleSource,
    labels: &[u8],
) -> Result<Vec<BlochPoint>> {
    let q = single_compressed(spec)?;
    check_labels(data, labels)?;
    (0..data.len())
        .map(|i| {
            let [x, y, z] = spec.run(params, &data.state(i)?)?.bloch_vector(q)?;
            Ok(BlochPoint { x, y, z, label: labels[i] })
        })
        .collect()
}

fn check_labels(data: &dyn SampleSource, labels: &[u8]) -> Result<()> {
    if data.len() != labels.len() {
        return Err(QaeError::DimensionMismatch {
            expected: data.len(),
            got: labels.len(),
        });
    }
    Ok(())
}

/// Soft-margin linear classifier `sign(w·x + b)` trained with Pegasos
/// sub-gradient steps. The bias is a regularized constant feature.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvm {
    pub w: Vec<f64>,
    pub b: f64,
}

impl LinearSvm {
    /// `y` holds ±1 targets.
    pub fn fit(x: &[Vec<f64>], y: &[f64], lambda: f64, passes: usize, seed: u64) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() {
            return validation("svm needs matching, non-empty inputs and targets");
        }
        let d = x[0].len();
        if x.iter().any(|r| r.len() != d) {
            return validation("svm inputs have ragged dimensions");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..x.len()).collect();
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        let mut t = 0u64;
        for _ in 0..passes {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (lambda * t as f64);
                let margin = y[i] * (dot(&w, &x[i]) + b);
                let decay = 1.0 - eta * lambda;
                w.iter_mut().for_each(|v| *v *= decay);
                b *= decay;
                if margin < 1.0 {
                    w.iter_mut().zip(&x[i]).for_each(|(v, xi)| *v += eta * y[i] * xi);
                    b += eta * y[i];
                }
            }
        }
        Ok(Self { w, b })
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) + self.b
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `normal·p + offset > 0` selects `positive`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatingPlane {
    pub normal: [f64; 3],
    pub offset: f64,
    pub positive: u8,
    pub negative: u8,
}

impl SeparatingPlane {
    pub fn side(&self, p: [f64; 3]) -> f64 {
        dot(&self.normal, &p) + self.offset
    }

    pub fn predict(&self, p: [f64; 3]) -> u8 {
        if self.side(p) >= 0.0 {
            self.positive
        } else {
            self.negative
        }
    }

    pub fn accuracy(&self, points: &[BlochPoint]) -> f64 {
        if points.is_empty() {
            return 0.0;
        }
        let hits = points.iter().filter(|p| self.predict(p.vector()) == p.label).count();
        hits as f64 / points.len() as f64
    }
}

/// SVM plane through Bloch points of exactly two classes. The smaller digit
/// is the positive side.
pub fn fit_plane(points: &[BlochPoint], seed: u64) -> Result<SeparatingPlane> {
    let classes: BTreeSet<u8> = points.iter().map(|p| p.label).collect();
    if classes.len() != 2 {
        return validation(format!("plane fit needs exactly two classes, found {}", classes.len()));
    }
    let mut it = classes.into_iter();
    let (positive, negative) = (it.next().unwrap(), it.next().unwrap());
    let x: Vec<Vec<f64>> = points.iter().map(|p| p.vector().to_vec()).collect();
    let y: Vec<f64> = points.iter().map(|p| if p.label == positive { 1.0 } else { -1.0 }).collect();
    let svm = LinearSvm::fit(&x, &y, SVM_LAMBDA, SVM_PASSES, seed)?;
    let norm = dot(&svm.w, &svm.w).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(QaeError::Numeric("svm produced a zero normal".into()));
    }
    Ok(SeparatingPlane {
        normal: [svm.w[0] / norm, svm.w[1] / norm, svm.w[2] / norm],
        offset: svm.b / norm,
        positive,
        negative,
    })
}

/// Bloch-vector rotation of the `RX(α)` gate.
pub fn bloch_rx(v: [f64; 3], a: f64) -> [f64; 3] {
    let (s, c) = a.sin_cos();
    [v[0], v[1] * c - v[2] * s, v[1] * s + v[2] * c]
}

/// Bloch-vector rotation of the `RY(β)` gate.
pub fn bloch_ry(v: [f64; 3], b: f64) -> [f64; 3] {
    let (s, c) = b.sin_cos();
    [v[0] * c + v[2] * s, v[1], -v[0] * s + v[2] * c]
}

/// Rotation `RY(β)·RX(α)` taking the plane normal to `+ẑ`. The decision
/// becomes `⟨Z⟩ ≥ threshold` with `threshold = −offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    pub alpha: f64,
    pub beta: f64,
    pub threshold: f64,
    pub class_of_zero: u8,
    pub other_class: u8,
}

impl Alignment {
    pub fn rotate(&self, v: [f64; 3]) -> [f64; 3] {
        bloch_ry(bloch_rx(v, self.alpha), self.beta)
    }

    pub fn decide(&self, z: f64) -> u8 {
        if z >= self.threshold {
            self.class_of_zero
        } else {
            self.other_class
        }
    }
}

/// `(α, β)` with `RY(β)·RX(α)·n = ẑ`.
pub fn alignment_angles(normal: [f64; 3]) -> Result<(f64, f64)> {
    let norm = dot(&normal, &normal).sqrt();
    if !(norm > 1e-12 && norm.is_finite()) {
        return Err(QaeError::Numeric("degenerate plane normal".into()));
    }
    let n = normal.map(|v| v / norm);
    let alpha = n[1].atan2(n[2]);
    let m = bloch_rx(n, alpha);
    let beta = -m[0].atan2(m[2]);
    Ok((alpha, beta))
}

/// Alignment for `plane`; `class_of_zero` is the majority label among
/// `points` landing on the `|0⟩` side after rotation.
pub fn alignment_from_plane(plane: &SeparatingPlane, points: &[BlochPoint]) -> Result<Alignment> {
    let (alpha, beta) = alignment_angles(plane.normal)?;
    let mut align = Alignment {
        alpha,
        beta,
        threshold: -plane.offset,
        class_of_zero: plane.positive,
        other_class: plane.negative,
    };
    let (mut pos, mut neg) = (0usize, 0usize);
    for p in points {
        if align.rotate(p.vector())[2] >= align.threshold {
            if p.label == plane.positive {
                pos += 1;
            } else if p.label == plane.negative {
                neg += 1;
            }
        }
    }
    if neg > pos {
        align.class_of_zero = plane.negative;
        align.other_class = plane.positive;
    }
    Ok(align)
}

/// Exact expectations or a binomial finite-shot estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Readout {
    Exact,
    Shots { shots: u64, seed: u64 },
}

impl Readout {
    pub fn from_shots(shots: u64, seed: u64) -> Self {
        if shots == 0 {
            Readout::Exact
        } else {
            Readout::Shots { shots, seed }
        }
    }
}

/// `⟨Z⟩` of the compressed qubit after `RX(α)` then `RY(β)`.
pub fn aligned_z(spec: &CircuitSpec, params: &[f64], align: &Alignment, input: &StateVector) -> Result<f64> {
    let q = single_compressed(spec)?;
    let mut out = spec.run(params, input)?;
    out.apply_1q(&rx(align.alpha), q)?;
    out.apply_1q(&ry(align.beta), q)?;
    out.expectation_pauli(q, Axis::Z)
}

pub fn classify(spec: &CircuitSpec, params: &[f64], align: &Alignment, input: &StateVector) -> Result<u8> {
    Ok(align.decide(aligned_z(spec, params, align, input)?))
}

fn sampled_z(z: f64, shots: u64, rng: &mut ChaCha8Rng) -> Result<f64> {
    let p0 = ((1.0 + z) / 2.0).clamp(0.0, 1.0);
    let k = Binomial::new(shots, p0)
        .map_err(|e| QaeError::Numeric(format!("binomial sampler: {e}")))?
        .sample(rng);
    Ok(2.0 * k as f64 / shots as f64 - 1.0)
}

/// Predicted labels for every sample.
pub fn predict_all(
    spec: &CircuitSpec,
    params: &[f64],
    align: &Alignment,
    data: &dyn SampleSource,
    readout: Readout,
) -> Result<Vec<u8>> {
    let mut rng = match readout {
        Readout::Shots { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
        Readout::Exact => None,
    };
    (0..data.len())
        .map(|i| {
            let z = aligned_z(spec, params, align, &data.state(i)?)?;
            let z = match (readout, rng.as_mut()) {
                (Readout::Shots { shots, .. }, Some(r)) => sampled_z(z, shots, r)?,
                _ => z,
            };
            Ok(align.decide(z))
        })
        .collect()
}

pub fn fraction_correct(predicted: &[u8], labels: &[u8]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let hits = predicted.iter().zip(labels).filter(|(a, b)| a == b).count();
    hits as f64 / labels.len() as f64
}

pub fn accuracy(
    spec: &CircuitSpec,
    params: &[f64],
    align: &Alignment,
    data: &dyn SampleSource,
    labels: &[u8],
    readout: Readout,
) -> Result<f64> {
    check_labels(data, labels)?;
    if labels.is_empty() {
        return validation("accuracy needs a non-empty test set");
    }
    Ok(fraction_correct(&predict_all(spec, params, align, data, readout)?, labels))
}

/// Mean encoder→decoder overlap with the input.
pub fn reconstruction_rate(
    enc: &CircuitSpec,
    theta: &[f64],
    dec: &CircuitSpec,
    theta_dec: &[f64],
    data: &dyn SampleSource,
) -> Result<f64> {
    if data.is_empty() {
        return validation("reconstruction rate needs samples");
    }
    let mut total = 0.0;
    for i in 0..data.len() {
        total += reconstruction_overlap(enc, theta, dec, theta_dec, &data.state(i)?)?;
    }
    Ok((total / data.len() as f64).clamp(0.0, 1.0))
}

/// One-vs-rest linear classifiers over per-qubit Bloch features.
#[derive(Debug, Clone, PartialEq)]
pub struct OneVsRest {
    pub classes: Vec<u8>,
    pub machines: Vec<LinearSvm>,
}

impl OneVsRest {
    pub fn fit(x: &[Vec<f64>], labels: &[u8], k: usize, seed: u64) -> Result<Self> {
        let classes: Vec<u8> = labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if classes.len() < k {
            return validation(format!("expected {k} classes, found {}", classes.len()));
        }
        let machines = classes
            .iter()
            .map(|&c| {
                let y: Vec<f64> = labels.iter().map(|&l| if l == c { 1.0 } else { -1.0 }).collect();
                LinearSvm::fit(x, &y, SVM_LAMBDA, SVM_PASSES, seed)
            })
            .collect::<Result<_>>()?;
        Ok(Self { classes, machines })
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        let mut best = (f64::NEG_INFINITY, self.classes[0]);
        for (m, &c) in self.machines.iter().zip(&self.classes) {
            let s = m.decision(x);
            if s > best.0 {
                best = (s, c);
            }
        }
        best.1
    }
}

fn features_of(spec: &CircuitSpec, params: &[f64], data: &dyn SampleSource) -> Result<Vec<Vec<f64>>> {
    (0..data.len())
        .map(|i| compressed_features(spec, params, &data.state(i)?))
        .collect()
}

/// Multi-class accuracy: one-vs-rest SVMs fit on training features, scored
/// on the test split.
#[allow(clippy::too_many_arguments)]
pub fn multiclass_eval(
    spec: &CircuitSpec,
    params: &[f64],
    train: &dyn SampleSource,
    train_labels: &[u8],
    test: &dyn SampleSource,
    test_labels: &[u8],
    k_classes: usize,
    seed: u64,
) -> Result<f64> {
    check_labels(train, train_labels)?;
    check_labels(test, test_labels)?;
    let model = OneVsRest::fit(&features_of(spec, params, train)?, train_labels, k_classes, seed)?;
    let predicted: Vec<u8> = features_of(spec, params, test)?.iter().map(|f| model.predict(f)).collect();
    Ok(fraction_correct(&predicted, test_labels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_qcnn, ConvType, PoolKind};
    use crate::sim::gates::{hadamard, pauli_x};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn identity_spec(n: usize) -> CircuitSpec {
        CircuitSpec::new(n, vec![], 0, (0..n - 1).collect(), vec![n - 1]).unwrap()
    }

    fn pt(x: f64, y: f64, z: f64, label: u8) -> BlochPoint {
        BlochPoint { x, y, z, label }
    }

    fn clusters() -> Vec<BlochPoint> {
        (0..40)
            .map(|i| {
                let e = 0.05 * ((i % 7) as f64 - 3.0) / 3.0;
                if i % 2 == 0 {
                    pt(e, -e, 0.95, 3)
                } else {
                    pt(-e, e, -0.95, 7)
                }
            })
            .collect()
    }

    #[test]
    fn readout_examples() {
        let spec = identity_spec(1);
        let zero = vec![StateVector::zero(1).unwrap()];
        let p = bloch_readout(&spec, &[], &zero, &[0]).unwrap();
        assert!((p[0].z - 1.0).abs() < 1e-12 && p[0].x.abs() < 1e-12);
        let mut plus = StateVector::zero(1).unwrap();
        plus.apply_1q(&hadamard(), 0).unwrap();
        let p = bloch_readout(&spec, &[], &vec![plus], &[0]).unwrap();
        assert!((p[0].x - 1.0).abs() < 1e-12 && p[0].z.abs() < 1e-12);
    }

    #[test]
    fn readout_points_in_unit_ball() {
        let spec = build_qcnn(4, 2, ConvType::Type1, PoolKind::Zx).unwrap();
        let params: Vec<f64> = (0..spec.n_params()).map(|i| i as f64 * 0.37).collect();
        let data: Vec<StateVector> = (0..5)
            .map(|k| crate::encoding::angle_encode(&[0.1 * k as f64, 1.0, 2.0, 3.0]).unwrap())
            .collect();
        for p in bloch_readout(&spec, &params, &data, &[0; 5]).unwrap() {
            assert!(p.x * p.x + p.y * p.y + p.z * p.z <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn plane_separates_antipodal_clusters() {
        let pts = clusters();
        let plane = fit_plane(&pts, 1).unwrap();
        assert!(plane.normal[2].abs() > 0.99);
        assert_eq!(plane.accuracy(&pts), 1.0);
        let n = plane.normal;
        assert!((dot(&n, &n) - 1.0).abs() < 1e-9);
        assert_eq!(fit_plane(&pts, 1).unwrap(), plane);
    }

    #[test]
    fn identical_classes_are_not_separable() {
        let mut pts = Vec::new();
        for i in 0..20 {
            let v = [(i as f64 * 0.3).sin() * 0.5, (i as f64 * 0.7).cos() * 0.5, (i as f64).sin() * 0.5];
            pts.push(pt(v[0], v[1], v[2], 0));
            pts.push(pt(v[0], v[1], v[2], 1));
        }
        if let Ok(plane) = fit_plane(&pts, 2) {
            assert!((plane.accuracy(&pts) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn halving_points_keeps_predictions() {
        let pts = clusters();
        let plane = fit_plane(&pts, 1).unwrap();
        for p in &pts {
            let h = p.vector().map(|v| 0.5 * v);
            assert_eq!(plane.predict(h), plane.predict(p.vector()));
        }
    }

    #[test]
    fn single_class_is_rejected() {
        assert!(fit_plane(&[pt(0.0, 0.0, 1.0, 1), pt(0.0, 0.0, -1.0, 1)], 0).is_err());
    }

    #[test]
    fn alignment_angle_examples() {
        assert_eq!(alignment_angles([0.0, 0.0, 1.0]).unwrap(), (0.0, 0.0));
        let (a, b) = alignment_angles([0.0, 1.0, 0.0]).unwrap();
        assert!((a - FRAC_PI_2).abs() < 1e-12 && b.abs() < 1e-12);
        let r = bloch_ry(bloch_rx([0.0, 1.0, 0.0], a), b);
        assert!((r[2] - 1.0).abs() < 1e-10 && r[0].abs() < 1e-10 && r[1].abs() < 1e-10);
        let (a, b) = alignment_angles([1.0, 0.0, 0.0]).unwrap();
        assert!(a.abs() < 1e-12 && (b + FRAC_PI_2).abs() < 1e-12);
        let r = bloch_ry(bloch_rx([1.0, 0.0, 0.0], a), b);
        assert!((r[2] - 1.0).abs() < 1e-10);
        assert!(alignment_angles([0.0; 3]).is_err());
    }

    #[test]
    fn bloch_rotations_match_gate_action() {
        let mut s = StateVector::zero(1).unwrap();
        s.apply_1q(&ry(0.7), 0).unwrap();
        s.apply_1q(&crate::sim::gates::rz(1.1), 0).unwrap();
        let v = s.bloch_vector(0).unwrap();
        for (a, b) in [(0.4, -1.3), (2.0, 0.9)] {
            let mut t = s.clone();
            t.apply_1q(&rx(a), 0).unwrap();
            t.apply_1q(&ry(b), 0).unwrap();
            let want = bloch_ry(bloch_rx(v, a), b);
            let got = t.bloch_vector(0).unwrap();
            for k in 0..3 {
                assert!((want[k] - got[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classify_examples() {
        let spec = identity_spec(1);
        let align = Alignment {
            alpha: 0.0,
            beta: 0.0,
            threshold: 0.0,
            class_of_zero: 4,
            other_class: 9,
        };
        let zero = StateVector::zero(1).unwrap();
        assert_eq!(classify(&spec, &[], &align, &zero).unwrap(), 4);
        let mut one = zero.clone();
        one.apply_1q(&pauli_x(), 0).unwrap();
        assert_eq!(classify(&spec, &[], &align, &one).unwrap(), 9);
        let mut phased = StateVector::from_amplitudes(
            1,
            one.amplitudes().iter().map(|a| a * num_complex::Complex64::from_polar(1.0, 0.8)).collect(),
        )
        .unwrap();
        assert_eq!(classify(&spec, &[], &align, &phased).unwrap(), 9);
        phased.apply_1q(&hadamard(), 0).unwrap();
        assert_eq!(classify(&spec, &[], &align, &phased).unwrap(), 4);
    }

    #[test]
    fn accuracy_examples() {
        let spec = identity_spec(1);
        let mut one = StateVector::zero(1).unwrap();
        one.apply_1q(&pauli_x(), 0).unwrap();
        let data = vec![StateVector::zero(1).unwrap(), one];
        let align = Alignment {
            alpha: 0.0,
            beta: 0.0,
            threshold: 0.0,
            class_of_zero: 0,
            other_class: 1,
        };
        assert_eq!(accuracy(&spec, &[], &align, &data, &[0, 1], Readout::Exact).unwrap(), 1.0);
        assert_eq!(accuracy(&spec, &[], &align, &data, &[1, 0], Readout::Exact).unwrap(), 0.0);
        let shots = Readout::from_shots(100, 3);
        assert_eq!(accuracy(&spec, &[], &align, &data, &[0, 1], shots).unwrap(), 1.0);
    }

    #[test]
    fn aligned_decision_matches_plane_side() {
        let spec = build_qcnn(4, 2, ConvType::Type2, PoolKind::Zx).unwrap();
        let params: Vec<f64> = (0..spec.n_params()).map(|i| 0.9 * i as f64 + 0.2).collect();
        let data: Vec<StateVector> = (0..30)
            .map(|k| {
                let f = k as f64 / 30.0;
                crate::encoding::angle_encode(&[f * PI, 1.0 - f, 2.0 * f, 0.3]).unwrap()
            })
            .collect();
        let labels: Vec<u8> = (0..30).map(|k| (k >= 15) as u8).collect();
        let pts = bloch_readout(&spec, &params, &data, &labels).unwrap();
        let plane = fit_plane(&pts, 5).unwrap();
        let align = alignment_from_plane(&plane, &pts).unwrap();
        let rn = align.rotate(plane.normal);
        assert!((rn[2] - 1.0).abs() < 1e-8);
        let pred = predict_all(&spec, &params, &align, &data, Readout::Exact).unwrap();
        for (p, q) in pts.iter().zip(&pred) {
            let side = plane.side(p.vector()) >= 0.0;
            let zero_side = *q == align.class_of_zero;
            let positive_is_zero = align.class_of_zero == plane.positive;
            if plane.side(p.vector()).abs() > 1e-9 {
                assert_eq!(side, zero_side == positive_is_zero);
            }
        }
    }

    #[test]
    fn one_vs_rest_on_corners() {
        let corners = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-1.0, -1.0, -1.0]];
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (c, v) in corners.iter().enumerate() {
            for k in 0..5 {
                x.push(v.iter().map(|a| a * (1.0 - 0.02 * k as f64)).collect::<Vec<_>>());
                y.push(c as u8);
            }
        }
        let m = OneVsRest::fit(&x, &y, 4, 0).unwrap();
        let pred: Vec<u8> = x.iter().map(|f| m.predict(f)).collect();
        assert_eq!(fraction_correct(&pred, &y), 1.0);
        let relabeled: Vec<u8> = y.iter().map(|l| 3 - l).collect();
        let m2 = OneVsRest::fit(&x, &relabeled, 4, 0).unwrap();
        let pred2: Vec<u8> = x.iter().map(|f| m2.predict(f)).collect();
        assert_eq!(fraction_correct(&pred2, &relabeled), 1.0);
        assert!(OneVsRest::fit(&x[..10], &y[..10], 3, 0).is_err());
    }

    #[test]
    fn two_layer_qcnn_gives_six_features() {
        let spec = build_qcnn(8, 2, ConvType::Type1, PoolKind::Zx).unwrap();
        let p = vec![0.1; spec.n_params()];
        let f = compressed_features(&spec, &p, &StateVector::zero(8).unwrap()).unwrap();
        assert_eq!(f.len(), 6);
    }

    #[test]
    fn rate_is_a_fraction() {
        let enc = build_qcnn(4, 2, ConvType::Type2, PoolKind::Zx).unwrap();
        let dec = crate::training::decoder_for(&enc);
        let data = vec![crate::encoding::angle_encode(&[0.3, 1.2, 2.2, 0.1]).unwrap()];
        let t: Vec<f64> = (0..enc.n_params()).map(|i| i as f64).collect();
        let r = reconstruction_rate(&enc, &t, &dec, &t, &data).unwrap();
        assert!((0.0..=1.0).contains(&r));
    }
}

#[cfg(test)]
mod props {
    use proptest::prelude::*;

    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn alignment_takes_normal_to_z(n in prop::collection::vec(-1.0f64..1.0, 3)) {
            let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            prop_assume!(norm > 1e-3);
            let unit = [n[0] / norm, n[1] / norm, n[2] / norm];
            let (a, b) = alignment_angles(unit).unwrap();
            let r = bloch_ry(bloch_rx(unit, a), b);
            prop_assert!(r[0].abs() < 1e-8 && r[1].abs() < 1e-8 && (r[2] - 1.0).abs() < 1e-8);
        }

        #[test]
        fn aligned_decision_matches_plane_side(n in prop::collection::vec(-1.0f64..1.0, 3), offset in -0.5f64..0.5,
                                               pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 1..20)) {
            let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            prop_assume!(norm > 1e-3);
            let plane = SeparatingPlane { normal: [n[0] / norm, n[1] / norm, n[2] / norm], offset, positive: 0, negative: 1 };
            let (alpha, beta) = alignment_angles(plane.normal).unwrap();
            let align = Alignment { alpha, beta, threshold: -offset, class_of_zero: 0, other_class: 1 };
            for p in pts {
                let v = [p[0], p[1], p[2]];
                // Skip points within rounding of the boundary.
                prop_assume!(plane.side(v).abs() > 1e-9);
                prop_assert_eq!(align.decide(align.rotate(v)[2]), plane.predict(v));
            }
        }
    }
}
