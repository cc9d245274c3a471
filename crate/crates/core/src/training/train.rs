//! Mini-batch SGD over encoder (and decoder) parameters.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ansatz::{build_arch_a, build_arch_b, build_qcnn, CircuitSpec, ConvType, PoolKind};
use crate::encoding::Encoding;
use crate::error::{validation, QaeError, Result};
use crate::sim::StateVector;

use super::gradient::{accumulate_with_output, GradientMethod};
use super::loss::LossKind;
use super::observable::TrashWeights;
use super::reconstruct::{decoder_for, reconstruction_loss, reconstruction_loss_grad};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    Qcnn,
    ArchA,
    ArchB,
}

impl Architecture {
    pub fn name(self) -> &'static str {
        match self {
            Architecture::Qcnn => "qcnn",
            Architecture::ArchA => "arch_a",
            Architecture::ArchB => "arch_b",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Architecture {
    type Err = QaeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qcnn" => Ok(Architecture::Qcnn),
            "arch_a" | "a" => Ok(Architecture::ArchA),
            "arch_b" | "b" => Ok(Architecture::ArchB),
            _ => validation(format!("unknown architecture '{s}' (expected qcnn, arch_a or arch_b)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Trash-qubit loss on the encoder alone.
    EncoderOnly,
    /// Encoder plus decoder, trained on `1 − overlap`.
    FullQae,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::EncoderOnly => "encoder_only",
            Mode::FullQae => "full_qae",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = QaeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "encoder_only" => Ok(Mode::EncoderOnly),
            "full_qae" => Ok(Mode::FullQae),
            _ => validation(format!("unknown mode '{s}' (expected encoder_only or full_qae)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub architecture: Architecture,
    pub layers: usize,
    pub conv_type: ConvType,
    pub pool_kind: PoolKind,
    pub encoding: Encoding,
    pub loss: LossKind,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub iterations: usize,
    pub seed: u64,
    pub classes: Vec<u8>,
    pub n_qubits: usize,
    pub mode: Mode,
    pub tied_decoder: bool,
    pub gradient: GradientMethod,
    /// Worker threads for per-sample evaluation; 1 is the reference mode.
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            architecture: Architecture::Qcnn,
            layers: 3,
            conv_type: ConvType::Type1,
            pool_kind: PoolKind::Zx,
            encoding: Encoding::Angle,
            loss: LossKind::Bce,
            learning_rate: 0.005,
            batch_size: 32,
            iterations: 64,
            seed: 0,
            classes: vec![0, 1],
            n_qubits: 8,
            mode: Mode::EncoderOnly,
            tied_decoder: false,
            gradient: GradientMethod::ParameterShift,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return validation(format!("learning_rate must be finite and non-negative, got {}", self.learning_rate));
        }
        if self.batch_size == 0 {
            return validation("batch_size must be at least 1");
        }
        if self.iterations == 0 {
            return validation("iterations must be at least 1");
        }
        if self.workers == 0 {
            return validation("workers must be at least 1");
        }
        if self.classes.is_empty() || self.classes.iter().any(|&c| c > 9) {
            return validation("classes must be a non-empty list of digits 0-9");
        }
        if self.layers == 0 && self.architecture == Architecture::Qcnn {
            return validation("layers must be at least 1");
        }
        Ok(())
    }

    /// Encoder circuit described by this configuration. For Arch A/B
    /// `layers` only sets the compressed count `n >> layers`; 0 keeps every qubit.
    pub fn build_encoder(&self) -> Result<CircuitSpec> {
        let n = self.n_qubits;
        match self.architecture {
            Architecture::Qcnn => build_qcnn(n, self.layers, self.conv_type, self.pool_kind),
            Architecture::ArchA => build_arch_a(n)?.with_compressed_count((n >> self.layers).max(1)),
            Architecture::ArchB => build_arch_b(n)?.with_compressed_count((n >> self.layers).max(1)),
        }
    }

    /// Trainable parameter count (encoder plus untied decoder).
    pub fn n_params(&self) -> Result<usize> {
        let p = self.build_encoder()?.n_params();
        Ok(if self.mode == Mode::FullQae && !self.tied_decoder { 2 * p } else { p })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean batch loss at the parameters before each update.
    pub losses: Vec<f64>,
    pub initial_params: Vec<f64>,
    pub params: Vec<f64>,
    pub wall_time: f64,
    pub seed: u64,
}

/// Indexed access to encoded training states.
pub trait SampleSource: Sync {
    fn len(&self) -> usize;
    fn state(&self, i: usize) -> Result<StateVector>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl SampleSource for [StateVector] {
    fn len(&self) -> usize {
        <[StateVector]>::len(self)
    }

    fn state(&self, i: usize) -> Result<StateVector> {
        Ok(self[i].clone())
    }
}

impl SampleSource for Vec<StateVector> {
    fn len(&self) -> usize {
        Vec::len(self)
    }

    fn state(&self, i: usize) -> Result<StateVector> {
        Ok(self[i].clone())
    }
}

/// Per-sample loss with an analytic gradient.
pub trait SampleObjective: Sync {
    fn n_params(&self) -> usize;
    fn value(&self, params: &[f64], input: &StateVector) -> Result<f64>;
    /// Returns the loss and adds its gradient into `grad`.
    fn value_and_grad(&self, params: &[f64], input: &StateVector, method: GradientMethod, grad: &mut [f64])
        -> Result<f64>;
}

/// Trash-qubit loss of an encoder.
pub struct TrashObjective {
    pub spec: CircuitSpec,
    pub loss: LossKind,
}

/// `P(1)` of every trash qubit after encoding, in trash order.
pub fn trash_probs(spec: &CircuitSpec, params: &[f64], input: &StateVector) -> Result<Vec<f64>> {
    if spec.trash().is_empty() {
        return validation("circuit has no trash qubits");
    }
    let out = spec.run(params, input)?;
    Ok(spec.trash().iter().map(|&q| out.prob_one_unchecked(q)).collect())
}

impl SampleObjective for TrashObjective {
    fn n_params(&self) -> usize {
        self.spec.n_params()
    }

    fn value(&self, params: &[f64], input: &StateVector) -> Result<f64> {
        Ok(self.loss.value(&trash_probs(&self.spec, params, input)?))
    }

    fn value_and_grad(
        &self,
        params: &[f64],
        input: &StateVector,
        method: GradientMethod,
        grad: &mut [f64],
    ) -> Result<f64> {
        if self.spec.trash().is_empty() {
            return validation("circuit has no trash qubits");
        }
        let out = self.spec.run(params, input)?;
        let probs: Vec<f64> = self.spec.trash().iter().map(|&q| out.prob_one_unchecked(q)).collect();
        let (value, weights) = self.loss.value_and_weights(&probs);
        let obs = TrashWeights {
            qubits: self.spec.trash().to_vec(),
            weights,
        };
        accumulate_with_output(&self.spec, params, input, out, &obs, method, grad)?;
        Ok(value)
    }
}

/// Encoder/decoder reconstruction loss. Untied parameters are laid out as
/// `[θ, θ′]`; tied mode uses `θ′ = θ`.
pub struct ReconstructionObjective {
    pub encoder: CircuitSpec,
    pub decoder: CircuitSpec,
    pub tied: bool,
}

impl ReconstructionObjective {
    pub fn new(encoder: CircuitSpec, tied: bool) -> Self {
        let decoder = decoder_for(&encoder);
        Self { encoder, decoder, tied }
    }

    pub fn split<'a>(&self, params: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        if self.tied {
            (params, params)
        } else {
            params.split_at(self.encoder.n_params())
        }
    }
}

impl SampleObjective for ReconstructionObjective {
    fn n_params(&self) -> usize {
        if self.tied {
            self.encoder.n_params()
        } else {
            self.encoder.n_params() + self.decoder.n_params()
        }
    }

    fn value(&self, params: &[f64], input: &StateVector) -> Result<f64> {
        let (a, b) = self.split(params);
        reconstruction_loss(&self.encoder, a, &self.decoder, b, input)
    }

    fn value_and_grad(
        &self,
        params: &[f64],
        input: &StateVector,
        method: GradientMethod,
        grad: &mut [f64],
    ) -> Result<f64> {
        let (a, b) = self.split(params);
        if self.tied {
            let mut gd = vec![0.0; grad.len()];
            let v = reconstruction_loss_grad(&self.encoder, a, &self.decoder, b, input, method, 1.0, grad, &mut gd)?;
            grad.iter_mut().zip(gd).for_each(|(g, d)| *g += d);
            Ok(v)
        } else {
            let (ge, gd) = grad.split_at_mut(self.encoder.n_params());
            reconstruction_loss_grad(&self.encoder, a, &self.decoder, b, input, method, 1.0, ge, gd)
        }
    }
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers <= 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| QaeError::Config(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Mean loss and mean gradient over `indices`. Per-sample gradients are
/// reduced in index order, so the result does not depend on `workers`.
pub fn batch_value_and_grad(
    objective: &dyn SampleObjective,
    params: &[f64],
    data: &dyn SampleSource,
    indices: &[usize],
    method: GradientMethod,
    workers: usize,
) -> Result<(f64, Vec<f64>)> {
    if indices.is_empty() {
        return validation("batch is empty");
    }
    let one = |&i: &usize| -> Result<(f64, Vec<f64>)> {
        let mut g = vec![0.0; params.len()];
        let v = objective.value_and_grad(params, &data.state(i)?, method, &mut g)?;
        Ok((v, g))
    };
    let parts: Vec<Result<(f64, Vec<f64>)>> = if workers <= 1 {
        indices.iter().map(one).collect()
    } else {
        with_workers(workers, || indices.par_iter().map(one).collect())?
    };
    let mut loss = 0.0;
    let mut grad = vec![0.0; params.len()];
    for part in parts {
        let (v, g) = part?;
        loss += v;
        grad.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
    }
    let b = indices.len() as f64;
    grad.iter_mut().for_each(|g| *g /= b);
    Ok((loss / b, grad))
}

/// Mean loss over `indices` without gradients.
pub fn mean_loss(
    objective: &dyn SampleObjective,
    params: &[f64],
    data: &dyn SampleSource,
    indices: &[usize],
) -> Result<f64> {
    if indices.is_empty() {
        return validation("no samples");
    }
    let mut total = 0.0;
    for &i in indices {
        total += objective.value(params, &data.state(i)?)?;
    }
    Ok(total / indices.len() as f64)
}

/// Objective selected by `config.mode`.
pub fn objective_for(config: &TrainConfig) -> Result<Box<dyn SampleObjective>> {
    let enc = config.build_encoder()?;
    Ok(match config.mode {
        Mode::EncoderOnly => Box::new(TrashObjective {
            spec: enc,
            loss: config.loss,
        }),
        Mode::FullQae => Box::new(ReconstructionObjective::new(enc, config.tied_decoder)),
    })
}

/// Uniform `[0, 2π)` draw for `n` parameters.
pub fn init_params(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..TAU)).collect()
}

/// Runs `config.iterations` SGD steps on `data`.
pub fn train(config: &TrainConfig, data: &dyn SampleSource) -> Result<TrainReport> {
    config.validate()?;
    let objective = objective_for(config)?;
    train_objective(config, objective.as_ref(), data)
}

/// SGD loop for an arbitrary objective; hyper-parameters come from `config`.
pub fn train_objective(
    config: &TrainConfig,
    objective: &dyn SampleObjective,
    data: &dyn SampleSource,
) -> Result<TrainReport> {
    config.validate()?;
    if data.is_empty() {
        return Err(QaeError::Data("training set is empty".into()));
    }
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let initial = init_params(objective.n_params(), &mut rng);
    let mut params = initial.clone();
    let batch = config.batch_size.min(data.len());
    let mut losses = Vec::with_capacity(config.iterations);
    for step in 0..config.iterations {
        let idx = sample(&mut rng, data.len(), batch).into_vec();
        let (loss, grad) = batch_value_and_grad(objective, &params, data, &idx, config.gradient, config.workers)?;
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(QaeError::Numeric(format!("non-finite loss or gradient at step {step}")));
        }
        log::debug!("step {step}: loss {loss:.6}");
        losses.push(loss);
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= config.learning_rate * g;
        }
    }
    Ok(TrainReport {
        losses,
        initial_params: initial,
        params,
        wall_time: start.elapsed().as_secs_f64(),
        seed: config.seed,
    })
}
