//! End-to-end runs: featurize MNIST, train, then score classification or
//! reconstruction. Shared by the binary, the examples and the test suites.

use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ansatz::CircuitSpec;
use crate::data::{self, ImageSample, SplitSpec};
use crate::encoding::{fit_reducer, Encoding, Reducer};
use crate::error::{QaeError, Result};
use crate::eval::{
    self, alignment_from_plane, bloch_readout, fit_plane, Alignment, BlochPoint, Readout, SeparatingPlane,
};
use crate::sim::StateVector;
use crate::training::{decoder_for, train, init_params, Mode, SampleSource, TrainConfig, TrainReport};

pub const TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
pub const TRAIN_LABELS: &str = "train-labels-idx1-ubyte";
pub const TEST_IMAGES: &str = "t10k-images-idx3-ubyte";
pub const TEST_LABELS: &str = "t10k-labels-idx1-ubyte";

/// Official MNIST train and test splits.
#[derive(Debug, Clone)]
pub struct Mnist {
    pub train: Vec<ImageSample>,
    pub test: Vec<ImageSample>,
}

pub fn load_mnist(dir: &Path) -> Result<Mnist> {
    let open = |i: &str, l: &str| data::load_idx(&dir.join(i), &dir.join(l));
    Ok(Mnist {
        train: open(TRAIN_IMAGES, TRAIN_LABELS)?,
        test: open(TEST_IMAGES, TEST_LABELS)?,
    })
}

/// Classical feature vectors with labels; states are encoded on access.
#[derive(Debug, Clone)]
pub struct FeatureSet {
    pub encoding: Encoding,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

impl SampleSource for FeatureSet {
    fn len(&self) -> usize {
        self.features.len()
    }

    fn state(&self, i: usize) -> Result<StateVector> {
        self.encoding.encode(&self.features[i])
    }
}

impl FeatureSet {
    /// Rows `idx` in the given order.
    pub fn subset(&self, idx: &[usize]) -> FeatureSet {
        FeatureSet {
            encoding: self.encoding,
            features: idx.iter().map(|&i| self.features[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// PCA reducer on normalized pixels for the angle path.
pub fn fit_pixel_reducer(images: &[ImageSample], d: usize) -> Result<Reducer> {
    let rows: Vec<Vec<f64>> = images.iter().map(data::normalized_pixels).collect();
    fit_reducer(&rows, d)
}

/// Feature vectors for `encoding` on `n_qubits`. Amplitude encoding needs
/// 8 qubits (16×16 resize) and drops blank images.
pub fn featurize(
    images: &[ImageSample],
    encoding: Encoding,
    n_qubits: usize,
    reducer: Option<&Reducer>,
) -> Result<FeatureSet> {
    let (features, labels) = match encoding {
        Encoding::Angle => {
            let r = reducer.ok_or_else(|| QaeError::Config("angle encoding needs a fitted reducer".into()))?;
            if r.output_dim() != n_qubits {
                return Err(QaeError::Config(format!(
                    "reducer yields {} features but the register has {n_qubits} qubits",
                    r.output_dim()
                )));
            }
            let f = images
                .iter()
                .map(|s| r.reduce_and_scale(&data::normalized_pixels(s)))
                .collect::<Result<Vec<_>>>()?;
            (f, images.iter().map(|s| s.label).collect())
        }
        Encoding::Amplitude => {
            if n_qubits != 8 {
                return Err(QaeError::Config(format!(
                    "amplitude encoding uses 256 pixels and needs 8 qubits, not {n_qubits}"
                )));
            }
            let (kept, _) = data::drop_blank(images.to_vec());
            (kept.iter().map(data::resize16).collect(), kept.iter().map(|s| s.label).collect())
        }
    };
    Ok(FeatureSet {
        encoding,
        features,
        labels,
    })
}

/// Everything a run needs beyond the training hyper-parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub train: TrainConfig,
    pub test_count: usize,
    /// Training samples used for the plane fit (0 = all).
    pub plane_samples: usize,
    /// 0 = exact expectations.
    pub shots: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            test_count: 400,
            plane_samples: 2000,
            shots: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            classes: self.train.classes.clone(),
            test_count: self.test_count,
            seed: self.train.seed,
        }
    }
}

/// Training and evaluation features for one run.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub train: FeatureSet,
    pub eval: FeatureSet,
}

/// Filters, splits and featurizes. The reducer is fitted on the filtered
/// training images when none is supplied.
pub fn prepare(cfg: &ExperimentConfig, mnist: &Mnist, reducer: Option<&Reducer>) -> Result<Prepared> {
    let (train_imgs, eval_imgs) = data::make_split(&mnist.train, &mnist.test, &cfg.split_spec())?;
    let n = cfg.train.n_qubits;
    let fitted;
    let reducer = match (cfg.train.encoding, reducer) {
        (Encoding::Angle, None) => {
            fitted = fit_pixel_reducer(&train_imgs, n)?;
            Some(&fitted)
        }
        (_, r) => r,
    };
    Ok(Prepared {
        train: featurize(&train_imgs, cfg.train.encoding, n, reducer)?,
        eval: featurize(&eval_imgs, cfg.train.encoding, n, reducer)?,
    })
}

/// Per-class `(correct, total)` counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassCount {
    pub label: u8,
    pub correct: usize,
    pub total: usize,
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub encoder: CircuitSpec,
    pub report: TrainReport,
    pub plane: SeparatingPlane,
    pub alignment: Alignment,
    pub accuracy: f64,
    pub per_class: Vec<ClassCount>,
    pub predictions: Vec<u8>,
    /// Evaluation-set Bloch points before and after the alignment rotation.
    pub pre_align: Vec<BlochPoint>,
    pub post_align: Vec<BlochPoint>,
}

fn plane_subset(cfg: &ExperimentConfig, train: &FeatureSet) -> FeatureSet {
    let m = train.features.len();
    if cfg.plane_samples == 0 || cfg.plane_samples >= m {
        return train.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.train.seed ^ 0x5eed_91a7e);
    let mut idx = sample(&mut rng, m, cfg.plane_samples).into_vec();
    idx.sort_unstable();
    train.subset(&idx)
}

pub fn per_class(predicted: &[u8], labels: &[u8]) -> Vec<ClassCount> {
    let mut classes: Vec<u8> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    classes
        .into_iter()
        .map(|c| ClassCount {
            label: c,
            correct: predicted.iter().zip(labels).filter(|(p, l)| **l == c && p == l).count(),
            total: labels.iter().filter(|&&l| l == c).count(),
        })
        .collect()
}

/// Fits plane and alignment on training points, then scores the evaluation set.
pub fn score_classifier(
    cfg: &ExperimentConfig,
    encoder: &CircuitSpec,
    params: &[f64],
    prepared: &Prepared,
) -> Result<(SeparatingPlane, Alignment, Vec<u8>, Vec<BlochPoint>, Vec<BlochPoint>)> {
    let fit_set = plane_subset(cfg, &prepared.train);
    let fit_points = bloch_readout(encoder, params, &fit_set, &fit_set.labels)?;
    let plane = fit_plane(&fit_points, cfg.train.seed)?;
    let alignment = alignment_from_plane(&plane, &fit_points)?;
    let readout = Readout::from_shots(cfg.shots, cfg.train.seed);
    let predictions = eval::predict_all(encoder, params, &alignment, &prepared.eval, readout)?;
    let pre = bloch_readout(encoder, params, &prepared.eval, &prepared.eval.labels)?;
    let post = pre
        .iter()
        .map(|p| {
            let [x, y, z] = alignment.rotate(p.vector());
            BlochPoint { x, y, z, label: p.label }
        })
        .collect();
    Ok((plane, alignment, predictions, pre, post))
}

/// Encoder-only training followed by plane fit, alignment and accuracy.
pub fn run_classification(cfg: &ExperimentConfig, prepared: &Prepared) -> Result<Classification> {
    let mut train_cfg = cfg.train.clone();
    train_cfg.mode = Mode::EncoderOnly;
    let encoder = train_cfg.build_encoder()?;
    let report = train(&train_cfg, &prepared.train)?;
    let (plane, alignment, predictions, pre_align, post_align) =
        score_classifier(cfg, &encoder, &report.params, prepared)?;
    let accuracy = eval::fraction_correct(&predictions, &prepared.eval.labels);
    Ok(Classification {
        per_class: per_class(&predictions, &prepared.eval.labels),
        encoder,
        report,
        plane,
        alignment,
        accuracy,
        predictions,
        pre_align,
        post_align,
    })
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub encoder: CircuitSpec,
    pub decoder: CircuitSpec,
    pub report: TrainReport,
    pub rate: f64,
    /// Rate at the untrained initial parameters on the same samples.
    pub baseline_rate: f64,
    pub n_params: usize,
}

/// Full encoder/decoder training and reconstruction rate on the eval set.
pub fn run_reconstruction(cfg: &ExperimentConfig, prepared: &Prepared) -> Result<Reconstruction> {
    let mut train_cfg = cfg.train.clone();
    train_cfg.mode = Mode::FullQae;
    let encoder = train_cfg.build_encoder()?;
    let decoder = decoder_for(&encoder);
    let report = train(&train_cfg, &prepared.train)?;
    let p = encoder.n_params();
    let split = |v: &[f64]| -> (Vec<f64>, Vec<f64>) {
        if train_cfg.tied_decoder {
            (v.to_vec(), v.to_vec())
        } else {
            (v[..p].to_vec(), v[p..].to_vec())
        }
    };
    let (a, b) = split(&report.params);
    let rate = eval::reconstruction_rate(&encoder, &a, &decoder, &b, &prepared.eval)?;
    let (a0, b0) = split(&report.initial_params);
    let baseline_rate = eval::reconstruction_rate(&encoder, &a0, &decoder, &b0, &prepared.eval)?;
    Ok(Reconstruction {
        n_params: report.params.len(),
        encoder,
        decoder,
        report,
        rate,
        baseline_rate,
    })
}

/// Encoder-only training scored with one-vs-rest SVMs on per-qubit Bloch
/// features of every compressed qubit.
pub fn run_multiclass(cfg: &ExperimentConfig, prepared: &Prepared) -> Result<f64> {
    let mut train_cfg = cfg.train.clone();
    train_cfg.mode = Mode::EncoderOnly;
    let encoder = train_cfg.build_encoder()?;
    let report = train(&train_cfg, &prepared.train)?;
    score_multiclass(cfg, &encoder, &report.params, prepared)
}

/// One-vs-rest accuracy of trained encoder parameters.
pub fn score_multiclass(
    cfg: &ExperimentConfig,
    encoder: &CircuitSpec,
    params: &[f64],
    prepared: &Prepared,
) -> Result<f64> {
    let fit_set = plane_subset(cfg, &prepared.train);
    eval::multiclass_eval(
        encoder,
        params,
        &fit_set,
        &fit_set.labels,
        &prepared.eval,
        &prepared.eval.labels,
        cfg.train.classes.len(),
        cfg.train.seed,
    )
}

/// Random initial parameters for `cfg` (same draw as the first step of
/// training).
pub fn initial_params(cfg: &TrainConfig) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(init_params(cfg.n_params()?, &mut rng))
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::PIXELS;

    /// Two synthetic digit shapes: a vertical bar (label 1) and a ring
    /// (label 0), with per-sample jitter.
    pub(crate) fn synthetic(count: usize, seed: u64) -> Vec<ImageSample> {
        (0..count)
            .map(|k| {
                let label = (k % 2) as u8;
                let shift = ((k as u64 * 7 + seed) % 5) as i32 - 2;
                let mut px = vec![0u8; PIXELS];
                for r in 0..28i32 {
                    for c in 0..28i32 {
                        let (dr, dc) = (r - 14, c - 14 - shift);
                        let on = if label == 1 {
                            dc.abs() <= 1 && dr.abs() <= 9
                        } else {
                            let d2 = dr * dr + dc * dc;
                            (36..=81).contains(&d2)
                        };
                        if on {
                            px[(r * 28 + c) as usize] = 200 + ((k * 13 + (r * c) as usize) % 56) as u8;
                        }
                    }
                }
                ImageSample::new(px, label).unwrap()
            })
            .collect()
    }

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            train: TrainConfig {
                n_qubits: 4,
                layers: 2,
                batch_size: 8,
                iterations: 4,
                seed: 2,
                ..TrainConfig::default()
            },
            test_count: 20,
            plane_samples: 30,
            shots: 0,
        }
    }

    #[test]
    fn classification_pipeline_runs() {
        let mnist = Mnist {
            train: synthetic(60, 1),
            test: synthetic(40, 2),
        };
        let cfg = small_cfg();
        let prepared = prepare(&cfg, &mnist, None).unwrap();
        assert_eq!(prepared.eval.features.len(), 20);
        let out = run_classification(&cfg, &prepared).unwrap();
        assert!((0.0..=1.0).contains(&out.accuracy));
        assert_eq!(out.pre_align.len(), 20);
        let total: usize = out.per_class.iter().map(|c| c.total).sum();
        assert_eq!(total, 20);
        let again = run_classification(&cfg, &prepared).unwrap();
        assert_eq!(again.predictions, out.predictions);
        assert_eq!(again.report.params, out.report.params);
    }

    #[test]
    fn reconstruction_pipeline_runs() {
        let mnist = Mnist {
            train: synthetic(40, 3),
            test: synthetic(20, 4),
        };
        let mut cfg = small_cfg();
        cfg.test_count = 10;
        let prepared = prepare(&cfg, &mnist, None).unwrap();
        let out = run_reconstruction(&cfg, &prepared).unwrap();
        assert!((0.0..=1.0).contains(&out.rate));
        assert_eq!(out.n_params, 2 * out.encoder.n_params());
    }

    #[test]
    fn amplitude_features_need_eight_qubits() {
        let imgs = synthetic(4, 0);
        assert!(featurize(&imgs, Encoding::Amplitude, 4, None).is_err());
        let f = featurize(&imgs, Encoding::Amplitude, 8, None).unwrap();
        assert_eq!(f.features[0].len(), 256);
        assert_eq!(f.state(0).unwrap().n_qubits(), 8);
    }

    #[test]
    fn mean_std_examples() {
        assert_eq!(mean_std(&[1.0, 3.0]), (2.0, 2f64.sqrt()));
        assert_eq!(mean_std(&[5.0]), (5.0, 0.0));
    }
}
