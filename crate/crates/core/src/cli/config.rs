//! TOML run configuration. Unknown keys are errors; every field has a default.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ansatz::{ConvType, PoolKind};
use crate::error::{QaeError, Result};
use crate::experiment::ExperimentConfig;
use crate::training::TrainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub architecture: String,
    pub layers: usize,
    pub conv_type: u8,
    pub pool_kind: String,
    pub n_qubits: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            architecture: "qcnn".into(),
            layers: 3,
            conv_type: 1,
            pool_kind: "zx".into(),
            n_qubits: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub dir: PathBuf,
    /// Output directory of `prep`; reducers are read from here when present.
    pub prep_dir: PathBuf,
    pub classes: Vec<u8>,
    pub encoding: String,
    pub test_count: usize,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            dir: "data/mnist".into(),
            prep_dir: "runs/prep".into(),
            classes: vec![0, 1],
            encoding: "angle".into(),
            test_count: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingSection {
    pub loss: String,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub iterations: usize,
    pub seed: u64,
    pub mode: String,
    pub tied_decoder: bool,
    pub gradient: String,
    pub workers: usize,
}

impl Default for TrainingSection {
    fn default() -> Self {
        Self {
            loss: "bce".into(),
            learning_rate: 0.005,
            batch_size: 32,
            iterations: 64,
            seed: 0,
            mode: "encoder_only".into(),
            tied_decoder: false,
            gradient: "parameter_shift".into(),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub plane_samples: usize,
    pub shots: u64,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self {
            plane_samples: 2000,
            shots: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub runs: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { runs: 8 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelSection,
    pub data: DataSection,
    pub training: TrainingSection,
    pub eval: EvalSection,
    pub sweep: SweepSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| QaeError::Config(e.to_string()))?;
        cfg.check_names(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| QaeError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            QaeError::Config(m) => QaeError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Runs enum-valued strings through their parsers so errors carry the
    /// offending key and its line.
    fn check_names(&self, text: &str) -> Result<()> {
        fn check<T: FromStr>(key: &str, value: &str, text: &str) -> Result<()>
        where
            T::Err: Display,
        {
            value.parse::<T>().map(|_| ()).map_err(|e| {
                let line = text
                    .lines()
                    .position(|l| {
                        let l = l.trim_start();
                        l.starts_with(key) && l[key.len()..].trim_start().starts_with('=')
                    })
                    .map_or(String::new(), |i| format!("line {}: ", i + 1));
                QaeError::Config(format!("{line}field '{key}': {e}"))
            })
        }
        check::<crate::training::Architecture>("architecture", &self.model.architecture, text)?;
        check::<PoolKind>("pool_kind", &self.model.pool_kind, text)?;
        check::<crate::encoding::Encoding>("encoding", &self.data.encoding, text)?;
        check::<crate::training::LossKind>("loss", &self.training.loss, text)?;
        check::<crate::training::Mode>("mode", &self.training.mode, text)?;
        check::<crate::training::GradientMethod>("gradient", &self.training.gradient, text)?;
        if ConvType::from_index(self.model.conv_type).is_err() {
            return Err(QaeError::Config(format!(
                "field 'conv_type': expected 1, 2 or 3, got {}",
                self.model.conv_type
            )));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let bad = |e: QaeError| QaeError::Config(e.to_string());
        let m = &self.model;
        let t = &self.training;
        let train = TrainConfig {
            architecture: m.architecture.parse().map_err(bad)?,
            layers: m.layers,
            conv_type: ConvType::from_index(m.conv_type).map_err(bad)?,
            pool_kind: m.pool_kind.parse().map_err(bad)?,
            encoding: self.data.encoding.parse().map_err(bad)?,
            loss: t.loss.parse().map_err(bad)?,
            learning_rate: t.learning_rate,
            batch_size: t.batch_size,
            iterations: t.iterations,
            seed: t.seed,
            classes: self.data.classes.clone(),
            n_qubits: m.n_qubits,
            mode: t.mode.parse().map_err(bad)?,
            tied_decoder: t.tied_decoder,
            gradient: t.gradient.parse().map_err(bad)?,
            workers: t.workers,
        };
        train.validate().map_err(bad)?;
        train.build_encoder().map_err(bad)?;
        Ok(ExperimentConfig {
            train,
            test_count: self.data.test_count,
            plane_samples: self.eval.plane_samples,
            shots: self.eval.shots,
        })
    }
}
