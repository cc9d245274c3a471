//! `qae` command line: prep, train, eval, reconstruct and sweep.

pub mod artifacts;
pub mod config;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;
use rayon::prelude::*;
use serde_json::Value;

use crate::ansatz::CircuitSpec;
use crate::encoding::{Encoding, Reducer};
use crate::error::{QaeError, Result};
use crate::experiment::{
    self, fit_pixel_reducer, load_mnist, mean_std, per_class, prepare, score_classifier, score_multiclass,
    ExperimentConfig, Mnist, Prepared, TEST_IMAGES, TEST_LABELS, TRAIN_IMAGES, TRAIN_LABELS,
};
use crate::training::{train, Mode, TrainReport};
use artifacts::{num, object, RunManifest};
pub use config::RunConfig;

/// SHA-256 of the uncompressed official IDX files.
pub const MNIST_DIGESTS: [(&str, &str); 4] = [
    (TRAIN_IMAGES, "ba891046e6505d7aadcbbe25680a0738ad16aec93bde7f9b65e87a2fc25776db"),
    (TRAIN_LABELS, "65a50cbbf4e906d70832878ad85ccda5333a97f0f4c3dd2ef09a8a9eef7101c5"),
    (TEST_IMAGES, "0fa7898d509279e482958e8ce81c8e77db3f2f8254e26661ceb7762c4d494ce7"),
    (TEST_LABELS, "ff7bcfd416de33731a308c3f266cc351222c34898ecbeaf847f06e48f7ec33f2"),
];

/// Qubit counts `prep` fits reducers for.
pub const PREP_QUBITS: [usize; 2] = [8, 16];

pub const DIGEST_FILE: &str = "dataset.sha256";
pub const MANIFEST: &str = "manifest.json";
pub const PARAMS: &str = "params.txt";
pub const CIRCUIT: &str = "circuit.txt";
pub const REPORT: &str = "report.json";
pub const METRICS: &str = "metrics.json";
pub const BLOCH_PRE: &str = "bloch_pre.csv";
pub const BLOCH_POST: &str = "bloch_post.csv";
pub const SWEEP: &str = "sweep.json";

pub fn reducer_file(n_qubits: usize) -> String {
    format!("reducer_{n_qubits}.txt")
}

#[derive(Debug, Parser)]
#[command(name = "qae", version, about = "Quantum autoencoder training and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify MNIST and fit the PCA reducers.
    Prep,
    /// Train an encoder and write its checkpoint.
    Train,
    /// Fit the plane and alignment for a checkpoint and score the test set.
    Eval,
    /// Train encoder and decoder and report the reconstruction rate.
    Reconstruct,
    /// Repeat train and eval over seeds base, base+1, ...
    Sweep,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub shots: Option<u64>,
    /// Parameter checkpoint for `eval` (defaults to `<out>/params.txt`).
    #[arg(long, global = true)]
    pub checkpoint: Option<PathBuf>,
    /// MNIST directory for `prep` (defaults to the config's data dir).
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    /// Number of runs for `sweep` (overrides the config).
    #[arg(long, global = true)]
    pub runs: Option<usize>,
}

pub fn exit_code(err: &QaeError) -> i32 {
    match err {
        QaeError::Config(_) | QaeError::Validation(_) => 2,
        QaeError::Data(_)
        | QaeError::WrongMagic { .. }
        | QaeError::Truncated { .. }
        | QaeError::CountMismatch { .. }
        | QaeError::Format { .. }
        | QaeError::Io(_) => 3,
        QaeError::Numeric(_) | QaeError::Capacity(_) | QaeError::DimensionMismatch { .. } => 4,
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let o = &cli.opts;
    let mut cfg = match &o.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = o.seed {
        cfg.training.seed = s;
    }
    if let Some(w) = o.workers {
        cfg.training.workers = w;
    }
    if let Some(s) = o.shots {
        cfg.eval.shots = s;
    }
    if let Some(r) = o.runs {
        cfg.sweep.runs = r;
    }
    let out = o.out.clone().unwrap_or_else(|| PathBuf::from("runs/out"));
    match cli.command {
        Command::Prep => {
            let data = o.data.clone().unwrap_or_else(|| cfg.data.dir.clone());
            let out = o.out.clone().unwrap_or_else(|| cfg.data.prep_dir.clone());
            cmd_prep(&data, &out).map(|_| ())
        }
        Command::Train => cmd_train(&cfg, &out).map(|_| ()),
        Command::Eval => {
            let ckpt = o.checkpoint.clone().unwrap_or_else(|| out.join(PARAMS));
            cmd_eval(&cfg, &ckpt, &out).map(|_| ())
        }
        Command::Reconstruct => cmd_reconstruct(&cfg, &out).map(|_| ()),
        Command::Sweep => cmd_sweep(&cfg, &out).map(|_| ()),
    }
}

fn dataset_digests(dir: &Path) -> Result<String> {
    let mut text = String::new();
    for (name, _) in MNIST_DIGESTS {
        let path = dir.join(name);
        let bytes = fs::read(&path).map_err(|e| {
            QaeError::Data(format!(
                "{}: {e}; no network download is attempted, place the uncompressed IDX files in {}",
                path.display(),
                dir.display()
            ))
        })?;
        text.push_str(&format!("{}  {name}\n", artifacts::sha256_hex(&bytes)));
    }
    Ok(text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrepOutcome {
    /// False when an earlier run with matching digests left nothing to do.
    pub fitted: bool,
    pub digests: String,
}

/// Verifies the MNIST files and fits one reducer per qubit count on the full
/// training split.
pub fn cmd_prep(data_dir: &Path, out_dir: &Path) -> Result<PrepOutcome> {
    prep_with_digests(data_dir, out_dir, &MNIST_DIGESTS)
}

/// `cmd_prep` against an explicit digest table, in `MNIST_DIGESTS` file order.
pub fn prep_with_digests(data_dir: &Path, out_dir: &Path, expected: &[(&str, &str); 4]) -> Result<PrepOutcome> {
    let digests = dataset_digests(data_dir)?;
    for ((name, want), line) in expected.iter().zip(digests.lines()) {
        let got = line.split_whitespace().next().unwrap_or_default();
        if got != *want {
            return Err(QaeError::Data(format!("{name}: sha256 {got} does not match {want}")));
        }
    }
    fs::create_dir_all(out_dir)?;
    let digest_path = out_dir.join(DIGEST_FILE);
    let done = fs::read_to_string(&digest_path).is_ok_and(|d| d == digests)
        && PREP_QUBITS.iter().all(|&n| {
            fs::read_to_string(out_dir.join(reducer_file(n)))
                .is_ok_and(|t| Reducer::from_text(&t).is_ok_and(|r| r.output_dim() == n))
        });
    if done {
        info!("prep: {} already up to date", out_dir.display());
        return Ok(PrepOutcome { fitted: false, digests });
    }
    let mnist = load_mnist(data_dir)?;
    for n in PREP_QUBITS {
        let r = fit_pixel_reducer(&mnist.train, n)?;
        fs::write(out_dir.join(reducer_file(n)), r.to_text())?;
        info!("prep: fitted {n}-component reducer");
    }
    // Written last so an interrupted run is redone.
    fs::write(&digest_path, &digests)?;
    Ok(PrepOutcome { fitted: true, digests })
}

/// Everything a command needs from disk.
struct Inputs {
    exp: ExperimentConfig,
    prepared: Prepared,
    mnist: Mnist,
    reducer: Option<Reducer>,
    hash_inputs: Vec<(&'static str, Vec<u8>)>,
}

fn reducer_for(cfg: &RunConfig, mnist: &Mnist) -> Result<Option<Reducer>> {
    let n = cfg.model.n_qubits;
    if cfg.data.encoding.parse::<Encoding>()? != Encoding::Angle {
        return Ok(None);
    }
    let path = cfg.data.prep_dir.join(reducer_file(n));
    if let Ok(text) = fs::read_to_string(&path) {
        let r = Reducer::from_text(&text)?;
        if r.output_dim() == n {
            return Ok(Some(r));
        }
    }
    info!("no reducer at {}, fitting on the training split", path.display());
    fit_pixel_reducer(&mnist.train, n).map(Some)
}

fn load_inputs(cfg: &RunConfig) -> Result<Inputs> {
    let exp = cfg.experiment()?;
    let digests = dataset_digests(&cfg.data.dir)?;
    let mnist = load_mnist(&cfg.data.dir)?;
    let reducer = reducer_for(cfg, &mnist)?;
    let prepared = prepare(&exp, &mnist, reducer.as_ref())?;
    let mut hash_inputs = vec![
        ("config", cfg.to_toml().into_bytes()),
        ("dataset", digests.into_bytes()),
    ];
    if let Some(r) = &reducer {
        hash_inputs.push(("reducer", r.to_text().into_bytes()));
    }
    Ok(Inputs {
        exp,
        prepared,
        mnist,
        reducer,
        hash_inputs,
    })
}

fn config_json(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn report_json(report: &TrainReport) -> Value {
    object(vec![
        ("seed", report.seed.into()),
        ("wall_time_s", num(report.wall_time)),
        ("losses", Value::Array(report.losses.iter().map(|&l| num(l)).collect())),
        ("initial_params", Value::Array(report.initial_params.iter().map(|&p| num(p)).collect())),
        ("params", Value::Array(report.params.iter().map(|&p| num(p)).collect())),
    ])
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub encoder: CircuitSpec,
    pub report: TrainReport,
    pub manifest: RunManifest,
}

/// Trains per the config; writes manifest, circuit, checkpoint and report.
pub fn cmd_train(cfg: &RunConfig, out: &Path) -> Result<TrainOutput> {
    let inputs = load_inputs(cfg)?;
    let tc = &inputs.exp.train;
    let encoder = tc.build_encoder()?;
    fs::create_dir_all(out)?;
    let mut manifest = RunManifest::new(
        "train",
        tc.seed,
        config_json(cfg),
        &inputs.hash_inputs,
        &[CIRCUIT, PARAMS, REPORT],
    );
    manifest.n_params = Some(tc.n_params()?);
    manifest.write(&out.join(MANIFEST))?;
    fs::write(out.join(CIRCUIT), encoder.to_text())?;
    let report = train(tc, &inputs.prepared.train)?;
    artifacts::write_params(&out.join(PARAMS), &report.params)?;
    artifacts::write_json(&out.join(REPORT), &report_json(&report))?;
    info!(
        "train: seed {} loss {:.6} -> {:.6} in {:.1}s",
        report.seed,
        report.losses.first().copied().unwrap_or(f64::NAN),
        report.losses.last().copied().unwrap_or(f64::NAN),
        report.wall_time
    );
    Ok(TrainOutput {
        encoder,
        report,
        manifest,
    })
}

/// Encoder half of a checkpoint.
fn encoder_params(cfg: &ExperimentConfig, encoder: &CircuitSpec, params: &[f64]) -> Result<Vec<f64>> {
    let p = encoder.n_params();
    let want = cfg.train.n_params()?;
    if params.len() != want {
        return Err(QaeError::Config(format!(
            "checkpoint holds {} parameters but the config's circuit needs {want}",
            params.len()
        )));
    }
    Ok(params[..p].to_vec())
}

fn classification_metrics(
    cfg: &RunConfig,
    exp: &ExperimentConfig,
    encoder: &CircuitSpec,
    params: &[f64],
    prepared: &Prepared,
) -> Result<(Value, Option<(Vec<crate::eval::BlochPoint>, Vec<crate::eval::BlochPoint>)>)> {
    let labels = &prepared.eval.labels;
    if exp.train.classes.len() == 2 && encoder.compressed().len() == 1 {
        let (plane, alignment, predictions, pre, post) = score_classifier(exp, encoder, params, prepared)?;
        let accuracy = crate::eval::fraction_correct(&predictions, labels);
        let counts = per_class(&predictions, labels)
            .into_iter()
            .map(|c| {
                object(vec![
                    ("label", c.label.into()),
                    ("correct", c.correct.into()),
                    ("total", c.total.into()),
                ])
            })
            .collect();
        let mean_abs_z = |pts: &[crate::eval::BlochPoint]| {
            pts.iter().map(|p| p.z.abs()).sum::<f64>() / pts.len().max(1) as f64
        };
        let metrics = object(vec![
            ("seed", exp.train.seed.into()),
            ("accuracy", num(accuracy)),
            ("per_class", Value::Array(counts)),
            ("test_count", labels.len().into()),
            ("plane_normal", Value::Array(plane.normal.iter().map(|&v| num(v)).collect())),
            ("plane_offset", num(plane.offset)),
            ("alpha", num(alignment.alpha)),
            ("beta", num(alignment.beta)),
            ("threshold", num(alignment.threshold)),
            ("class_of_zero", alignment.class_of_zero.into()),
            ("mean_abs_z_pre", num(mean_abs_z(&pre))),
            ("mean_abs_z_post", num(mean_abs_z(&post))),
            ("config", config_json(cfg)),
        ]);
        Ok((metrics, Some((pre, post))))
    } else {
        let accuracy = score_multiclass(exp, encoder, params, prepared)?;
        let metrics = object(vec![
            ("seed", exp.train.seed.into()),
            ("accuracy", num(accuracy)),
            ("test_count", labels.len().into()),
            ("config", config_json(cfg)),
        ]);
        Ok((metrics, None))
    }
}

/// Scores a checkpoint. Binary runs with one compressed qubit also export the
/// pre- and post-alignment Bloch points; other runs use one-vs-rest SVMs.
pub fn cmd_eval(cfg: &RunConfig, checkpoint: &Path, out: &Path) -> Result<Value> {
    let raw = fs::read(checkpoint)
        .map_err(|e| QaeError::Data(format!("checkpoint {}: {e}", checkpoint.display())))?;
    let params = artifacts::params_from_text(&String::from_utf8_lossy(&raw))?;
    let mut inputs = load_inputs(cfg)?;
    inputs.hash_inputs.push(("checkpoint", raw));
    let exp = &inputs.exp;
    let encoder = exp.train.build_encoder()?;
    let params = encoder_params(exp, &encoder, &params)?;
    fs::create_dir_all(out)?;
    RunManifest::new(
        "eval",
        exp.train.seed,
        config_json(cfg),
        &inputs.hash_inputs,
        &[METRICS, BLOCH_PRE, BLOCH_POST],
    )
    .write(&out.join(MANIFEST))?;
    let (metrics, points) = classification_metrics(cfg, exp, &encoder, &params, &inputs.prepared)?;
    artifacts::write_json(&out.join(METRICS), &metrics)?;
    if let Some((pre, post)) = points {
        artifacts::write_bloch_csv(&out.join(BLOCH_PRE), &pre, "pre_align")?;
        artifacts::write_bloch_csv(&out.join(BLOCH_POST), &post, "post_align")?;
    }
    Ok(metrics)
}

/// Full encoder/decoder training; metrics hold the trained and initial rates.
pub fn cmd_reconstruct(cfg: &RunConfig, out: &Path) -> Result<Value> {
    let mut cfg = cfg.clone();
    cfg.training.mode = Mode::FullQae.name().into();
    let inputs = load_inputs(&cfg)?;
    let tc = &inputs.exp.train;
    fs::create_dir_all(out)?;
    let mut manifest = RunManifest::new(
        "reconstruct",
        tc.seed,
        config_json(&cfg),
        &inputs.hash_inputs,
        &[CIRCUIT, PARAMS, REPORT, METRICS],
    );
    manifest.n_params = Some(tc.n_params()?);
    manifest.write(&out.join(MANIFEST))?;
    let encoder = tc.build_encoder()?;
    fs::write(out.join(CIRCUIT), encoder.to_text())?;
    let r = experiment::run_reconstruction(&inputs.exp, &inputs.prepared)?;
    artifacts::write_params(&out.join(PARAMS), &r.report.params)?;
    artifacts::write_json(&out.join(REPORT), &report_json(&r.report))?;
    let metrics = object(vec![
        ("seed", tc.seed.into()),
        ("reconstruction_rate", num(r.rate)),
        ("baseline_rate", num(r.baseline_rate)),
        ("n_params", r.n_params.into()),
        ("test_count", inputs.prepared.eval.labels.len().into()),
        ("config", config_json(&cfg)),
    ]);
    artifacts::write_json(&out.join(METRICS), &metrics)?;
    Ok(metrics)
}

/// Runs seeds `base + i` for `i < runs`; accuracy mean and sample std.
/// With several workers the runs themselves go in parallel, each
/// single-threaded, and results are gathered in run order.
pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<Value> {
    let base = cfg.training.seed;
    let runs = cfg.sweep.runs;
    if runs == 0 {
        return Err(QaeError::Config("sweep.runs must be at least 1".into()));
    }
    let inputs = load_inputs(cfg)?;
    let (mnist, reducer) = (&inputs.mnist, inputs.reducer.as_ref());
    fs::create_dir_all(out)?;
    RunManifest::new("sweep", base, config_json(cfg), &inputs.hash_inputs, &[SWEEP]).write(&out.join(MANIFEST))?;

    let workers = cfg.training.workers.max(1);
    let one = |i: usize| -> Result<(u64, f64)> {
        let mut run_cfg = cfg.clone();
        run_cfg.training.seed = base + i as u64;
        if workers > 1 {
            run_cfg.training.workers = 1;
        }
        let exp = run_cfg.experiment()?;
        let prepared = prepare(&exp, mnist, reducer)?;
        let encoder = exp.train.build_encoder()?;
        let report = train(&exp.train, &prepared.train)?;
        let (m, _) = classification_metrics(&run_cfg, &exp, &encoder, &report.params, &prepared)?;
        let acc = m["accuracy"].as_f64().unwrap_or(f64::NAN);
        info!("sweep: run {i} seed {} accuracy {acc:.4}", exp.train.seed);
        Ok((exp.train.seed, acc))
    };
    let results: Vec<(u64, f64)> = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| QaeError::Config(e.to_string()))?;
        pool.install(|| (0..runs).into_par_iter().map(one).collect::<Result<_>>())?
    } else {
        (0..runs).map(one).collect::<Result<_>>()?
    };
    let accs: Vec<f64> = results.iter().map(|r| r.1).collect();
    let (mean, std) = mean_std(&accs);
    let per_run = results
        .iter()
        .map(|&(seed, acc)| object(vec![("seed", seed.into()), ("accuracy", num(acc))]))
        .collect();
    let summary = object(vec![
        ("base_seed", base.into()),
        ("runs", runs.into()),
        ("mean_accuracy", num(mean)),
        ("std_accuracy", num(std)),
        ("per_run", Value::Array(per_run)),
        ("config", config_json(cfg)),
    ]);
    artifacts::write_json(&out.join(SWEEP), &summary)?;
    Ok(summary)
}
