//! On-disk artifacts: parameter checkpoints, JSON reports, Bloch CSVs and
//! run manifests.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{QaeError, Result};
use crate::eval::BlochPoint;

pub const PARAMS_HEADER: &str = "QAEPARAMS v1";

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number with 17 significant digits; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(fmt17(x).parse().expect("formatted float is a JSON number"))
}

pub fn params_to_text(params: &[f64]) -> String {
    let mut s = format!("{PARAMS_HEADER}\ncount {}\n", params.len());
    for p in params {
        s.push_str(&fmt17(*p));
        s.push('\n');
    }
    s
}

pub fn params_from_text(text: &str) -> Result<Vec<f64>> {
    let bad = |line: usize, msg: String| QaeError::Format {
        format: "QAEPARAMS",
        line,
        msg,
    };
    let mut lines = text.lines();
    if lines.next() != Some(PARAMS_HEADER) {
        return Err(bad(1, format!("expected header '{PARAMS_HEADER}'")));
    }
    let count: usize = lines
        .next()
        .and_then(|l| l.strip_prefix("count "))
        .and_then(|c| c.trim().parse().ok())
        .ok_or_else(|| bad(2, "expected 'count N'".into()))?;
    let values = lines
        .enumerate()
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .map_err(|e| bad(i + 3, format!("{e}: '{l}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != count {
        return Err(bad(count + 3, format!("expected {count} values, found {}", values.len())));
    }
    Ok(values)
}

pub fn write_params(path: &Path, params: &[f64]) -> Result<()> {
    fs::write(path, params_to_text(params))?;
    Ok(())
}

pub fn read_params(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| QaeError::Data(format!("{}: {e}", path.display())))?;
    params_from_text(&text)
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| QaeError::Data(e.to_string()))?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| QaeError::Data(format!("{}: {e}", path.display())))
}

pub fn write_bloch_csv(path: &Path, points: &[BlochPoint], phase: &str) -> Result<()> {
    let io = |e: csv::Error| QaeError::Data(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["id", "label", "x", "y", "z", "phase"]).map_err(io)?;
    for (i, p) in points.iter().enumerate() {
        w.write_record([
            i.to_string(),
            p.label.to_string(),
            fmt17(p.x),
            fmt17(p.y),
            fmt17(p.z),
            phase.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of `content` framed the way git frames blobs.
pub fn content_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub input_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_params: Option<usize>,
    pub outputs: Vec<String>,
    pub config: Value,
}

impl RunManifest {
    /// `inputs` are labelled byte blobs; their order is part of the hash.
    pub fn new(command: &str, seed: u64, config: Value, inputs: &[(&str, Vec<u8>)], outputs: &[&str]) -> Self {
        let mut framed = Vec::new();
        for (label, bytes) in inputs {
            framed.extend_from_slice(format!("{label} {}\n", content_hash(bytes)).as_bytes());
        }
        Self {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            seed,
            input_hash: content_hash(&framed),
            n_params: None,
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            config,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let v = serde_json::to_value(self).map_err(|e| QaeError::Data(e.to_string()))?;
        write_json(path, &v)
    }
}

/// Object builder keeping insertion order.
pub fn object(fields: Vec<(&str, Value)>) -> Value {
    Value::Object(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}
