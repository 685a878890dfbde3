//! Output files and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const ARTIFACT_VERSION: &str = concat!("weyllab ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub artifact_version: &'static str,
    pub command: String,
    pub outputs: Vec<OutputFile>,
    pub parameters: BTreeMap<String, String>,
}

/// Collects the files written by one command.
pub struct Artifacts {
    dir: PathBuf,
    outputs: Vec<OutputFile>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        fs::write(self.dir.join(name), bytes)?;
        self.outputs.push(OutputFile {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        });
        Ok(())
    }

    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))?;
        self.write(name, &bytes)
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(&canonical(value.clone()))
            .map_err(|e| CliError::Usage(format!("cannot serialize {name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes `manifest.json` listing every output with its digest.
    pub fn finish(self, command: &str, parameters: BTreeMap<String, String>) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            artifact_version: ARTIFACT_VERSION,
            command: command.to_string(),
            outputs: self.outputs,
            parameters,
        };
        let value = serde_json::to_value(&manifest).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut text = serde_json::to_string_pretty(&canonical(value)).map_err(|e| CliError::Usage(e.to_string()))?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Rebuilds objects with sorted keys, whatever map ordering serde_json was
/// compiled with.
fn canonical(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let sorted: BTreeMap<String, Value> = map.into_iter().map(|(k, v)| (k, canonical(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonical).collect()),
        other => other,
    }
}

/// Shortest round-trip decimal, switching to exponent form for very small or
/// large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
