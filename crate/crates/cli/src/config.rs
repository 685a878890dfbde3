//! Flat `key = value` configuration with embedded defaults.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use weyllab_core::{ModelParams, WeylLabel};

use crate::error::CliError;

/// (key, default, description). Order here is the order `show-config` prints.
pub const DEFAULTS: &[(&str, &str, &str)] = &[
    ("j", "1", "hopping scale J; all energies are in units of J"),
    ("je", "1", "on-site modulation amplitude Je"),
    ("delta0", "-0.1", "uniform detuning of the resonators"),
    ("kappa", "0.1", "port damping of the leftmost resonator"),
    ("n", "20", "number of resonators in the open chain"),
    ("threads", "1", "worker threads for parameter sweeps"),
    ("kx", "0.5pi", "bulk-bands: fixed lattice momentum"),
    ("grid", "101", "bulk-bands: points per axis on [-pi, pi]"),
    ("weyl", "all", "winding, berry-field: W1..W4 or all"),
    ("radius", "0.2", "chern: sphere radius"),
    ("mesh", "64", "chern: sphere mesh"),
    (
        "theta_r",
        "0.25pi",
        "chern, winding: loop radius around the node projection",
    ),
    ("torus_grid", "40", "chern: points per axis on the mapped torus"),
    ("curvature_step", "1e-4", "berry-field: plaquette edge"),
    (
        "field_points",
        "9",
        "berry-field: samples per axis of the cube around the node",
    ),
    ("field_extent", "0.1", "berry-field: half edge of the cube"),
    ("theta1", "0", "density, reflection: control angle theta1"),
    (
        "theta2",
        "0.5pi",
        "density, reflection, fermi-arc, table1: control angle theta2",
    ),
    ("edge_points", "101", "edge-spectrum: points per axis on [-pi, pi]"),
    (
        "edge_densities",
        "false",
        "edge-spectrum: also write per-state site densities",
    ),
    (
        "delta0_window",
        "1",
        "reflection, fermi-arc, table1: detuning scan half width",
    ),
    ("delta0_step", "0.01", "reflection: detuning step"),
    ("samples", "128", "winding: points on the loop"),
    ("loop_start", "0", "winding: loop parameter of the first sample"),
    ("theta1_extent", "0.5pi", "fermi-arc, table1: theta1 scan half width"),
    ("theta1_step", "0.01pi", "fermi-arc, table1: theta1 scan step"),
    ("arc_sizes", "4,12", "fermi-arc: chain lengths"),
    ("table_sizes", "4,6,8,12,20,36", "table1: chain lengths"),
];

/// Effective settings: defaults, then the config file, then `--set` in order.
#[derive(Debug, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut cfg = Config {
            values: DEFAULTS
                .iter()
                .map(|(k, v, _)| (k.to_string(), v.to_string()))
                .collect(),
        };
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = split_pair(line).ok_or_else(|| {
                    CliError::Usage(format!("{}:{}: expected key = value", path.display(), lineno + 1))
                })?;
                cfg.set(k, v)?;
            }
        }
        for o in overrides {
            let (k, v) = split_pair(o).ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {o:?}")))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(CliError::Usage(format!("unknown config key {key:?}"))),
        }
    }

    fn raw(&self, key: &str) -> &str {
        &self.values[key]
    }

    pub fn real(&self, key: &str) -> Result<f64, CliError> {
        parse_real(self.raw(key))
            .ok_or_else(|| bad(key, self.raw(key), "a finite number (optionally with a pi suffix)"))
    }

    pub fn count(&self, key: &str) -> Result<usize, CliError> {
        self.raw(key)
            .trim()
            .parse()
            .map_err(|_| bad(key, self.raw(key), "a non-negative integer"))
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.raw(key).trim() {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            v => Err(bad(key, v, "true or false")),
        }
    }

    pub fn sizes(&self, key: &str) -> Result<Vec<usize>, CliError> {
        let v = self.raw(key);
        let sizes: Option<Vec<usize>> = v.split(',').map(|s| s.trim().parse().ok()).collect();
        match sizes {
            Some(s) if !s.is_empty() => Ok(s),
            _ => Err(bad(key, v, "a comma-separated list of chain lengths")),
        }
    }

    pub fn weyl_labels(&self) -> Result<Vec<WeylLabel>, CliError> {
        let v = self.raw("weyl");
        if v.trim().eq_ignore_ascii_case("all") {
            return Ok(WeylLabel::ALL.to_vec());
        }
        WeylLabel::parse(v)
            .map(|l| vec![l])
            .ok_or_else(|| bad("weyl", v, "W1, W2, W3, W4 or all"))
    }

    pub fn model(&self) -> Result<ModelParams, CliError> {
        let p = ModelParams {
            j: self.real("j")?,
            je: self.real("je")?,
            delta0: self.real("delta0")?,
            kappa: self.real("kappa")?,
            n: self.count("n")?,
        };
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(p)
    }

    /// Settings recorded in the manifest. `threads` is left out because it
    /// does not affect results.
    pub fn recorded(&self) -> BTreeMap<String, String> {
        self.values
            .iter()
            .filter(|(k, _)| *k != "threads")
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (key, _, doc) in DEFAULTS {
            let _ = writeln!(out, "# {doc}\n{key} = {}", self.values[*key]);
        }
        out
    }
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    (!k.is_empty() && !v.is_empty()).then_some((k, v))
}

fn bad(key: &str, value: &str, want: &str) -> CliError {
    CliError::Usage(format!("{key} = {value:?}: expected {want}"))
}

/// Parses `1.5`, `pi`, `-pi`, `0.25pi`.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let x = match s.strip_suffix("pi") {
        Some("") | Some("+") => PI,
        Some("-") => -PI,
        Some(m) => m.trim().parse::<f64>().ok()? * PI,
        None => s.parse().ok()?,
    };
    x.is_finite().then_some(x)
}
