use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub tol: f64,
    pub k_max: usize,
    pub n_max: usize,
    pub mesh_ratio: f64,
    pub output: Output,
    pub trace: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { tol: 1e-8, k_max: 6, n_max: 6, mesh_ratio: 0.9, output: Output::Text, trace: false }
    }
}

/// Keys accepted in a config file; every one is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub tol: Option<f64>,
    pub k_max: Option<usize>,
    pub n_max: Option<usize>,
    pub mesh_ratio: Option<f64>,
    pub output: Option<Output>,
    pub trace: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<FileConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Values given on the command line or through `DISTINT_*` variables.
#[derive(Debug, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub k_max: Option<usize>,
    pub n_max: Option<usize>,
    pub mesh_ratio: Option<f64>,
    pub output: Option<Output>,
    pub trace: bool,
}

impl RunConfig {
    pub fn resolve(over: Overrides, file: FileConfig) -> anyhow::Result<RunConfig> {
        let d = RunConfig::default();
        let c = RunConfig {
            tol: over.tol.or(file.tol).unwrap_or(d.tol),
            k_max: over.k_max.or(file.k_max).unwrap_or(d.k_max),
            n_max: over.n_max.or(file.n_max).unwrap_or(d.n_max),
            mesh_ratio: over.mesh_ratio.or(file.mesh_ratio).unwrap_or(d.mesh_ratio),
            output: over.output.or(file.output).unwrap_or(d.output),
            trace: over.trace || file.trace.unwrap_or(d.trace),
        };
        if !(c.tol > 0.0) {
            bail!("tol must be positive, got {}", c.tol);
        }
        if !(c.mesh_ratio > 0.0 && c.mesh_ratio < 1.0) {
            bail!("mesh_ratio must lie in (0, 1), got {}", c.mesh_ratio);
        }
        Ok(c)
    }
}
