//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # 4-site transverse-field Ising chain
//! model = tim
//! n_sites = 4
//! J = 0.5
//! h = 0.1
//! delta_tau = 0.1
//! n_steps = 50
//! ```
//!
//! `#` starts a comment. Keys are case-sensitive; unknown or repeated keys
//! are errors, as are model parameters that do not belong to the chosen model.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::models::{BoundaryCondition, Model, ModelSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn new(line: Option<usize>, field: Option<&str>, message: impl Into<String>) -> Self {
        Self {
            line,
            field: field.map(str::to_string),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.field) {
            (Some(l), Some(k)) => write!(f, "line {l}, field `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "field `{k}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Trajectory,
    Shots,
    Both,
}

impl RunMode {
    pub fn samples(self) -> bool {
        matches!(self, Self::Shots | Self::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub delta_tau: f64,
    pub n_steps: usize,
    pub n_shots: usize,
    pub seed: u64,
    pub quit_if_fail: bool,
    pub output_dir: PathBuf,
    pub mode: RunMode,
    /// Target infidelity for the convergence-step estimate.
    pub epsilon: f64,
    /// Ry angle of the Hubbard initial state.
    pub theta: f64,
}

const KEYS: &[&str] = &[
    "model",
    "n_sites",
    "boundary",
    "J",
    "h",
    "t",
    "U",
    "delta_tau",
    "n_steps",
    "n_shots",
    "seed",
    "quit_if_fail",
    "output_dir",
    "mode",
    "epsilon",
    "theta",
];

struct Entry {
    line: usize,
    value: String,
}

struct Fields(Vec<(String, Entry)>);

impl Fields {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, e)| e)
    }

    fn parse<T: FromStr>(&self, key: &str, default: Option<T>) -> Result<T, ConfigError>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            Some(e) => e
                .value
                .parse()
                .map_err(|err| ConfigError::new(Some(e.line), Some(key), format!("cannot parse {:?}: {err}", e.value))),
            None => default.ok_or_else(|| ConfigError::new(None, Some(key), "required key is missing")),
        }
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.get(key).map(|e| e.line)
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(None, None, format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }

    pub fn n_qubits(&self) -> usize {
        self.model.n_qubits()
    }
}

fn reject_foreign(fields: &Fields, model: &str, keys: &[&str]) -> Result<(), ConfigError> {
    for &k in keys {
        if let Some(l) = fields.line(k) {
            return Err(ConfigError::new(Some(l), Some(k), format!("not a parameter of model {model}")));
        }
    }
    Ok(())
}

impl FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut entries: Vec<(String, Entry)> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::new(Some(line), None, format!("expected `key = value`, got {content:?}")))?;
            let key = key.trim();
            let value = value.trim().trim_matches('"').to_string();
            if !KEYS.contains(&key) {
                return Err(ConfigError::new(Some(line), Some(key), "unknown key"));
            }
            if let Some((_, prev)) = entries.iter().find(|(k, _)| k == key) {
                return Err(ConfigError::new(
                    Some(line),
                    Some(key),
                    format!("duplicate key (first set on line {})", prev.line),
                ));
            }
            entries.push((key.to_string(), Entry { line, value }));
        }
        let f = Fields(entries);

        let model_name: String = f.parse("model", None)?;
        let n_sites: usize = f.parse("n_sites", None)?;
        let boundary = match f.parse::<String>("boundary", Some("periodic".into()))?.as_str() {
            "periodic" => BoundaryCondition::Periodic,
            "open" => BoundaryCondition::Open,
            other => {
                return Err(ConfigError::new(
                    f.line("boundary"),
                    Some("boundary"),
                    format!("expected periodic or open, got {other:?}"),
                ))
            }
        };
        let model = match model_name.as_str() {
            "tim" => {
                reject_foreign(&f, "tim", &["t", "U", "theta"])?;
                Model::Tim {
                    j: f.parse("J", Some(0.5))?,
                    h: f.parse("h", Some(0.1))?,
                }
            }
            "hubbard" => {
                reject_foreign(&f, "hubbard", &["J", "h"])?;
                Model::Hubbard {
                    t: f.parse("t", Some(-0.1))?,
                    u: f.parse("U", Some(0.1))?,
                }
            }
            other => {
                return Err(ConfigError::new(
                    f.line("model"),
                    Some("model"),
                    format!("expected tim or hubbard, got {other:?}"),
                ))
            }
        };
        let model = ModelSpec::new(model, n_sites, boundary)
            .map_err(|e| ConfigError::new(f.line("n_sites"), Some("n_sites"), e.to_string()))?;

        let mode = match f.parse::<String>("mode", Some("both".into()))?.as_str() {
            "trajectory" => RunMode::Trajectory,
            "shots" => RunMode::Shots,
            "both" => RunMode::Both,
            other => {
                return Err(ConfigError::new(
                    f.line("mode"),
                    Some("mode"),
                    format!("expected trajectory, shots or both, got {other:?}"),
                ))
            }
        };

        let cfg = ExperimentConfig {
            model,
            delta_tau: f.parse("delta_tau", Some(0.1))?,
            n_steps: f.parse("n_steps", Some(50))?,
            n_shots: f.parse("n_shots", Some(100_000))?,
            seed: f.parse("seed", Some(0))?,
            quit_if_fail: f.parse("quit_if_fail", Some(true))?,
            output_dir: f.parse::<String>("output_dir", Some("out".into()))?.into(),
            mode,
            epsilon: f.parse("epsilon", Some(0.01))?,
            theta: f.parse("theta", Some(std::f64::consts::PI))?,
        };
        for key in ["J", "h", "t", "U"] {
            if let Some(e) = f.get(key) {
                let x: f64 = e.value.parse().unwrap_or(f64::NAN);
                if !x.is_finite() {
                    return Err(ConfigError::new(Some(e.line), Some(key), "must be finite"));
                }
            }
        }
        if !(cfg.delta_tau.is_finite() && cfg.delta_tau > 0.0) {
            return Err(ConfigError::new(f.line("delta_tau"), Some("delta_tau"), "must be positive"));
        }
        if cfg.mode.samples() && cfg.n_shots == 0 {
            return Err(ConfigError::new(f.line("n_shots"), Some("n_shots"), "must be at least 1 when sampling"));
        }
        if !(cfg.epsilon.is_finite() && cfg.epsilon > 0.0) {
            return Err(ConfigError::new(f.line("epsilon"), Some("epsilon"), "must be positive"));
        }
        if !cfg.theta.is_finite() {
            return Err(ConfigError::new(f.line("theta"), Some("theta"), "must be finite"));
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_defaults() {
        let c: ExperimentConfig = "# comment\nmodel = tim\nn_sites = 4  # trailing\nseed = 7\n".parse().unwrap();
        assert_eq!(c.model.model, Model::Tim { j: 0.5, h: 0.1 });
        assert_eq!(c.model.boundary, BoundaryCondition::Periodic);
        assert_eq!((c.n_steps, c.n_shots, c.seed, c.quit_if_fail), (50, 100_000, 7, true));
        assert_eq!(c.mode, RunMode::Both);
        let c: ExperimentConfig = "model = hubbard\nn_sites = 2\nt = -0.2\nU = 1\nboundary = open\nmode = trajectory\n"
            .parse()
            .unwrap();
        assert_eq!(c.model.model, Model::Hubbard { t: -0.2, u: 1.0 });
        assert_eq!(c.n_qubits(), 4);
    }

    fn err(text: &str) -> ConfigError {
        text.parse::<ExperimentConfig>().unwrap_err()
    }

    #[test]
    fn errors_carry_line_and_field() {
        let e = err("model = tim\nn_sites = 4\nbogus = 1\n");
        assert_eq!((e.line, e.field.as_deref()), (Some(3), Some("bogus")));
        let e = err("model = tim\nn_sites = four\n");
        assert_eq!((e.line, e.field.as_deref()), (Some(2), Some("n_sites")));
        let e = err("model = tim\n");
        assert_eq!(e.field.as_deref(), Some("n_sites"));
        let e = err("model = tim\nn_sites = 4\nn_sites = 5\n");
        assert_eq!(e.line, Some(3));
        let e = err("model = tim\nn_sites = 4\nU = 1\n");
        assert_eq!(e.field.as_deref(), Some("U"));
        let e = err("model = tim\nn_sites = 1\n");
        assert_eq!(e.field.as_deref(), Some("n_sites"));
        let e = err("model = tim\nn_sites = 4\ndelta_tau = -1\n");
        assert_eq!(e.field.as_deref(), Some("delta_tau"));
        let e = err("model = tim\nn_sites 4\n");
        assert_eq!(e.line, Some(2));
        assert!(err("model = ising\nn_sites = 2").to_string().contains("line 1"));
    }
}
