//! State sources, noise descriptions and the robustness config file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use qst::simulate::{random_states, NoiseModel, ShotBudget};
use qst::states::DensityMatrix;

use crate::CliError;

/// Where a state comes from: a built-in name, a seeded random draw, or a
/// density-matrix JSON file.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum StateSource {
    Named { name: String },
    Random { seed: u64, count: usize },
    File { path: PathBuf },
}

impl StateSource {
    /// Parses `NAME`, `random:SEED`, `random:SEED:COUNT` or `file:PATH`.
    /// Relative file paths are resolved against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self, CliError> {
        if let Some(rest) = text.strip_prefix("random:") {
            let mut parts = rest.split(':');
            let seed = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::Usage(format!("`{text}`: expected random:SEED or random:SEED:COUNT")))?;
            let count = match parts.next() {
                None => 1,
                Some(c) => c
                    .parse()
                    .ok()
                    .filter(|&c| c > 0)
                    .ok_or_else(|| CliError::Usage(format!("`{text}`: COUNT must be a positive integer")))?,
            };
            if parts.next().is_some() {
                return Err(CliError::Usage(format!("`{text}`: too many fields")));
            }
            return Ok(StateSource::Random { seed, count });
        }
        if let Some(path) = text.strip_prefix("file:") {
            let path = PathBuf::from(path);
            let path = match base {
                Some(base) if path.is_relative() => base.join(path),
                _ => path,
            };
            return Ok(StateSource::File { path });
        }
        Ok(StateSource::Named { name: text.to_string() })
    }

    pub fn load(&self, dim: usize) -> Result<Vec<DensityMatrix>, CliError> {
        let states = match self {
            StateSource::Named { name } => vec![DensityMatrix::named(name)?],
            StateSource::Random { seed, count } => random_states(dim, *count, *seed),
            StateSource::File { path } => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
                vec![DensityMatrix::from_json(&text)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?]
            }
        };
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(CliError::Usage(format!(
                "state {self:?} has dimension {}, protocol needs {dim}",
                bad.dim()
            )));
        }
        Ok(states)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Budget {
    #[default]
    #[serde(alias = "per_setting")]
    PerSetting,
    Total,
}

impl From<Budget> for ShotBudget {
    fn from(b: Budget) -> Self {
        match b {
            Budget::PerSetting => ShotBudget::PerSetting,
            Budget::Total => ShotBudget::Total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

fn one() -> f64 {
    1.0
}

/// One entry of the `noise` list; list-valued `shots` or `sigma_rel`
/// expand into one noise level per value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    Ideal,
    Poisson {
        shots: OneOrMany<u64>,
        #[serde(default = "one")]
        efficiency: f64,
        /// Defaults to `efficiency` (a calibrated detector).
        #[serde(default)]
        assumed_efficiency: Option<f64>,
    },
    Gaussian {
        sigma_rel: OneOrMany<f64>,
    },
}

impl NoiseSpec {
    pub fn expand(&self, budget: Budget) -> Vec<NoiseModel> {
        match self {
            NoiseSpec::Ideal => vec![NoiseModel::ideal()],
            NoiseSpec::Poisson {
                shots,
                efficiency,
                assumed_efficiency,
            } => shots
                .to_vec()
                .into_iter()
                .map(|n| {
                    NoiseModel::poisson(n)
                        .with_efficiency(*efficiency, assumed_efficiency.unwrap_or(*efficiency))
                        .with_budget(budget.into())
                })
                .collect(),
            NoiseSpec::Gaussian { sigma_rel } => {
                sigma_rel.to_vec().into_iter().map(NoiseModel::gaussian).collect()
            }
        }
    }
}

fn default_trials() -> usize {
    1
}

/// Declarative description of a robustness run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessConfig {
    pub protocols: Vec<String>,
    /// `NAME`, `random:SEED`, `random:SEED:COUNT` or `file:PATH`.
    pub states: Vec<String>,
    pub noise: Vec<NoiseSpec>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budget: Budget,
}

impl RobustnessConfig {
    /// Reads TOML, or JSON when the file ends in `.json`.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let parsed = if is_json {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}
