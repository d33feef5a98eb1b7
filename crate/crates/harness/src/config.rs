//! Experiment definition: one TOML document per experiment.

use std::path::{Path, PathBuf};

use rrl_core::agents::{AgentKind, CompositeWeights, LearnerConfig};
use rrl_core::cmdp::CmdpSpec;
use rrl_core::envs::{toy_env_build, SyntheticEnvConfig, ToyEnvConfig};
use rrl_core::metrics::CostMode;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvironmentConfig {
    Toy(ToyEnvConfig),
    Synthetic(SyntheticEnvConfig),
    /// Arbitrary tabular CMDP. `latent` and `valence` annotate states and
    /// actions for the affect metrics and default to zero.
    Tabular {
        spec: CmdpSpec,
        horizon: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        latent: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        valence: Option<Vec<i8>>,
    },
}

impl EnvironmentConfig {
    pub fn name(&self) -> &'static str {
        match self {
            EnvironmentConfig::Toy(_) => "toy",
            EnvironmentConfig::Synthetic(_) => "synthetic",
            EnvironmentConfig::Tabular { .. } => "tabular",
        }
    }

    /// Copies the experiment's threshold into environments that carry one.
    pub fn with_threshold(&self, d: f64) -> Self {
        let mut env = self.clone();
        match &mut env {
            EnvironmentConfig::Toy(c) => c.threshold_d = d,
            EnvironmentConfig::Tabular { spec, .. } => spec.threshold_d = d,
            EnvironmentConfig::Synthetic(_) => {}
        }
        env
    }

    /// The exact tabular model, when one exists.
    pub fn cmdp(&self) -> Option<Result<CmdpSpec, HarnessError>> {
        match self {
            EnvironmentConfig::Toy(c) => Some(toy_env_build(c).map_err(HarnessError::config)),
            EnvironmentConfig::Tabular { spec, .. } => {
                Some(rrl_core::validate_cmdp(spec.clone()).map_err(HarnessError::config))
            }
            EnvironmentConfig::Synthetic(_) => None,
        }
    }
}

fn default_episodes() -> usize {
    200
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationConfig {
    #[serde(default = "default_episodes")]
    pub episodes: usize,
    #[serde(default)]
    pub cost_mode: CostMode,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            episodes: default_episodes(),
            cost_mode: CostMode::default(),
        }
    }
}

/// Grid of reward weights and/or thresholds; cells are their product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<[f64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
}

/// Limits checked against each cell's seed-aggregated metrics.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateConfig {
    pub max_violation_probability: Option<f64>,
    pub max_safety_cost: Option<f64>,
    pub min_engagement_rate: Option<f64>,
    pub min_emotional_alignment: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub seeds: Vec<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub agent: AgentKind,
    pub environment: EnvironmentConfig,
    pub learner: LearnerConfig,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateConfig>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

/// One point of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub index: usize,
    pub weights: CompositeWeights,
    pub threshold_d: f64,
}

/// Everything that determines a single run. Its canonical JSON is what the
/// fingerprint hashes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvedConfig {
    pub version: u32,
    pub seed: u64,
    pub cell: usize,
    pub agent: AgentKind,
    pub environment: EnvironmentConfig,
    pub learner: LearnerConfig,
    pub evaluation: EvaluationConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let config: Self = toml::from_str(text).map_err(HarnessError::config)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String, HarnessError> {
        toml::to_string(self).map_err(HarnessError::config)
    }

    /// Checks every run's configuration up front so that no run starts on an
    /// experiment that would fail later.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.version != CONFIG_VERSION {
            return Err(HarnessError::Config(format!(
                "unsupported config version {} (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::Config("at least one seed is required".into()));
        }
        if self.evaluation.episodes == 0 {
            return Err(HarnessError::Config(
                "evaluation.episodes must be positive".into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.weights.is_none() && sweep.thresholds.is_none() {
                return Err(HarnessError::Config(
                    "sweep needs weights and/or thresholds".into(),
                ));
            }
            if sweep.weights.as_ref().is_some_and(|w| w.is_empty())
                || sweep.thresholds.as_ref().is_some_and(|t| t.is_empty())
            {
                return Err(HarnessError::Config("sweep grids must be nonempty".into()));
            }
        }
        match &self.environment {
            EnvironmentConfig::Toy(c) => {
                toy_env_build(c).map_err(HarnessError::config)?;
            }
            EnvironmentConfig::Synthetic(c) => c.validate().map_err(HarnessError::config)?,
            EnvironmentConfig::Tabular {
                spec,
                latent,
                valence,
                ..
            } => {
                rrl_core::validate_cmdp(spec.clone()).map_err(HarnessError::config)?;
                if latent.as_ref().is_some_and(|l| l.len() != spec.n_states) {
                    return Err(HarnessError::Config(
                        "tabular latent needs one value per state".into(),
                    ));
                }
                if valence.as_ref().is_some_and(|v| v.len() != spec.n_actions) {
                    return Err(HarnessError::Config(
                        "tabular valence needs one value per action".into(),
                    ));
                }
            }
        }
        if let EnvironmentConfig::Toy(ToyEnvConfig { horizon: 0, .. })
        | EnvironmentConfig::Synthetic(SyntheticEnvConfig { horizon: 0, .. })
        | EnvironmentConfig::Tabular { horizon: 0, .. } = &self.environment
        {
            return Err(HarnessError::Config("horizon must be positive".into()));
        }
        for cell in self.cells()? {
            let learner = self.learner_for(&cell);
            learner.validate().map_err(HarnessError::config)?;
        }
        Ok(())
    }

    /// Sweep cells in weights-major order; a single cell without a sweep.
    pub fn cells(&self) -> Result<Vec<SweepCell>, HarnessError> {
        let base_w = self.learner.weights;
        let base_d = self.learner.threshold_d;
        let (weights, thresholds) = match &self.sweep {
            None => (vec![base_w], vec![base_d]),
            Some(s) => {
                let weights = match &s.weights {
                    None => vec![base_w],
                    Some(ws) => ws
                        .iter()
                        .map(|w| CompositeWeights::new(w[0], w[1], w[2]))
                        .collect::<Result<_, _>>()
                        .map_err(HarnessError::config)?,
                };
                (weights, s.thresholds.clone().unwrap_or(vec![base_d]))
            }
        };
        let mut cells = Vec::with_capacity(weights.len() * thresholds.len());
        for w in &weights {
            for &d in &thresholds {
                cells.push(SweepCell {
                    index: cells.len(),
                    weights: *w,
                    threshold_d: d,
                });
            }
        }
        Ok(cells)
    }

    fn learner_for(&self, cell: &SweepCell) -> LearnerConfig {
        LearnerConfig {
            weights: cell.weights,
            threshold_d: cell.threshold_d,
            ..self.learner.clone()
        }
    }

    pub fn resolve(&self, cell: &SweepCell, seed: u64) -> ResolvedConfig {
        ResolvedConfig {
            version: self.version,
            seed,
            cell: cell.index,
            agent: self.agent,
            environment: self.environment.with_threshold(cell.threshold_d),
            learner: self.learner_for(cell),
            evaluation: self.evaluation,
        }
    }

    /// Number of (cell, seed) runs.
    pub fn unit_count(&self) -> Result<usize, HarnessError> {
        Ok(self.cells()?.len() * self.seeds.len())
    }
}
