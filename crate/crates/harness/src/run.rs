use std::time::Instant;

use rayon::prelude::*;
use rrl_core::agents::{train_agent, AgentKind, RuleBasedPolicy};
use rrl_core::envs::{toy_env, StateAnnotation, SyntheticEnv, TabularEnv};
use rrl_core::metrics::{aggregate, evaluate_policy, EvalSettings, MetricReport};
use rrl_core::rollout::{Environment, Policy};
use serde::{Deserialize, Serialize};

use crate::config::{EnvironmentConfig, ExperimentConfig, GateConfig, ResolvedConfig, SweepCell};
use crate::fingerprint::fingerprint;
use crate::record::{RunRecord, RECORD_FORMAT_VERSION};
use crate::HarnessError;

pub enum BuiltEnv {
    Tabular(TabularEnv),
    Synthetic(SyntheticEnv),
}

impl BuiltEnv {
    pub fn as_dyn(&mut self) -> &mut dyn Environment {
        match self {
            BuiltEnv::Tabular(e) => e,
            BuiltEnv::Synthetic(e) => e,
        }
    }
}

pub fn build_env(config: &EnvironmentConfig) -> Result<BuiltEnv, HarnessError> {
    Ok(match config {
        EnvironmentConfig::Toy(c) => BuiltEnv::Tabular(toy_env(c).map_err(HarnessError::config)?),
        EnvironmentConfig::Synthetic(c) => {
            BuiltEnv::Synthetic(SyntheticEnv::new(c.clone()).map_err(HarnessError::config)?)
        }
        EnvironmentConfig::Tabular {
            spec,
            horizon,
            latent,
            valence,
        } => {
            let env = TabularEnv::new(spec.clone(), *horizon).map_err(HarnessError::config)?;
            BuiltEnv::Tabular(env.with_annotation(StateAnnotation {
                latent: latent.clone().unwrap_or(vec![0.0; spec.n_states]),
                valence: valence.clone().unwrap_or(vec![0; spec.n_actions]),
            }))
        }
    })
}

/// The heuristic baseline for an environment: reach out unless the observed
/// readiness signals distress.
pub fn rule_based_for(config: &EnvironmentConfig) -> RuleBasedPolicy {
    match config {
        EnvironmentConfig::Toy(_) => RuleBasedPolicy::for_toy(),
        EnvironmentConfig::Synthetic(c) => RuleBasedPolicy::for_synthetic(c),
        EnvironmentConfig::Tabular { spec, valence, .. } => {
            let v = valence.clone().unwrap_or(vec![0; spec.n_actions]);
            RuleBasedPolicy {
                distress_threshold: 0.0,
                engage_action: v.iter().position(|&x| x > 0).unwrap_or(0),
                withdraw_action: v.iter().position(|&x| x < 0).unwrap_or(spec.n_actions - 1),
            }
        }
    }
}

/// Trains (unless rule-based) and evaluates one resolved run.
pub fn run_unit(resolved: &ResolvedConfig) -> Result<RunRecord, HarnessError> {
    let started = Instant::now();
    let mut built = build_env(&resolved.environment)?;
    let env = built.as_dyn();
    let settings = EvalSettings {
        episodes: resolved.evaluation.episodes,
        cost_mode: resolved.evaluation.cost_mode,
        threshold_d: resolved.learner.threshold_d,
    };
    let (train, mut policy): (_, Box<dyn Policy>) = match resolved.agent {
        AgentKind::RuleBased => (None, Box::new(rule_based_for(&resolved.environment))),
        kind => {
            let report = train_agent(env, kind, &resolved.learner, resolved.seed).map_err(|e| {
                HarnessError::Runtime(format!(
                    "cell {} seed {}: {e}",
                    resolved.cell, resolved.seed
                ))
            })?;
            let greedy = report.greedy_policy();
            (Some(report), Box::new(greedy))
        }
    };
    let (metrics, _) = evaluate_policy(env, policy.as_mut(), &settings, resolved.seed)
        .map_err(HarnessError::runtime)?;
    Ok(RunRecord {
        format_version: RECORD_FORMAT_VERSION,
        fingerprint: fingerprint(resolved)?,
        seed: resolved.seed,
        cell: resolved.cell,
        agent: resolved.agent,
        config: resolved.clone(),
        train,
        metrics,
        wall_clock_ms: started.elapsed().as_millis() as u64,
    })
}

/// Runs every (cell, seed) unit on a pool of `workers` threads.
///
/// Records come back cell-major, seed-minor, whatever the scheduling.
pub fn run_experiment(
    config: &ExperimentConfig,
    workers: usize,
) -> Result<Vec<RunRecord>, HarnessError> {
    config.validate()?;
    let units: Vec<ResolvedConfig> = config
        .cells()?
        .iter()
        .flat_map(|cell| config.seeds.iter().map(|&s| config.resolve(cell, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(HarnessError::runtime)?;
    pool.install(|| units.par_iter().map(run_unit).collect())
}

/// Seed-aggregated metrics of one sweep cell for one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub agent: AgentKind,
    pub cell: SweepCell,
    pub metrics: MetricReport,
}

pub fn summarize_cells(
    config: &ExperimentConfig,
    records: &[RunRecord],
) -> Result<Vec<CellSummary>, HarnessError> {
    let mut out = Vec::new();
    for cell in config.cells()? {
        for agent in AgentKind::ALL {
            let reports: Vec<MetricReport> = records
                .iter()
                .filter(|r| r.cell == cell.index && r.agent == agent)
                .map(|r| r.metrics.clone())
                .collect();
            if reports.is_empty() {
                continue;
            }
            out.push(CellSummary {
                agent,
                cell,
                metrics: aggregate(&reports).map_err(HarnessError::runtime)?,
            });
        }
    }
    Ok(out)
}

/// Fails when any aggregated cell breaks a configured limit.
pub fn check_gate(gate: &GateConfig, summaries: &[CellSummary]) -> Result<(), HarnessError> {
    let mut failures = Vec::new();
    for s in summaries {
        let m = &s.metrics;
        let tag = format!("{} cell {}", s.agent.label(), s.cell.index);
        if let Some(max) = gate.max_violation_probability {
            if m.violation_probability > max {
                failures.push(format!(
                    "{tag}: violation probability {} > {max}",
                    m.violation_probability
                ));
            }
        }
        if let Some(max) = gate.max_safety_cost {
            if m.safety_cost > max {
                failures.push(format!("{tag}: safety cost {} > {max}", m.safety_cost));
            }
        }
        if let Some(min) = gate.min_engagement_rate {
            if m.engagement_rate < min {
                failures.push(format!(
                    "{tag}: engagement rate {} < {min}",
                    m.engagement_rate
                ));
            }
        }
        if let Some(min) = gate.min_emotional_alignment {
            if m.emotional_alignment < min {
                failures.push(format!(
                    "{tag}: emotional alignment {} < {min}",
                    m.emotional_alignment
                ));
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(HarnessError::Gate(failures.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rrl_core::agents::CompositeWeights;
    use rrl_core::metrics::CostMode;

    fn summary(violation: f64, engagement: f64) -> CellSummary {
        CellSummary {
            agent: AgentKind::Rrl,
            cell: SweepCell {
                index: 0,
                weights: CompositeWeights::ENGAGEMENT_ONLY,
                threshold_d: 0.5,
            },
            metrics: MetricReport {
                engagement_rate: engagement,
                emotional_alignment: 0.5,
                safety_cost: 0.4,
                cost_mode: CostMode::Discounted,
                violation_probability: violation,
                n_episodes: 10,
                mean_return: 1.0,
                halfwidths: None,
            },
        }
    }

    #[test]
    fn gate_limits_are_inclusive() {
        let gate = GateConfig {
            max_violation_probability: Some(0.1),
            min_engagement_rate: Some(0.5),
            ..GateConfig::default()
        };
        assert!(check_gate(&gate, &[summary(0.1, 0.5)]).is_ok());
        let err = check_gate(&gate, &[summary(0.2, 0.4)]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("violation probability"));
        assert!(err.to_string().contains("engagement rate"));
        assert!(check_gate(&GateConfig::default(), &[summary(1.0, 0.0)]).is_ok());
    }

    #[test]
    fn tabular_rule_uses_valence_signs() {
        let spec = rrl_core::envs::toy_env_build(&Default::default()).unwrap();
        let env = EnvironmentConfig::Tabular {
            spec,
            horizon: 5,
            latent: None,
            valence: Some(vec![-1, 1]),
        };
        let rule = rule_based_for(&env);
        assert_eq!((rule.engage_action, rule.withdraw_action), (1, 0));
    }
}
