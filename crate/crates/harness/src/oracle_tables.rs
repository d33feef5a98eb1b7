//! Exact oracle tables for tabular environment configs.

use rrl_core::oracle::{
    constrained_optimum_over, enumerate_policies, pareto_front_of, ConstrainedSolution, Mixing,
    OracleError, PolicyValuePoint,
};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::sweep::{assign_pareto_index, FrontierRow};
use crate::HarnessError;

#[derive(Debug, Clone, Serialize)]
pub struct PolicyRow {
    pub index: usize,
    pub actions: String,
    pub value_reward: f64,
    pub value_cost: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstrainedRow {
    pub threshold_d: f64,
    pub feasible: bool,
    pub optimal_value: Option<f64>,
    pub optimal_cost: Option<f64>,
    pub lambda_star: Option<f64>,
    pub primary: Option<String>,
    pub secondary: Option<String>,
    pub weight: Option<f64>,
}

pub struct OracleTables {
    pub policies: Vec<PolicyRow>,
    pub frontier: Vec<FrontierRow>,
    pub constrained: Vec<ConstrainedRow>,
}

fn actions_label(p: &PolicyValuePoint) -> String {
    p.actions
        .iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn constrained_row(d: f64, sol: Result<ConstrainedSolution, OracleError>) -> ConstrainedRow {
    match sol {
        Err(_) => ConstrainedRow {
            threshold_d: d,
            feasible: false,
            optimal_value: None,
            optimal_cost: None,
            lambda_star: None,
            primary: None,
            secondary: None,
            weight: None,
        },
        Ok(s) => {
            let (primary, secondary, weight) = match &s.mixing {
                Mixing::Deterministic { policy } => (actions_label(policy), None, 1.0),
                Mixing::Mixture {
                    primary,
                    secondary,
                    weight,
                } => (
                    actions_label(primary),
                    Some(actions_label(secondary)),
                    *weight,
                ),
            };
            ConstrainedRow {
                threshold_d: d,
                feasible: true,
                optimal_value: Some(s.optimal_value),
                optimal_cost: Some(s.optimal_cost),
                lambda_star: Some(s.lambda_star),
                primary: Some(primary),
                secondary,
                weight: Some(weight),
            }
        }
    }
}

/// Policy table, exact reward-cost front and constrained optima at the
/// configured threshold plus any swept thresholds.
pub fn oracle_tables(config: &ExperimentConfig) -> Result<OracleTables, HarnessError> {
    let spec = config.environment.cmdp().ok_or_else(|| {
        HarnessError::Config(format!(
            "no exact oracle for the {} environment",
            config.environment.name()
        ))
    })??;
    let points = enumerate_policies(&spec).map_err(HarnessError::runtime)?;
    let policies = points
        .iter()
        .enumerate()
        .map(|(index, p)| PolicyRow {
            index,
            actions: actions_label(p),
            value_reward: p.value_reward,
            value_cost: p.value_cost,
        })
        .collect();
    let mut frontier: Vec<FrontierRow> = pareto_front_of(&points)
        .iter()
        .map(|p| FrontierRow {
            source: "oracle".into(),
            label: format!("policy={}", actions_label(p)),
            threshold_d: None,
            engagement: p.value_reward,
            engagement_hw: None,
            alignment: None,
            alignment_hw: None,
            safety_cost: p.value_cost,
            safety_cost_hw: None,
            pareto_index: 0.0,
        })
        .collect();
    assign_pareto_index(&mut frontier)?;

    let mut thresholds = vec![config.learner.threshold_d];
    if let Some(ts) = config.sweep.as_ref().and_then(|s| s.thresholds.as_ref()) {
        thresholds = ts.clone();
    }
    let constrained = thresholds
        .iter()
        .map(|&d| constrained_row(d, constrained_optimum_over(&points, d)))
        .collect();
    Ok(OracleTables {
        policies,
        frontier,
        constrained,
    })
}
