//! Evaluation metrics over trajectories and run collections.

pub mod pareto;
pub mod report;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cmdp::{discounted_cost, Trajectory};
use crate::rollout::EnvError;

pub use pareto::{default_reference, exclusive_contributions, hypervolume, pareto_index};
pub use report::{aggregate, evaluate_policy, EvalSettings, MetricHalfwidths, MetricReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("empty collection")]
    EmptyCollection,
    #[error("step {step} carries no latent affect signal")]
    MissingSignals { step: usize },
    #[error("action {action} has no entry in the action table of length {len}")]
    UnknownAction { action: usize, len: usize },
    #[error("reference point {reference:?} is not weakly dominated by point {index} {point:?}")]
    InvalidReference {
        reference: [f64; 3],
        index: usize,
        point: [f64; 3],
    },
    #[error("non-finite objective value in point {index}")]
    NonFinitePoint { index: usize },
    #[error("cannot aggregate reports with different cost modes")]
    MixedCostModes,
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Whether safety cost sums are discounted like the constraint or plain sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMode {
    #[default]
    Discounted,
    Undiscounted,
}

fn lookup<T: Copy>(table: &[T], action: usize) -> Result<T, MetricsError> {
    table.get(action).copied().ok_or(MetricsError::UnknownAction {
        action,
        len: table.len(),
    })
}

/// Fraction of steps whose action is marked engaging in `engage`.
pub fn engagement_rate(traj: &Trajectory, engage: &[bool]) -> Result<f64, MetricsError> {
    if traj.is_empty() {
        return Err(MetricsError::EmptyTrajectory);
    }
    let mut hits = 0usize;
    for t in &traj.transitions {
        if lookup(engage, t.action)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / traj.len() as f64)
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Fraction of steps where the sign of the latent affect times the sign of the
/// action's valence is strictly positive.
pub fn emotional_alignment(traj: &Trajectory, valences: &[i8]) -> Result<f64, MetricsError> {
    if traj.is_empty() {
        return Err(MetricsError::EmptyTrajectory);
    }
    let mut hits = 0usize;
    for (step, t) in traj.transitions.iter().enumerate() {
        let e = t
            .signals
            .as_ref()
            .ok_or(MetricsError::MissingSignals { step })?
            .latent_e;
        if sign(e) * lookup(valences, t.action)?.signum() > 0 {
            hits += 1;
        }
    }
    Ok(hits as f64 / traj.len() as f64)
}

pub fn episode_cost(traj: &Trajectory, discount: f64, mode: CostMode) -> f64 {
    match mode {
        CostMode::Discounted => discounted_cost(traj, discount),
        CostMode::Undiscounted => traj.transitions.iter().map(|t| t.cost).sum(),
    }
}

/// Mean per-episode cost sum.
pub fn safety_cost(
    trajectories: &[Trajectory],
    discount: f64,
    mode: CostMode,
) -> Result<f64, MetricsError> {
    if trajectories.is_empty() {
        return Err(MetricsError::EmptyCollection);
    }
    let total: f64 = trajectories
        .iter()
        .map(|t| episode_cost(t, discount, mode))
        .sum();
    Ok(total / trajectories.len() as f64)
}

/// Fraction of episodes whose discounted cost exceeds `threshold_d`.
pub fn violation_probability(
    trajectories: &[Trajectory],
    discount: f64,
    threshold_d: f64,
) -> Result<f64, MetricsError> {
    if trajectories.is_empty() {
        return Err(MetricsError::EmptyCollection);
    }
    let violating = trajectories
        .iter()
        .filter(|t| discounted_cost(t, discount) > threshold_d)
        .count();
    Ok(violating as f64 / trajectories.len() as f64)
}
