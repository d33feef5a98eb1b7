use serde::{Deserialize, Serialize};

use crate::cmdp::{discounted_return, Trajectory};
use crate::rng::{derive_seed, streams};
use crate::rollout::{rollout, Environment, Policy};

use super::{
    emotional_alignment, engagement_rate, episode_cost, safety_cost, violation_probability,
    CostMode, MetricsError,
};

/// 95% normal-approximation halfwidths, one per metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricHalfwidths {
    pub engagement_rate: f64,
    pub emotional_alignment: f64,
    pub safety_cost: f64,
    pub violation_probability: f64,
    pub mean_return: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub engagement_rate: f64,
    pub emotional_alignment: f64,
    pub safety_cost: f64,
    pub cost_mode: CostMode,
    pub violation_probability: f64,
    pub n_episodes: usize,
    /// Mean discounted environment reward per episode.
    pub mean_return: f64,
    /// Across episodes for a single evaluation, across runs after
    /// [`aggregate`]. Absent with fewer than two samples.
    pub halfwidths: Option<MetricHalfwidths>,
}

/// Mean and `1.96 * s / sqrt(n)` with the sample standard deviation.
fn mean_halfwidth(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some(1.96 * (var / n).sqrt()))
}

struct Columns {
    engagement_rate: Vec<f64>,
    emotional_alignment: Vec<f64>,
    safety_cost: Vec<f64>,
    violation_probability: Vec<f64>,
    mean_return: Vec<f64>,
}

impl Columns {
    fn summarize(&self) -> (MetricHalfwidths, Option<MetricHalfwidths>) {
        let cols = [
            &self.engagement_rate,
            &self.emotional_alignment,
            &self.safety_cost,
            &self.violation_probability,
            &self.mean_return,
        ];
        let stats: Vec<(f64, Option<f64>)> = cols.iter().map(|c| mean_halfwidth(c)).collect();
        let pack = |f: &dyn Fn(&(f64, Option<f64>)) -> f64| MetricHalfwidths {
            engagement_rate: f(&stats[0]),
            emotional_alignment: f(&stats[1]),
            safety_cost: f(&stats[2]),
            violation_probability: f(&stats[3]),
            mean_return: f(&stats[4]),
        };
        let means = pack(&|s| s.0);
        let halfwidths = stats[0].1.map(|_| pack(&|s| s.1.unwrap_or(0.0)));
        (means, halfwidths)
    }
}

/// Combines per-run reports into means with across-run halfwidths.
pub fn aggregate(reports: &[MetricReport]) -> Result<MetricReport, MetricsError> {
    let first = reports.first().ok_or(MetricsError::EmptyCollection)?;
    if reports.iter().any(|r| r.cost_mode != first.cost_mode) {
        return Err(MetricsError::MixedCostModes);
    }
    let col = |f: fn(&MetricReport) -> f64| reports.iter().map(f).collect::<Vec<f64>>();
    let columns = Columns {
        engagement_rate: col(|r| r.engagement_rate),
        emotional_alignment: col(|r| r.emotional_alignment),
        safety_cost: col(|r| r.safety_cost),
        violation_probability: col(|r| r.violation_probability),
        mean_return: col(|r| r.mean_return),
    };
    let (m, halfwidths) = columns.summarize();
    Ok(MetricReport {
        engagement_rate: m.engagement_rate,
        emotional_alignment: m.emotional_alignment,
        safety_cost: m.safety_cost,
        cost_mode: first.cost_mode,
        violation_probability: m.violation_probability,
        n_episodes: reports.iter().map(|r| r.n_episodes).sum(),
        mean_return: m.mean_return,
        halfwidths,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalSettings {
    pub episodes: usize,
    pub cost_mode: CostMode,
    pub threshold_d: f64,
}

/// Seed of evaluation episode `k` of a run; disjoint from training seeds.
pub fn evaluation_episode_seed(run_seed: u64, k: u64) -> u64 {
    derive_seed(derive_seed(run_seed, streams::EVAL), k)
}

/// Runs fresh evaluation episodes under `policy` and scores them.
///
/// Episode `k` uses the same seed for every policy evaluated with the same run
/// seed, which pairs the environment noise across agents.
pub fn evaluate_policy<E, P>(
    env: &mut E,
    policy: &mut P,
    settings: &EvalSettings,
    run_seed: u64,
) -> Result<(MetricReport, Vec<Trajectory>), MetricsError>
where
    E: Environment + ?Sized,
    P: Policy + ?Sized,
{
    if settings.episodes == 0 {
        return Err(MetricsError::EmptyCollection);
    }
    let horizon = env.horizon();
    let discount = env.discount();
    let engage = env.engage_actions();
    let valences = env.action_valences();
    let mut trajectories = Vec::with_capacity(settings.episodes);
    for k in 0..settings.episodes as u64 {
        trajectories.push(rollout(
            env,
            policy,
            horizon,
            evaluation_episode_seed(run_seed, k),
        )?);
    }
    let mut columns = Columns {
        engagement_rate: Vec::new(),
        emotional_alignment: Vec::new(),
        safety_cost: Vec::new(),
        violation_probability: Vec::new(),
        mean_return: Vec::new(),
    };
    for t in &trajectories {
        columns.engagement_rate.push(engagement_rate(t, &engage)?);
        columns
            .emotional_alignment
            .push(emotional_alignment(t, &valences)?);
        columns
            .safety_cost
            .push(episode_cost(t, discount, settings.cost_mode));
        let single = std::slice::from_ref(t);
        columns
            .violation_probability
            .push(violation_probability(single, discount, settings.threshold_d)?);
        columns.mean_return.push(discounted_return(t, discount));
    }
    let (m, halfwidths) = columns.summarize();
    let report = MetricReport {
        engagement_rate: m.engagement_rate,
        emotional_alignment: m.emotional_alignment,
        safety_cost: safety_cost(&trajectories, discount, settings.cost_mode)?,
        cost_mode: settings.cost_mode,
        violation_probability: violation_probability(
            &trajectories,
            discount,
            settings.threshold_d,
        )?,
        n_episodes: trajectories.len(),
        mean_return: m.mean_return,
        halfwidths,
    };
    Ok((report, trajectories))
}
