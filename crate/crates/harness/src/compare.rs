use rrl_core::agents::AgentKind;
use rrl_core::metrics::CostMode;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::record::RunRecord;
use crate::run::{run_experiment, summarize_cells, CellSummary};
use crate::HarnessError;

/// Flat per-agent, per-cell row of the comparison table. Halfwidth columns
/// are empty with fewer than two seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub agent: String,
    pub cell: usize,
    pub w_eng: f64,
    pub w_emo: f64,
    pub w_safety: f64,
    pub threshold_d: f64,
    pub n_episodes: usize,
    pub engagement_rate: f64,
    pub engagement_rate_hw: Option<f64>,
    pub emotional_alignment: f64,
    pub emotional_alignment_hw: Option<f64>,
    pub safety_cost: f64,
    pub safety_cost_hw: Option<f64>,
    pub cost_mode: CostMode,
    pub violation_probability: f64,
    pub violation_probability_hw: Option<f64>,
    pub mean_return: f64,
    pub mean_return_hw: Option<f64>,
}

impl From<&CellSummary> for ComparisonRow {
    fn from(s: &CellSummary) -> Self {
        let m = &s.metrics;
        let hw = m.halfwidths;
        ComparisonRow {
            agent: s.agent.label().to_owned(),
            cell: s.cell.index,
            w_eng: s.cell.weights.w_eng,
            w_emo: s.cell.weights.w_emo,
            w_safety: s.cell.weights.w_safety,
            threshold_d: s.cell.threshold_d,
            n_episodes: m.n_episodes,
            engagement_rate: m.engagement_rate,
            engagement_rate_hw: hw.map(|h| h.engagement_rate),
            emotional_alignment: m.emotional_alignment,
            emotional_alignment_hw: hw.map(|h| h.emotional_alignment),
            safety_cost: m.safety_cost,
            safety_cost_hw: hw.map(|h| h.safety_cost),
            cost_mode: m.cost_mode,
            violation_probability: m.violation_probability,
            violation_probability_hw: hw.map(|h| h.violation_probability),
            mean_return: m.mean_return,
            mean_return_hw: hw.map(|h| h.mean_return),
        }
    }
}

/// Runs the rule-based, engagement-only, penalty-shaped and constrained
/// agents on the same seeds, environment and cells.
pub fn compare_baselines(
    config: &ExperimentConfig,
    workers: usize,
) -> Result<(Vec<RunRecord>, Vec<CellSummary>), HarnessError> {
    let mut records = Vec::new();
    for agent in AgentKind::ALL {
        let per_agent = ExperimentConfig {
            agent,
            ..config.clone()
        };
        records.extend(run_experiment(&per_agent, workers)?);
    }
    let summaries = summarize_cells(config, &records)?;
    Ok((records, summaries))
}
