use rrl_core::metrics::{default_reference, pareto_index};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::record::RunRecord;
use crate::run::{run_experiment, summarize_cells, CellSummary};
use crate::HarnessError;

/// One row of a frontier file. Learner sweeps and oracle tables share this
/// schema so they can be overlaid directly; columns an oracle cannot fill are
/// left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub source: String,
    pub label: String,
    pub threshold_d: Option<f64>,
    /// Discounted engagement return.
    pub engagement: f64,
    pub engagement_hw: Option<f64>,
    pub alignment: Option<f64>,
    pub alignment_hw: Option<f64>,
    pub safety_cost: f64,
    pub safety_cost_hw: Option<f64>,
    pub pareto_index: f64,
}

/// Fills `pareto_index` on `rows` using (engagement, alignment, -safety),
/// with missing alignment treated as a constant.
pub fn assign_pareto_index(rows: &mut [FrontierRow]) -> Result<(), HarnessError> {
    if rows.is_empty() {
        return Ok(());
    }
    let points: Vec<[f64; 3]> = rows
        .iter()
        .map(|r| [r.engagement, r.alignment.unwrap_or(0.0), -r.safety_cost])
        .collect();
    let index = pareto_index(&points, default_reference(&points)).map_err(HarnessError::runtime)?;
    for (row, v) in rows.iter_mut().zip(index) {
        row.pareto_index = v;
    }
    Ok(())
}

pub fn frontier_rows(summaries: &[CellSummary]) -> Result<Vec<FrontierRow>, HarnessError> {
    let mut rows: Vec<FrontierRow> = summaries
        .iter()
        .map(|s| {
            let w = s.cell.weights;
            let m = &s.metrics;
            let hw = m.halfwidths;
            FrontierRow {
                source: s.agent.label().to_owned(),
                label: format!(
                    "cell={} w=({},{},{}) d={}",
                    s.cell.index, w.w_eng, w.w_emo, w.w_safety, s.cell.threshold_d
                ),
                threshold_d: Some(s.cell.threshold_d),
                engagement: m.mean_return,
                engagement_hw: hw.map(|h| h.mean_return),
                alignment: Some(m.emotional_alignment),
                alignment_hw: hw.map(|h| h.emotional_alignment),
                safety_cost: m.safety_cost,
                safety_cost_hw: hw.map(|h| h.safety_cost),
                pareto_index: 0.0,
            }
        })
        .collect();
    assign_pareto_index(&mut rows)?;
    Ok(rows)
}

/// Runs the sweep grid and scores each cell against the swept set.
pub fn frontier_sweep(
    config: &ExperimentConfig,
    workers: usize,
) -> Result<(Vec<RunRecord>, Vec<FrontierRow>), HarnessError> {
    if config.sweep.is_none() {
        return Err(HarnessError::Config(
            "the sweep verb needs a [sweep] section".into(),
        ));
    }
    let records = run_experiment(config, workers)?;
    let summaries = summarize_cells(config, &records)?;
    let rows = frontier_rows(&summaries)?;
    Ok((records, rows))
}
