//! Plot-ready CSV files.
//!
//! * `curves/<agent>_cell<c>_seed<s>.csv`: `iteration,mean_return,mean_cost,lambda`
//!   with one row per training iteration.
//! * `points.csv`: one row per run with its evaluation metrics.
//! * `frontier.csv` / `oracle_frontier.csv`: [`FrontierRow`] schema.

use std::path::Path;

use serde::Serialize;

use crate::record::RunRecord;
use crate::sweep::FrontierRow;
use crate::HarnessError;

#[derive(Debug, Serialize)]
struct CurveRow {
    iteration: usize,
    mean_return: f64,
    mean_cost: f64,
    lambda: f64,
}

#[derive(Debug, Serialize)]
struct PointRow<'a> {
    agent: &'a str,
    cell: usize,
    seed: u64,
    engagement: f64,
    engagement_rate: f64,
    alignment: f64,
    safety_cost: f64,
    violation_probability: f64,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| HarnessError::Runtime(format!("{}: {e}", path.display())))?;
    for row in rows {
        w.serialize(row).map_err(HarnessError::runtime)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn curve_file_name(record: &RunRecord) -> String {
    format!(
        "{}_cell{}_seed{}.csv",
        record.agent.label(),
        record.cell,
        record.seed
    )
}

/// Writes learning curves for every trained run and the per-run metric points.
pub fn emit_plot_data(records: &[RunRecord], dir: &Path) -> Result<(), HarnessError> {
    let curves = dir.join("curves");
    std::fs::create_dir_all(&curves).map_err(|e| HarnessError::io(&curves, e))?;
    for record in records {
        let Some(train) = &record.train else {
            continue;
        };
        let rows: Vec<CurveRow> = (0..train.iterations())
            .map(|i| CurveRow {
                iteration: i + 1,
                mean_return: train.mean_return[i],
                mean_cost: train.mean_cost[i],
                lambda: train.lambda[i],
            })
            .collect();
        write_csv(&curves.join(curve_file_name(record)), &rows)?;
    }
    let points: Vec<PointRow> = records
        .iter()
        .map(|r| PointRow {
            agent: r.agent.label(),
            cell: r.cell,
            seed: r.seed,
            engagement: r.metrics.mean_return,
            engagement_rate: r.metrics.engagement_rate,
            alignment: r.metrics.emotional_alignment,
            safety_cost: r.metrics.safety_cost,
            violation_probability: r.metrics.violation_probability,
        })
        .collect();
    write_csv(&dir.join("points.csv"), &points)
}

pub fn write_frontier(path: &Path, rows: &[FrontierRow]) -> Result<(), HarnessError> {
    write_csv(path, rows)
}
