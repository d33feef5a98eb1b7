//! Experiment harness: config ingestion, seeded run fan-out, baseline
//! comparisons, frontier sweeps and plot-data emission.

pub mod compare;
pub mod config;
pub mod fingerprint;
pub mod oracle_tables;
pub mod plot;
pub mod record;
pub mod run;
pub mod sweep;

use std::fmt::Display;

use thiserror::Error;

pub use compare::{compare_baselines, ComparisonRow};
pub use config::{ExperimentConfig, ResolvedConfig, SweepCell};
pub use record::RunRecord;
pub use run::{run_experiment, summarize_cells, CellSummary};
pub use sweep::{frontier_sweep, FrontierRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("run failed: {0}")]
    Runtime(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("gate failed: {0}")]
    Gate(String),
}

impl HarnessError {
    pub fn config(e: impl Display) -> Self {
        HarnessError::Config(e.to_string())
    }

    pub fn runtime(e: impl Display) -> Self {
        HarnessError::Runtime(e.to_string())
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Process exit status for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Runtime(_) | HarnessError::Io { .. } => 2,
            HarnessError::Gate(_) => 3,
        }
    }
}
