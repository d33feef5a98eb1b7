use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rrl_core::agents::{AgentKind, TrainReport};
use rrl_core::metrics::MetricReport;
use serde::{Deserialize, Serialize};

use crate::config::ResolvedConfig;
use crate::fingerprint::fingerprint;
use crate::HarnessError;

pub const RECORD_FORMAT_VERSION: u32 = 1;

/// One seeded run. Serialized as a single JSON line; `wall_clock_ms` is the
/// last field and the only one that varies between identical reruns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub format_version: u32,
    pub fingerprint: String,
    pub seed: u64,
    pub cell: usize,
    pub agent: AgentKind,
    pub config: ResolvedConfig,
    /// Absent for the rule-based agent, which does not train.
    pub train: Option<TrainReport>,
    pub metrics: MetricReport,
    pub wall_clock_ms: u64,
}

impl RunRecord {
    pub fn verify_fingerprint(&self) -> Result<bool, HarnessError> {
        Ok(fingerprint(&self.config)? == self.fingerprint)
    }

    pub fn to_json_line(&self) -> Result<String, HarnessError> {
        serde_json::to_string(self).map_err(HarnessError::runtime)
    }

    /// The JSON line without its wall-clock field, for reproducibility checks.
    pub fn deterministic_line(&self) -> Result<String, HarnessError> {
        let mut clone = self.clone();
        clone.wall_clock_ms = 0;
        let line = clone.to_json_line()?;
        let cut = line
            .rfind(",\"wall_clock_ms\":")
            .ok_or_else(|| HarnessError::Runtime("record missing wall clock".into()))?;
        Ok(format!("{}}}", &line[..cut]))
    }
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<(), HarnessError> {
    let mut file = std::io::BufWriter::new(
        std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?,
    );
    for r in records {
        writeln!(file, "{}", r.to_json_line()?).map_err(|e| HarnessError::io(path, e))?;
    }
    file.flush().map_err(|e| HarnessError::io(path, e))
}

/// Loads records and rejects any whose fingerprint does not match its config.
pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RunRecord = serde_json::from_str(&line)
            .map_err(|e| HarnessError::Runtime(format!("line {}: {e}", i + 1)))?;
        if !record.verify_fingerprint()? {
            return Err(HarnessError::Runtime(format!(
                "line {}: fingerprint mismatch",
                i + 1
            )));
        }
        out.push(record);
    }
    Ok(out)
}
