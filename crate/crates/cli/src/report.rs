//! The JSON solve report.

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VehicleReport {
    /// 1-based vehicle number, ordered by cluster index
    pub vehicle: usize,
    pub cluster: Vec<u32>,
    pub tour: Vec<u32>,
    pub distance: f64,
    /// file name of this vehicle's convergence trace CSV
    pub trace: String,
}

/// Wall-clock data; grouped under one key so determinism checks can strip
/// it alongside the timestamp.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunInfo {
    pub timestamp: String,
    pub clustering_ms: f64,
    pub solve_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema_version: u32,
    pub instance_digest: String,
    pub k: usize,
    pub algorithm: String,
    pub params: serde_json::Value,
    pub master_seed: u64,
    pub vehicles: Vec<VehicleReport>,
    pub total_distance: f64,
    pub run_info: RunInfo,
}

impl SolveReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("bad report JSON: {e}")))
    }

    /// The report with the wall-clock section removed, for byte comparison
    /// between runs.
    pub fn comparable_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        value.as_object_mut().expect("report is an object").remove("run_info");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }
}
