use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{write_atomic, InputDigest};
use crate::engine::{CompletionReport, RelationshipConfig};
use crate::error::Result;
use crate::io::tables::format_strength;
use crate::metrics::{MetricParams, MetricsDiff, Pct};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo {
            name: "kcgraph".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSection {
    /// Section key, also the stem of its CSV table (`diff_<name>.csv`).
    pub name: String,
    pub before: MetricParams,
    pub after: MetricParams,
    pub diff: MetricsDiff,
}

/// Wall-clock milliseconds per phase. Omitted from reports unless asked
/// for, since they would break byte-identical reruns.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub phases_ms: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub inputs: Vec<InputDigest>,
    pub configs: Vec<RelationshipConfig>,
    pub completions: Vec<CompletionReport>,
    pub metrics: Vec<MetricsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl RunReport {
    pub fn new(inputs: Vec<InputDigest>, configs: Vec<RelationshipConfig>) -> Self {
        RunReport {
            schema_version: REPORT_SCHEMA_VERSION,
            tool: ToolInfo::default(),
            inputs,
            configs,
            completions: Vec::new(),
            metrics: Vec::new(),
            timings: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    CsvTables,
}

/// One row per node: `node,before,after,delta,pct`, with `new` for a zero
/// baseline.
pub fn diff_csv(diff: &MetricsDiff) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fixed = "in-memory csv write with fixed-width rows";
    w.write_record(["node", "before", "after", "delta", "pct"]).expect(fixed);
    for r in &diff.records {
        let pct = match r.pct {
            Pct::New => "new".to_owned(),
            Pct::Finite(p) => format_strength(p),
        };
        w.write_record([
            r.node.as_str(),
            &format_strength(r.before),
            &format_strength(r.after),
            &format_strength(r.delta),
            &pct,
        ])
        .expect(fixed);
    }
    w.into_inner().expect(fixed)
}

/// Writes `report` as a JSON file at `path`, or as one `diff_<name>.csv`
/// per metrics section inside the directory `path`. Returns the files
/// written.
pub fn write_report(report: &RunReport, path: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    match format {
        ReportFormat::Json => {
            write_atomic(path, report.to_json().as_bytes())?;
            Ok(vec![path.to_path_buf()])
        }
        ReportFormat::CsvTables => {
            std::fs::create_dir_all(path).map_err(|e| crate::Error::io(path, e))?;
            let mut written = Vec::new();
            for section in &report.metrics {
                let file = path.join(format!("diff_{}.csv", section.name));
                write_atomic(&file, &diff_csv(&section.diff))?;
                written.push(file);
            }
            Ok(written)
        }
    }
}
