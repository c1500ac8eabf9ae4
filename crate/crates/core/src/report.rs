//! Certification reports and margin sweeps.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::certify::{PipelineReport, TestConfig, TestOutcome, TrialRecord, Verdict};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "test,dim,trial,margin,scale";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    pub zero_extension: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub tool_version: String,
    pub function: FunctionSpec,
    pub config: TestConfig,
    pub outcomes: Vec<TestOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineReport>,
    pub wall_time_ms: u64,
}

impl CertificationReport {
    pub fn new(
        function: FunctionSpec,
        config: TestConfig,
        outcomes: Vec<TestOutcome>,
        pipeline: Option<PipelineReport>,
        wall_time_ms: u64,
    ) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::Malformed("a report needs at least one outcome".into()));
        }
        Ok(Self {
            tool_version: crate::TOOL_VERSION.to_string(),
            function,
            config,
            outcomes,
            pipeline,
            wall_time_ms,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text)?;
        if r.outcomes.is_empty() {
            return Err(Error::Malformed("report has no outcomes".into()));
        }
        Ok(r)
    }

    /// FAIL dominates, then any non-PASS verdict.
    pub fn overall(&self) -> Verdict {
        let vs: Vec<Verdict> = self.outcomes.iter().map(|o| o.verdict).collect();
        if vs.contains(&Verdict::Fail) {
            Verdict::Fail
        } else if vs.iter().all(|v| *v == Verdict::Pass) {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        }
    }
}

pub fn sweep_csv(records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(32 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{},{},{},{},{}", r.test, r.dim, r.trial, r.margin, r.scale);
    }
    out
}
