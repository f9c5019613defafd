//! Machine-readable results (`wsbn-report/1`, `wsbn-explore/1`).

use serde::{Deserialize, Serialize};
use wsbn::wqo::SaturationStats;

use crate::witness::WitnessFile;

pub const REPORT_FORMAT: &str = "wsbn-report/1";
pub const EXPLORE_FORMAT: &str = "wsbn-explore/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    Coverable,
    NotCoverable,
    ResourceExhausted,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::Coverable => "coverable",
            VerdictKind::NotCoverable => "not coverable",
            VerdictKind::ResourceExhausted => "resource exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationReport {
    pub iterations: usize,
    pub basis_size: usize,
    pub max_basis_size: usize,
    pub generated: usize,
    pub audited: bool,
    pub audit_violations: usize,
}

impl From<&SaturationStats> for SaturationReport {
    fn from(s: &SaturationStats) -> Self {
        SaturationReport {
            iterations: s.iterations,
            basis_size: s.basis_size,
            max_basis_size: s.max_basis_size,
            generated: s.generated,
            audited: s.audited,
            audit_violations: s.audit_violations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnlockReport {
    pub letter: String,
    pub sweep: usize,
    /// The broadcast-enabling configuration found coverable.
    pub enabler: String,
}

/// Sweep record of a reconfigurable query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceReport {
    pub sweeps: usize,
    /// Inner queries, excluding the final target query.
    pub queries: usize,
    /// Total size of the broadcast-enabling bases.
    pub enabling_configs: usize,
    pub unlocked: Vec<UnlockReport>,
    pub audit_violations: usize,
}

/// Topologies examined by a diameter/degree query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyReport {
    pub graphs: usize,
    pub runs: usize,
    /// Whether the vertex bound reaches the Moore bound, making the answer
    /// hold for the whole class.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryReport {
    /// Line of the query in the model file.
    pub line: usize,
    pub target: String,
    pub semantics: String,
    pub verdict: VerdictKind,
    pub elapsed_us: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhausted: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturation: Option<SaturationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topologies: Option<TopologyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub format: String,
    pub queries: Vec<QueryReport>,
}

impl Report {
    pub fn new(queries: Vec<QueryReport>) -> Self {
        Report {
            format: REPORT_FORMAT.to_owned(),
            queries,
        }
    }

    /// 0 when every query completed, 2 when some ran out of resources.
    pub fn exit_code(&self) -> i32 {
        if self.queries.iter().any(|q| q.verdict == VerdictKind::ResourceExhausted) {
            2
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExploreQueryReport {
    pub line: usize,
    pub target: String,
    pub semantics: String,
    /// Node count of the run found, if any.
    pub found_nodes: Option<usize>,
    pub explored: usize,
    /// Whether the magnitude cap discarded some successor.
    pub capped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhausted: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExploreReport {
    pub format: String,
    pub nodes: usize,
    pub depth: usize,
    pub queries: Vec<ExploreQueryReport>,
}

impl ExploreReport {
    pub fn exit_code(&self) -> i32 {
        if self.queries.iter().any(|q| q.exhausted.is_some()) {
            2
        } else {
            0
        }
    }
}

/// Any file `replay` accepts, told apart by its `format` field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunFile {
    Witness(WitnessFile),
    Report(Report),
    Explore(ExploreReport),
}

#[derive(Debug, thiserror::Error)]
pub enum RunFileError {
    #[error("not JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing `format` field")]
    NoFormat,
    #[error("unsupported format `{0}`")]
    Format(String),
}

impl RunFile {
    pub fn parse(text: &str) -> Result<RunFile, RunFileError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let format = value
            .get("format")
            .and_then(|f| f.as_str())
            .ok_or(RunFileError::NoFormat)?
            .to_owned();
        Ok(match format.as_str() {
            crate::witness::WITNESS_FORMAT => RunFile::Witness(serde_json::from_value(value)?),
            REPORT_FORMAT => RunFile::Report(serde_json::from_value(value)?),
            EXPLORE_FORMAT => RunFile::Explore(serde_json::from_value(value)?),
            _ => return Err(RunFileError::Format(format)),
        })
    }

    /// Every witness in the file.
    pub fn witnesses(&self) -> Vec<&WitnessFile> {
        match self {
            RunFile::Witness(w) => vec![w],
            RunFile::Report(r) => r.queries.iter().filter_map(|q| q.witness.as_ref()).collect(),
            RunFile::Explore(r) => r.queries.iter().filter_map(|q| q.witness.as_ref()).collect(),
        }
    }
}
