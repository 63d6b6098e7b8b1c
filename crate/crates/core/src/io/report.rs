//! Machine-readable command results.

use serde::{Deserialize, Serialize};

use crate::analysis::{Classification, DataConsistency, FitReport, Tolerances};
use crate::axioms::{AxiomMatrix, SampleBudget, Verdict};
use crate::solver::PathTrace;

/// Everything a command produced, plus what it was run with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub provenance: Provenance,
    pub result: ReportBody,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<SampleBudget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
}

impl Provenance {
    pub fn new() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub endowment: f64,
    pub prizes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableBlock {
    pub n: usize,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportBody {
    Allocation {
        endowment: f64,
        prizes: Vec<(String, f64)>,
    },
    Table {
        blocks: Vec<TableBlock>,
    },
    Path {
        n: usize,
        samples: Vec<Row>,
    },
    Check {
        verdict: Verdict,
    },
    Matrix {
        matrix: AxiomMatrix,
    },
    Fit {
        reports: Vec<FitReport>,
        prefix_checks: Vec<DataConsistency>,
    },
    Classify {
        events: Vec<String>,
        classification: Box<Classification>,
    },
}

impl From<&PathTrace> for Vec<Row> {
    fn from(trace: &PathTrace) -> Self {
        trace
            .samples
            .iter()
            .map(|(e, a)| Row {
                endowment: *e,
                prizes: a.by_position(),
            })
            .collect()
    }
}

/// Decimal rendering with at most six places and no trailing zeros.
pub fn format_number(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.6}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        &s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}
