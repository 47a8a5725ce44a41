//! The versioned JSON report and the 2D coordinates file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tendeval_core::alignment::SimilarityKind;
use tendeval_core::traditional::TraditionalMetrics;
use tendeval_core::{BaeResult, CompResult, ConsistencyMatrix, DicResult, MaskedMatrix, SimilarityMatrix};

/// Bumped on any incompatible change to [`EvalReport`] or [`CoordsFile`].
pub const SCHEMA_VERSION: u32 = 1;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub tool_version: String,
    /// Subcommand that produced the report.
    pub command: String,
    /// Effective settings: thresholds, flags, seeds and input paths.
    pub config: BTreeMap<String, Value>,
    /// Keyed `true` (annotation kappa), `pred` (prediction kappa),
    /// `feature` and `region` (model cosine).
    pub matrices: BTreeMap<String, ReportMatrix>,
    pub scores: Scores,
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn new(command: &str) -> Self {
        EvalReport {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_owned(),
            command: command.to_owned(),
            config: BTreeMap::new(),
            matrices: BTreeMap::new(),
            scores: Scores::default(),
            warnings: Vec::new(),
        }
    }

    pub fn echo(&mut self, key: &str, value: impl Into<Value>) {
        self.config.insert(key.to_owned(), value.into());
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMatrix {
    pub kind: SimilarityKind,
    pub annotators: Vec<String>,
    /// Minimum overlap for kappa matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<usize>,
    /// Shared-sample counts for kappa matrices; the diagonal holds each
    /// annotator's label count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlaps: Option<Vec<Vec<usize>>>,
    pub matrix: MaskedMatrix,
}

impl From<&ConsistencyMatrix> for ReportMatrix {
    fn from(m: &ConsistencyMatrix) -> Self {
        ReportMatrix {
            kind: SimilarityKind::GroundTruthKappa,
            annotators: m.annotators.clone(),
            tau: Some(m.tau),
            overlaps: Some(m.overlaps.clone()),
            matrix: m.matrix.clone(),
        }
    }
}

impl From<&SimilarityMatrix> for ReportMatrix {
    fn from(s: &SimilarityMatrix) -> Self {
        ReportMatrix {
            kind: s.kind,
            annotators: s.annotators.clone(),
            tau: None,
            overlaps: None,
            matrix: s.matrix.clone(),
        }
    }
}

impl From<&ReportMatrix> for SimilarityMatrix {
    fn from(m: &ReportMatrix) -> Self {
        SimilarityMatrix { kind: m.kind, annotators: m.annotators.clone(), matrix: m.matrix.clone() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dic: Option<DicResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bae_feature: Option<BaeResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bae_region: Option<BaeResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traditional: Option<TraditionalMetrics>,
    /// Off-diagonal mean of the feature cosine matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cos: Option<f64>,
    /// Mean per-record Pearson correlation of importance vectors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comp: Option<CompResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordsFile {
    pub schema_version: u32,
    pub tool_version: String,
    /// Report matrix the embedding was computed from.
    pub which: String,
    pub stress: f64,
    pub eigenvalues: [f64; 2],
    pub cluster_threshold: f64,
    /// Report matrix the clusters were computed from.
    pub cluster_source: String,
    pub points: Vec<CoordPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub procrustes: Option<ProcrustesInfo>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordPoint {
    pub annotator: String,
    pub x: f64,
    pub y: f64,
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcrustesInfo {
    pub reference: String,
    pub disparity: f64,
    pub scale: f64,
    pub reflected: bool,
}
