use serde::{Deserialize, Serialize};

use lagshadow_core::critical::{CriticalSet, EulerCheck};
use lagshadow_core::skeleton::{BsReport, FaceReport, SkeletonGraph};
use lagshadow_core::{ChartPoint, DivisorClass, HomologyResult, ShadowVerdict};

use crate::scene::Scene;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroEntry {
    pub label: usize,
    pub location: ChartPoint,
    pub multiplicity: usize,
}

/// Graph shape of the skeleton, with the full polylines for plotting.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SkeletonSummary {
    pub vertices: usize,
    pub edges: usize,
    pub bott_cycles: usize,
    pub euler: i64,
    pub components: usize,
    pub graph: SkeletonGraph,
}

impl SkeletonSummary {
    pub fn new(graph: &SkeletonGraph) -> Self {
        Self {
            vertices: graph.vertices.len(),
            edges: graph.edges.len(),
            bott_cycles: graph.bott_cycles.len(),
            euler: graph.euler(),
            components: graph.num_components(),
            graph: graph.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

/// Wall-clock milliseconds per stage. Excluded when comparing reports for
/// reproducibility; everything else is byte-stable under a fixed seed.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Timings {
    pub critical_ms: f64,
    pub flow_ms: f64,
    pub faces_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub scene: Scene,
    pub divisor_class: DivisorClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeros: Option<Vec<ZeroEntry>>,
    pub critical_set: CriticalSet,
    pub euler_check: EulerCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skeleton: Option<SkeletonSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub faces: Option<FaceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bohr_sommerfeld: Option<BsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub homology_numeric: Option<HomologyResult>,
    pub homology_oracle: HomologyResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<ShadowVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<StageError>,
    pub timings: Timings,
}
