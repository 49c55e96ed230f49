//! Versioned run reports in JSON and plain text.

use std::fmt::Write as _;

use dperf_core::graph::Bound;
use dperf_core::heuristics::HeuristicSolution;
use dperf_core::{Network, RegionSpec};
use serde::{Deserialize, Serialize};

use crate::estimators::{relative_efficiency, variance_ratio, EstimateReport};
use crate::oracle::OracleReport;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub nodes: usize,
    pub edges: usize,
    pub terminals: Vec<usize>,
}

impl From<&Network> for NetworkSummary {
    fn from(net: &Network) -> Self {
        NetworkSummary { nodes: net.node_count(), edges: net.edge_count(), terminals: net.terminals().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    /// `null` marks the disconnection threshold.
    pub thresholds: Vec<Option<u32>>,
    pub phi: Vec<f64>,
}

impl From<&RegionSpec> for RegionSummary {
    fn from(spec: &RegionSpec) -> Self {
        RegionSummary {
            thresholds: spec
                .thresholds()
                .iter()
                .map(|b| match b {
                    Bound::Hops(h) => Some(*h),
                    Bound::Unbounded => None,
                })
                .collect(),
            phi: spec.phi_values().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicSummary {
    pub region: usize,
    pub version: String,
    pub probability: f64,
    pub pathsets: Vec<Vec<usize>>,
    pub cutsets: Vec<Vec<usize>>,
    pub iterations: u64,
    /// Partial solutions reached with 1, 2, … sets.
    pub component_counts: Vec<u64>,
}

impl HeuristicSummary {
    pub fn new(solution: &HeuristicSolution, version: String) -> Self {
        HeuristicSummary {
            region: solution.region,
            version,
            probability: solution.probability,
            pathsets: solution.pathsets.clone(),
            cutsets: solution.cutsets.clone(),
            iterations: solution.iterations,
            component_counts: solution.components.iter().skip(1).copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub network: NetworkSummary,
    pub regions: RegionSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crude: Option<EstimateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditioned: Option<EstimateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_efficiency: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<OracleReport>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub heuristic: Vec<HeuristicSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(net: &Network, spec: &RegionSpec) -> Self {
        RunReport {
            format_version: FORMAT_VERSION,
            network: net.into(),
            regions: spec.into(),
            crude: None,
            conditioned: None,
            variance_ratio: None,
            relative_efficiency: None,
            exact: None,
            heuristic: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Fills the comparison fields when both estimates are present.
    pub fn compare(&mut self) {
        if let (Some(c), Some(k)) = (&self.crude, &self.conditioned) {
            self.variance_ratio = Some(variance_ratio(c, k));
            self.relative_efficiency = Some(relative_efficiency(c, k));
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let n = &self.network;
        let _ = writeln!(out, "network: {} nodes, {} edges, terminals {:?}", n.nodes, n.edges, n.terminals);
        let th: Vec<String> =
            self.regions.thresholds.iter().map(|t| t.map_or("disconnected".to_string(), |h| h.to_string())).collect();
        let _ = writeln!(out, "thresholds: [{}]  phi: {:?}", th.join(", "), self.regions.phi);
        for r in self.crude.iter().chain(&self.conditioned) {
            write_estimate(&mut out, r);
        }
        if let Some(v) = self.variance_ratio {
            let _ = writeln!(out, "variance ratio: {v:.4}");
        }
        if let Some(v) = self.relative_efficiency {
            let _ = writeln!(out, "relative efficiency: {v:.4}");
        }
        if let Some(e) = &self.exact {
            write_oracle(&mut out, e);
        }
        for h in &self.heuristic {
            let _ = writeln!(
                out,
                "heuristic region {} ({}): Pr = {:e} after {} iterations, {} pathsets, {} cutsets",
                h.region,
                h.version,
                h.probability,
                h.iterations,
                h.pathsets.len(),
                h.cutsets.len()
            );
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

fn write_estimate(out: &mut String, r: &EstimateReport) {
    let mode = r.mode.as_deref().map(|m| format!(" ({m})")).unwrap_or_default();
    let _ = writeln!(out, "{}{mode}:", r.method);
    let _ = writeln!(out, "  estimate: {:.6}", r.point_estimate);
    let _ = writeln!(out, "  variance: {:e}  (standard error {:e})", r.variance_of_estimator, r.standard_error);
    let _ = writeln!(out, "  samples: {}  per region: {:?}", r.sample_size, r.per_region_counts);
    if let (Some(zr), Some(z), Some(phi)) = (&r.z_regions, r.z, r.phi_offset) {
        let _ = writeln!(out, "  z_i: {zr:?}  z: {z:e}  phi: {phi:e}");
    }
    if let Some(o) = r.omega_size {
        let _ = writeln!(out, "  |Omega|: {o}");
    }
    let _ = writeln!(out, "  time: setup {:.3}s, sampling {:.3}s", r.setup_seconds, r.sampling_seconds);
}

pub fn write_oracle(out: &mut String, e: &OracleReport) {
    let _ = writeln!(out, "exact:");
    let _ = writeln!(out, "  E[phi]: {:.12}", e.expected_phi);
    let _ = writeln!(out, "  p: {:?}", e.p);
    if let Some(z) = &e.z {
        let _ = writeln!(out, "  z: {z:?}");
    }
    let _ = writeln!(out, "  crude single-sample variance: {:e}", e.crude_variance);
    if let Some(v) = e.conditioned_variance {
        let _ = writeln!(out, "  conditioned single-sample variance: {v:e}");
    }
    if let Some(d) = e.variance_difference {
        let _ = writeln!(out, "  variance difference: {d:e}");
    }
    if let Some(s) = e.strict_reduction {
        let _ = writeln!(out, "  strict reduction: {s}");
    }
}
