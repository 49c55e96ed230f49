//! Exhaustive enumeration split across threads, plus the derived variances.

use dperf_core::estimate::{strict_reduction_condition, theoretical_variances, variance_difference, RegionMasses};
use dperf_core::exact::{configuration_count, enumerate_range, ExactResult, PartialMasses};
use dperf_core::{EdgeSetFamilies, ExactError, Network, RegionSpec};
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Enumerates all configurations in `workers` contiguous rank ranges and
/// merges the partial masses in range order.
pub fn parallel_exact(
    net: &Network,
    spec: &RegionSpec,
    families: Option<&EdgeSetFamilies>,
    workers: usize,
    cap: usize,
) -> Result<ExactResult> {
    if net.edge_count() > cap.min(40) {
        return Err(ExactError::TooManyEdges { edges: net.edge_count(), cap }.into());
    }
    let total = configuration_count(net);
    let chunks = (workers.max(1) as u64).min(total);
    let bounds: Vec<u64> = (0..=chunks).map(|k| total / chunks * k + (total % chunks).min(k)).collect();
    let parts: Vec<Result<PartialMasses, ExactError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = bounds
            .windows(2)
            .map(|w| {
                let range = w[0]..w[1];
                scope.spawn(move || enumerate_range(net, spec, families, range))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("enumeration worker panicked")).collect()
    });
    let mut parts = parts.into_iter();
    let mut acc = parts.next().expect("at least one chunk")?;
    for p in parts {
        acc.merge(&p?);
    }
    Ok(acc.finish(spec, families.is_some()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub expected_phi: f64,
    pub p: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<f64>>,
    /// Single-sample variance of the crude estimator.
    pub crude_variance: f64,
    /// Single-sample variance of the conditioned estimator.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditioned_variance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict_reduction: Option<bool>,
}

pub fn oracle_report(spec: &RegionSpec, exact: &ExactResult) -> Result<OracleReport> {
    let zeros = vec![0.0; spec.region_count()];
    let z = exact.z.as_deref().unwrap_or(&zeros);
    let masses = RegionMasses { p: &exact.p, z };
    let (crude, conditioned) = theoretical_variances(spec, masses)?;
    let with_z = exact.z.is_some();
    Ok(OracleReport {
        expected_phi: exact.expected_phi,
        p: exact.p.clone(),
        z: exact.z.clone(),
        crude_variance: crude,
        conditioned_variance: with_z.then_some(conditioned),
        variance_difference: if with_z { Some(variance_difference(spec, masses)?) } else { None },
        strict_reduction: with_z.then(|| strict_reduction_condition(spec, masses)),
    })
}
