//! Exhaustive enumeration over all edge-state combinations: exact region
//! probabilities, `E[Φ]` and pinned masses for small instances.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::edge_sets::EdgeSetFamilies;
use crate::error::ExactError;
use crate::events::{pinned_region, SubsetProbabilities};
use crate::graph::{BfsScratch, EdgeMask, Network};
use crate::region::RegionSpec;
use crate::sum::CompensatedSum;

/// Default largest edge count for full enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 22;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub expected_phi: f64,
    pub p: Vec<f64>,
    pub z: Option<Vec<f64>>,
}

/// Partial sums from one slice of the enumeration; merge slices in order.
#[derive(Debug, Clone)]
pub struct PartialMasses {
    p: Vec<CompensatedSum>,
    z: Vec<CompensatedSum>,
}

impl PartialMasses {
    fn new(regions: usize) -> Self {
        PartialMasses { p: vec![CompensatedSum::new(); regions], z: vec![CompensatedSum::new(); regions] }
    }

    pub fn merge(&mut self, other: &PartialMasses) {
        for (a, b) in self.p.iter_mut().zip(&other.p).chain(self.z.iter_mut().zip(&other.z)) {
            a.add(b.value());
        }
    }

    pub fn finish(&self, spec: &RegionSpec, with_z: bool) -> ExactResult {
        let p: Vec<f64> = self.p.iter().map(CompensatedSum::value).collect();
        let expected_phi = p.iter().zip(spec.phi_values()).map(|(p, f)| p * f).collect::<CompensatedSum>().value();
        ExactResult { expected_phi, p, z: with_z.then(|| self.z.iter().map(CompensatedSum::value).collect()) }
    }
}

fn check_cap(net: &Network, cap: usize) -> Result<(), ExactError> {
    // indices are u64; stay well below that regardless of the requested cap
    if net.edge_count() > cap.min(40) {
        return Err(ExactError::TooManyEdges { edges: net.edge_count(), cap });
    }
    Ok(())
}

/// Number of configurations, `2^m`.
pub fn configuration_count(net: &Network) -> u64 {
    1u64 << net.edge_count()
}

/// Enumerates configurations whose Gray-code rank lies in `ranks`.
///
/// With `families`, also accumulates `z_i` and verifies that every
/// configuration satisfying `Z_i` actually lies in region `i`.
pub fn enumerate_range(
    net: &Network,
    spec: &RegionSpec,
    families: Option<&EdgeSetFamilies>,
    ranks: Range<u64>,
) -> Result<PartialMasses, ExactError> {
    let m = net.edge_count();
    let edges: Vec<usize> = (0..m).collect();
    let probs = SubsetProbabilities::new(net, &edges);
    let mut out = PartialMasses::new(spec.region_count());
    if ranks.is_empty() {
        return Ok(out);
    }
    let gray = |k: u64| k ^ (k >> 1);
    let mut code = gray(ranks.start);
    let mut x = EdgeMask::from_edges(m, (0..m).filter(|&e| code >> e & 1 == 1));
    let mut bfs = BfsScratch::new(net);
    let mut k = ranks.start;
    loop {
        let pi = probs.get(code);
        let region = spec.classify(net, &x, &mut bfs);
        out.p[region].add(pi);
        if let Some(fam) = families {
            if let Some(pinned) = pinned_region(fam, &x) {
                if pinned != region {
                    return Err(ExactError::Unsound { config: code, region: pinned, actual: region });
                }
                out.z[pinned].add(pi);
            }
        }
        k += 1;
        if k >= ranks.end {
            break;
        }
        let bit = k.trailing_zeros() as usize;
        code ^= 1 << bit;
        x.toggle(bit);
    }
    Ok(out)
}

/// Exact `p_i` and `E[Φ]` over all `2^m` configurations.
pub fn enumerate_exact(net: &Network, spec: &RegionSpec, cap: usize) -> Result<ExactResult, ExactError> {
    check_cap(net, cap)?;
    Ok(enumerate_range(net, spec, None, 0..configuration_count(net))?.finish(spec, false))
}

/// As [`enumerate_exact`], also returning `z_i` and checking soundness of
/// the families.
pub fn enumerate_exact_with_families(
    net: &Network,
    spec: &RegionSpec,
    families: &EdgeSetFamilies,
    cap: usize,
) -> Result<ExactResult, ExactError> {
    check_cap(net, cap)?;
    Ok(enumerate_range(net, spec, Some(families), 0..configuration_count(net))?.finish(spec, true))
}

/// `z_i` by enumerating the `2^|Ω|` sub-configurations and testing every
/// `T_i` and `K_i` directly. Works for overlapping families.
pub fn enumerate_z(
    net: &Network,
    families: &EdgeSetFamilies,
    spec: &RegionSpec,
    cap: usize,
) -> Result<Vec<f64>, ExactError> {
    let omega = families.omega();
    if omega.len() > cap.min(40) {
        return Err(ExactError::OmegaTooLarge { size: omega.len(), cap });
    }
    let probs = SubsetProbabilities::new(net, omega);
    let mut z = vec![CompensatedSum::new(); spec.region_count()];
    let mut x = EdgeMask::empty(net.edge_count());
    for s in 0..1u64 << omega.len() {
        for (k, &e) in omega.iter().enumerate() {
            x.set(e, s >> k & 1 == 1);
        }
        if let Some(i) = pinned_region(families, &x) {
            z[i].add(probs.get(s));
        }
    }
    Ok(z.iter().map(CompensatedSum::value).collect())
}
