//! Pathsets, cutsets and their bounded variants, grouped per region.

use alloc::vec::Vec;

use crate::error::{FamilyError, SetKind, SetRef};
use crate::graph::{Bound, EdgeMask, Network};
use crate::region::RegionSpec;

/// True iff the terminals are `d`-connected using only the edges of `set`.
pub fn validate_pathset(net: &Network, set: &[usize], d: Bound) -> bool {
    net.is_d_connected(&EdgeMask::from_edges(net.edge_count(), set.iter().copied()), d)
}

/// True iff removing `set` leaves the terminals not `d`-connected.
pub fn validate_cutset(net: &Network, set: &[usize], d: Bound) -> bool {
    let mut rest = net.all_edges();
    for &e in set {
        rest.remove(e);
    }
    !net.is_d_connected(&rest, d)
}

/// A validated pathset or cutset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSet {
    edges: Vec<usize>,
    kind: SetKind,
    bound: Bound,
}

impl EdgeSet {
    /// Edge ids, sorted and deduplicated.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn bound(&self) -> Bound {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    fn intersects(&self, other: &EdgeSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.edges.len() && j < other.edges.len() {
            match self.edges[i].cmp(&other.edges[j]) {
                core::cmp::Ordering::Less => i += 1,
                core::cmp::Ordering::Greater => j += 1,
                core::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

impl AsRef<[usize]> for EdgeSet {
    fn as_ref(&self) -> &[usize] {
        &self.edges
    }
}

/// Unvalidated sets for one region.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawRegionSets {
    pub pathsets: Vec<Vec<usize>>,
    pub cutsets: Vec<Vec<usize>>,
}

/// Validated sets for one region.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegionFamily {
    pub pathsets: Vec<EdgeSet>,
    pub cutsets: Vec<EdgeSet>,
}

impl RegionFamily {
    pub fn is_empty(&self) -> bool {
        self.pathsets.is_empty() && self.cutsets.is_empty()
    }

    fn members(&self) -> impl Iterator<Item = (SetKind, usize, &EdgeSet)> {
        self.pathsets
            .iter()
            .enumerate()
            .map(|(i, s)| (SetKind::Pathset, i, s))
            .chain(self.cutsets.iter().enumerate().map(|(i, s)| (SetKind::Cutset, i, s)))
    }
}

/// Whether same-region overlap is an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapPolicy {
    /// Needed by the factorized probability formulas.
    Reject,
    /// Tolerated; only table-based computations apply afterwards.
    Allow,
}

/// Per-region pathset and cutset families plus Ω, the union of their edges.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSetFamilies {
    regions: Vec<RegionFamily>,
    omega: Vec<usize>,
    overlaps: Vec<(SetRef, SetRef)>,
}

impl EdgeSetFamilies {
    /// No conditioning sets at all; the conditioned estimator degrades to crude.
    pub fn empty(spec: &RegionSpec) -> Self {
        EdgeSetFamilies {
            regions: (0..spec.region_count()).map(|_| RegionFamily::default()).collect(),
            omega: Vec::new(),
            overlaps: Vec::new(),
        }
    }

    pub fn regions(&self) -> &[RegionFamily] {
        &self.regions
    }

    pub fn region(&self, i: usize) -> &RegionFamily {
        &self.regions[i]
    }

    /// Ω in ascending edge-id order.
    pub fn omega(&self) -> &[usize] {
        &self.omega
    }

    pub fn is_empty(&self) -> bool {
        self.regions.iter().all(RegionFamily::is_empty)
    }

    /// Same-region overlapping pairs (only possible under [`OverlapPolicy::Allow`]).
    pub fn overlaps(&self) -> &[(SetRef, SetRef)] {
        &self.overlaps
    }

    pub fn is_region_disjoint(&self, region: usize) -> bool {
        self.overlaps.iter().all(|(a, _)| a.region != region)
    }

    pub fn is_disjoint_within_regions(&self) -> bool {
        self.overlaps.is_empty()
    }

    /// Raw edge lists, for serialization.
    pub fn to_raw(&self) -> Vec<RawRegionSets> {
        self.regions
            .iter()
            .map(|r| RawRegionSets {
                pathsets: r.pathsets.iter().map(|s| s.edges.clone()).collect(),
                cutsets: r.cutsets.iter().map(|s| s.edges.clone()).collect(),
            })
            .collect()
    }
}

/// Validates every set against its region's bound, checks same-region
/// disjointness and computes Ω.
///
/// Region `i < r` pathsets must be `d_i`-pathsets; region `i > 0` cutsets
/// must be `d_{i-1}`-cutsets, plain cutsets in the last region. Region 0 has
/// no cutsets and the last region no pathsets.
pub fn build_families(
    net: &Network,
    spec: &RegionSpec,
    raw: &[RawRegionSets],
    policy: OverlapPolicy,
) -> Result<EdgeSetFamilies, FamilyError> {
    if raw.len() != spec.region_count() {
        return Err(FamilyError::RegionCount { expected: spec.region_count(), found: raw.len() });
    }
    let m = net.edge_count();
    let mut in_omega = EdgeMask::empty(m);
    let mut regions = Vec::with_capacity(raw.len());
    let mut overlaps = Vec::new();

    for (region, sets) in raw.iter().enumerate() {
        let mut family = RegionFamily::default();
        for (kind, lists, bound) in [
            (SetKind::Pathset, &sets.pathsets, spec.pathset_bound(region)),
            (SetKind::Cutset, &sets.cutsets, spec.cutset_bound(region)),
        ] {
            for (index, list) in lists.iter().enumerate() {
                let at = SetRef { region, kind, index };
                let Some(bound) = bound else {
                    return Err(FamilyError::Misplaced(at));
                };
                if list.is_empty() {
                    return Err(FamilyError::EmptySet(at));
                }
                if let Some(&edge) = list.iter().find(|&&e| e >= m) {
                    return Err(FamilyError::EdgeOutOfRange { at, edge, edge_count: m });
                }
                let mut edges = list.clone();
                edges.sort_unstable();
                edges.dedup();
                let ok = match kind {
                    SetKind::Pathset => validate_pathset(net, &edges, bound),
                    SetKind::Cutset => validate_cutset(net, &edges, bound),
                };
                if !ok {
                    return Err(match kind {
                        SetKind::Pathset => FamilyError::InvalidPathset { at, bound },
                        SetKind::Cutset => FamilyError::InvalidCutset { at, bound },
                    });
                }
                for &e in &edges {
                    in_omega.insert(e);
                }
                let set = EdgeSet { edges, kind, bound };
                match kind {
                    SetKind::Pathset => family.pathsets.push(set),
                    SetKind::Cutset => family.cutsets.push(set),
                }
            }
        }

        let members: Vec<_> = family.members().collect();
        for (i, &(ka, ia, a)) in members.iter().enumerate() {
            for &(kb, ib, b) in &members[i + 1..] {
                if a.intersects(b) {
                    let first = SetRef { region, kind: ka, index: ia };
                    let second = SetRef { region, kind: kb, index: ib };
                    match policy {
                        OverlapPolicy::Reject => return Err(FamilyError::OverlapWithinRegion { first, second }),
                        OverlapPolicy::Allow => overlaps.push((first, second)),
                    }
                }
            }
        }
        regions.push(family);
    }

    Ok(EdgeSetFamilies { regions, omega: in_omega.iter().collect(), overlaps })
}
