//! Quality regions: the partition of the hop-distance axis into intervals,
//! each carrying one Φ value.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::RegionError;
use crate::graph::{BfsScratch, Bound, Configuration, Distance, EdgeMask, Network};

/// Thresholds `d_0 < … < d_{r-1}` and values `Φ_0 … Φ_r`.
///
/// Region `i` holds distances in `(d_{i-1}, d_i]` (with `d_{-1} = 0`),
/// region `r` everything above `d_{r-1}` including disconnection. A last
/// threshold of [`Bound::Unbounded`] turns region `r` into "disconnected".
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSpec {
    thresholds: Vec<Bound>,
    phi: Vec<f64>,
}

impl RegionSpec {
    pub fn new(thresholds: Vec<Bound>, phi: Vec<f64>) -> Result<Self, RegionError> {
        if phi.len() != thresholds.len() + 1 {
            return Err(RegionError::PhiCount {
                thresholds: thresholds.len(),
                expected: thresholds.len() + 1,
                found: phi.len(),
            });
        }
        let mut prev = Bound::Hops(0);
        for (i, &t) in thresholds.iter().enumerate() {
            if t == Bound::Unbounded && i + 1 != thresholds.len() {
                return Err(RegionError::UnboundedNotLast);
            }
            if t <= prev {
                return Err(RegionError::Thresholds(t));
            }
            prev = t;
        }
        if let Some(&bad) = phi.iter().find(|v| !v.is_finite()) {
            return Err(RegionError::NonFinitePhi(bad));
        }
        Ok(RegionSpec { thresholds, phi })
    }

    /// Finite hop thresholds; `phi` has one value per region.
    pub fn from_hops(hops: &[u32], phi: Vec<f64>) -> Result<Self, RegionError> {
        Self::new(hops.iter().map(|&h| Bound::Hops(h)).collect(), phi)
    }

    /// Finite hop thresholds followed by a separate "disconnected" region:
    /// `phi` carries `hops.len() + 2` values.
    pub fn with_disconnected_region(hops: &[u32], phi: Vec<f64>) -> Result<Self, RegionError> {
        let mut thresholds: Vec<Bound> = hops.iter().map(|&h| Bound::Hops(h)).collect();
        thresholds.push(Bound::Unbounded);
        Self::new(thresholds, phi)
    }

    pub fn thresholds(&self) -> &[Bound] {
        &self.thresholds
    }

    pub fn phi_values(&self) -> &[f64] {
        &self.phi
    }

    pub fn phi(&self, region: usize) -> f64 {
        self.phi[region]
    }

    /// Number of regions, `r + 1`.
    pub fn region_count(&self) -> usize {
        self.phi.len()
    }

    /// Index `r` of the last region.
    pub fn last_region(&self) -> usize {
        self.thresholds.len()
    }

    /// Upper distance bound of region `i` (`None` for the last region).
    pub fn upper(&self, region: usize) -> Option<Bound> {
        self.thresholds.get(region).copied()
    }

    /// Bound that region `i`'s cutsets must break: `d_{i-1}` for interior
    /// regions, plain connectivity for the last one, nothing for region 0.
    pub fn cutset_bound(&self, region: usize) -> Option<Bound> {
        if region == 0 {
            None
        } else if region == self.last_region() {
            Some(Bound::Unbounded)
        } else {
            Some(self.thresholds[region - 1])
        }
    }

    /// Bound region `i`'s pathsets must meet; `None` for the last region
    /// unless it is also region 0 (a single-region spec takes plain pathsets).
    pub fn pathset_bound(&self, region: usize) -> Option<Bound> {
        match self.upper(region) {
            None if region == 0 => Some(Bound::Unbounded),
            b => b,
        }
    }

    /// Region index of a terminal distance.
    pub fn region_of(&self, delta: Distance) -> Result<usize, RegionError> {
        if delta == Distance::Finite(0) {
            return Err(RegionError::ZeroDistance);
        }
        Ok(self.region_of_unchecked(delta))
    }

    #[inline]
    pub(crate) fn region_of_unchecked(&self, delta: Distance) -> usize {
        self.thresholds.iter().position(|t| t.admits(delta)).unwrap_or(self.thresholds.len())
    }

    /// Φ of a configuration.
    pub fn phi_of(&self, net: &Network, x: &Configuration) -> f64 {
        self.phi[self.region_of_unchecked(net.max_terminal_distance(x))]
    }

    /// Region of a configuration, reusing BFS buffers.
    #[inline]
    pub fn classify(&self, net: &Network, x: &Configuration, scratch: &mut BfsScratch) -> usize {
        self.region_of_unchecked(scratch.max_terminal_distance(net, x))
    }
}

/// Draws each edge state independently: up with probability `r_e`.
pub fn sample_configuration<R: Rng + ?Sized>(net: &Network, rng: &mut R) -> Configuration {
    let mut x = EdgeMask::empty(net.edge_count());
    sample_into(net, rng, &mut x);
    x
}

/// In-place variant of [`sample_configuration`].
#[inline]
pub fn sample_into<R: Rng + ?Sized>(net: &Network, rng: &mut R, x: &mut Configuration) {
    for (id, e) in net.edges().iter().enumerate() {
        x.set(id, rng.random::<f64>() < e.reliability);
    }
}
