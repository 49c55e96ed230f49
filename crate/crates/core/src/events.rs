//! Probabilities of the pinned events `Z_i` and exact sampling of the
//! states of Ω conditioned on leaving `Z`.
//!
//! Two computation routes exist. The factorized route multiplies per-set
//! products and needs the sets of each region to be pairwise edge-disjoint.
//! The table route enumerates all `2^|Ω|` sub-configurations and tests each
//! event directly, so it accepts arbitrary overlap up to a size cap.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::edge_sets::{EdgeSet, EdgeSetFamilies};
use crate::error::EventError;
use crate::graph::{Configuration, Network};
use crate::region::RegionSpec;
use crate::sum::CompensatedSum;

/// Default largest |Ω| handled by the sub-configuration table.
pub const DEFAULT_TABLE_CAP: usize = 24;
/// Hard limit: table indices are stored in `u64` masks.
const MAX_TABLE_CAP: usize = 40;
/// Below this the conditioning event is treated as impossible.
const ZERO_CONDITIONAL: f64 = 1e-300;

/// Partial assignment of edge states.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixings {
    states: Vec<Option<bool>>,
}

impl Fixings {
    pub fn none(edge_count: usize) -> Self {
        Fixings { states: vec![None; edge_count] }
    }

    pub fn fix(&mut self, edge: usize, up: bool) -> &mut Self {
        self.states[edge] = Some(up);
        self
    }

    pub fn free(&mut self, edge: usize) -> &mut Self {
        self.states[edge] = None;
        self
    }

    pub fn get(&self, edge: usize) -> Option<bool> {
        self.states[edge]
    }

    /// Per-edge probability of being up under these fixings.
    fn up_probabilities(&self, net: &Network) -> Vec<f64> {
        self.states
            .iter()
            .zip(net.edges())
            .map(|(s, e)| match s {
                Some(true) => 1.0,
                Some(false) => 0.0,
                None => e.reliability,
            })
            .collect()
    }
}

/// `Pr(some set fully up)` for pairwise-disjoint sets.
fn some_operates<S: AsRef<[usize]>>(sets: &[S], up: &[f64]) -> f64 {
    // 1 - Π(1 - a_k), accumulated as acc + a(1 - acc) to keep small values exact
    sets.iter().fold(0.0, |acc, s| {
        let a: f64 = s.as_ref().iter().map(|&e| up[e]).product();
        acc + a * (1.0 - acc)
    })
}

/// `Pr(some set fully down)` for pairwise-disjoint sets.
fn some_fails<S: AsRef<[usize]>>(sets: &[S], up: &[f64]) -> f64 {
    sets.iter().fold(0.0, |acc, s| {
        let a: f64 = s.as_ref().iter().map(|&e| 1.0 - up[e]).product();
        acc + a * (1.0 - acc)
    })
}

/// Which of `T_i`, `K_i` make up `Z_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EventShape {
    PathsOnly,
    CutsOnly,
    Both,
}

/// `Pr(Z_i)` of pairwise-disjoint sets at the network's reliabilities.
pub(crate) fn disjoint_event_prob<S: AsRef<[usize]>>(net: &Network, shape: EventShape, paths: &[S], cuts: &[S]) -> f64 {
    let up: Vec<f64> = net.edges().iter().map(|e| e.reliability).collect();
    match shape {
        EventShape::PathsOnly => some_operates(paths, &up),
        EventShape::CutsOnly => some_fails(cuts, &up),
        EventShape::Both if paths.is_empty() || cuts.is_empty() => 0.0,
        EventShape::Both => some_operates(paths, &up) * some_fails(cuts, &up),
    }
}

pub(crate) fn shape(region: usize, last: usize) -> EventShape {
    if region == 0 {
        EventShape::PathsOnly
    } else if region == last {
        EventShape::CutsOnly
    } else {
        EventShape::Both
    }
}

fn region_prob_unchecked(families: &EdgeSetFamilies, region: usize, up: &[f64]) -> f64 {
    let fam = families.region(region);
    match shape(region, families.regions().len() - 1) {
        EventShape::PathsOnly => some_operates(&fam.pathsets, up),
        EventShape::CutsOnly => some_fails(&fam.cutsets, up),
        EventShape::Both => {
            if fam.pathsets.is_empty() || fam.cutsets.is_empty() {
                0.0
            } else {
                some_operates(&fam.pathsets, up) * some_fails(&fam.cutsets, up)
            }
        }
    }
}

fn check_disjoint(families: &EdgeSetFamilies, region: usize) -> Result<(), EventError> {
    if families.is_region_disjoint(region) {
        Ok(())
    } else {
        Err(EventError::FamilyNotDisjoint(region))
    }
}

/// `Pr(Z_i | fixings)` via the product formulas.
pub fn region_event_prob(
    net: &Network,
    families: &EdgeSetFamilies,
    region: usize,
    fixings: &Fixings,
) -> Result<f64, EventError> {
    check_disjoint(families, region)?;
    Ok(region_prob_unchecked(families, region, &fixings.up_probabilities(net)))
}

/// `z_i` per region, their sum `z`, and `φ = Σ Φ_i z_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventProbabilities {
    pub z_regions: Vec<f64>,
    pub z: f64,
    pub phi_offset: f64,
}

fn ascending_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    v.into_iter().collect::<CompensatedSum>().value()
}

impl EventProbabilities {
    pub fn from_regions(spec: &RegionSpec, z_regions: Vec<f64>) -> Self {
        let z = ascending_sum(z_regions.iter().copied());
        let phi_offset = ascending_sum(z_regions.iter().zip(spec.phi_values()).map(|(z, p)| z * p));
        EventProbabilities { z_regions, z, phi_offset }
    }
}

/// Unconditional `z_i`, `z` and `φ` from the factorized formulas.
pub fn total_z_and_phi(
    net: &Network,
    families: &EdgeSetFamilies,
    spec: &RegionSpec,
) -> Result<EventProbabilities, EventError> {
    let up = Fixings::none(net.edge_count()).up_probabilities(net);
    let mut z = Vec::with_capacity(spec.region_count());
    for region in 0..spec.region_count() {
        check_disjoint(families, region)?;
        z.push(region_prob_unchecked(families, region, &up));
    }
    Ok(EventProbabilities::from_regions(spec, z))
}

fn not_z(families: &EdgeSetFamilies, up: &[f64]) -> f64 {
    let z: f64 = (0..families.regions().len()).map(|i| region_prob_unchecked(families, i, up)).sum();
    1.0 - z
}

/// `Pr(edge up | X∖Z, fixings)`.
pub fn conditional_up_probability(
    net: &Network,
    families: &EdgeSetFamilies,
    fixings: &Fixings,
    edge: usize,
) -> Result<f64, EventError> {
    for region in 0..families.regions().len() {
        check_disjoint(families, region)?;
    }
    let mut up = fixings.up_probabilities(net);
    let denom = not_z(families, &up);
    if denom < ZERO_CONDITIONAL {
        return Err(EventError::ZeroConditional(denom));
    }
    let r = up[edge];
    up[edge] = 1.0;
    let num = not_z(families, &up);
    Ok((r * num / denom).clamp(0.0, 1.0))
}

/// Bit masks of every set over Ω positions, grouped per region.
#[derive(Debug, Clone)]
struct OmegaMasks {
    paths: Vec<Vec<u64>>,
    cuts: Vec<Vec<u64>>,
}

impl OmegaMasks {
    fn new(families: &EdgeSetFamilies) -> Self {
        let omega = families.omega();
        let mask = |s: &EdgeSet| -> u64 {
            s.edges().iter().map(|e| 1u64 << omega.binary_search(e).expect("set edge in omega")).fold(0, |a, b| a | b)
        };
        OmegaMasks {
            paths: families.regions().iter().map(|r| r.pathsets.iter().map(mask).collect()).collect(),
            cuts: families.regions().iter().map(|r| r.cutsets.iter().map(mask).collect()).collect(),
        }
    }

    /// Region whose `Z_i` holds for sub-configuration `s`, if any.
    fn pinned_region(&self, s: u64) -> Option<usize> {
        let last = self.paths.len() - 1;
        (0..self.paths.len()).find(|&i| {
            let t = || self.paths[i].iter().any(|&m| m & !s == 0);
            let k = || self.cuts[i].iter().any(|&m| s & m == 0);
            match shape(i, last) {
                EventShape::PathsOnly => t(),
                EventShape::CutsOnly => k(),
                EventShape::Both => t() && k(),
            }
        })
    }
}

/// Probability of every sub-configuration of `edges` (bit `k` = state of
/// `edges[k]`), built from two half tables so each entry is one product.
pub(crate) struct SubsetProbabilities {
    low: Vec<f64>,
    high: Vec<f64>,
    low_bits: usize,
}

impl SubsetProbabilities {
    pub(crate) fn new(net: &Network, edges: &[usize]) -> Self {
        let low_bits = edges.len() / 2;
        let half = |es: &[usize]| -> Vec<f64> {
            let mut t = vec![1.0f64; 1 << es.len()];
            for (k, &e) in es.iter().enumerate() {
                let r = net.reliability(e);
                let stride = 1usize << k;
                for (s, p) in t.iter_mut().enumerate() {
                    *p *= if s & stride != 0 { r } else { 1.0 - r };
                }
            }
            t
        };
        SubsetProbabilities { low: half(&edges[..low_bits]), high: half(&edges[low_bits..]), low_bits }
    }

    #[inline]
    pub(crate) fn get(&self, s: u64) -> f64 {
        let lo = (s & ((1u64 << self.low_bits) - 1)) as usize;
        let hi = (s >> self.low_bits) as usize;
        self.low[lo] * self.high[hi]
    }
}

/// Cumulative probabilities of all `2^|Ω|` sub-configurations restricted to
/// `X∖Z`; sub-configurations inside `Z` carry no mass.
#[derive(Debug, Clone)]
pub struct SubConfigTable {
    omega: Vec<usize>,
    cumulative: Vec<f64>,
    z_regions: Vec<f64>,
    kept: usize,
}

impl SubConfigTable {
    pub fn build(net: &Network, families: &EdgeSetFamilies, cap: usize) -> Result<Self, EventError> {
        let omega = families.omega().to_vec();
        let cap = cap.min(MAX_TABLE_CAP);
        if omega.len() > cap {
            return Err(EventError::OmegaTooLarge { size: omega.len(), cap });
        }
        let masks = OmegaMasks::new(families);
        let probs = SubsetProbabilities::new(net, &omega);
        let size = 1usize << omega.len();
        let mut cumulative = Vec::with_capacity(size);
        let mut retained = CompensatedSum::new();
        let mut pinned = vec![CompensatedSum::new(); families.regions().len()];
        let mut kept = 0;
        for s in 0..size as u64 {
            let p = probs.get(s);
            match masks.pinned_region(s) {
                Some(i) => pinned[i].add(p),
                None => {
                    retained.add(p);
                    kept += 1;
                }
            }
            cumulative.push(retained.value());
        }
        Ok(SubConfigTable { omega, cumulative, z_regions: pinned.iter().map(CompensatedSum::value).collect(), kept })
    }

    pub fn omega(&self) -> &[usize] {
        &self.omega
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    /// False when every sub-configuration falls in `Z`, so `X∖Z` is empty.
    pub fn retains_any(&self) -> bool {
        self.kept > 0
    }

    /// Retained mass, `1 - z`.
    pub fn total(&self) -> f64 {
        *self.cumulative.last().expect("table has at least one entry")
    }

    /// Per-region pinned mass found while building the table.
    pub fn z_regions(&self) -> &[f64] {
        &self.z_regions
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Unconditional mass of sub-configuration `s` kept in the table.
    pub fn mass(&self, s: usize) -> f64 {
        if s == 0 {
            self.cumulative[0]
        } else {
            self.cumulative[s] - self.cumulative[s - 1]
        }
    }

    /// Sub-configuration index of `x` (bit `k` = state of `omega[k]`).
    pub fn encode(&self, x: &Configuration) -> usize {
        encode_omega(&self.omega, x)
    }

    /// Cut-point draw of a sub-configuration index.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.random::<f64>() * self.total();
        let i = self.cumulative.partition_point(|&c| c <= u);
        if i < self.cumulative.len() {
            i
        } else {
            // u rounded up to the total; take the last entry with mass
            self.cumulative.partition_point(|&c| c < self.total())
        }
    }

    fn write<R: Rng + ?Sized>(&self, rng: &mut R, x: &mut Configuration) {
        let s = self.draw(rng);
        for (k, &e) in self.omega.iter().enumerate() {
            x.set(e, s >> k & 1 == 1);
        }
    }
}

/// Sub-configuration index of `x` over the given Ω ordering.
pub fn encode_omega(omega: &[usize], x: &Configuration) -> usize {
    omega.iter().enumerate().fold(0, |acc, (k, &e)| acc | (usize::from(x.contains(e)) << k))
}

/// Edge-by-edge sampling of Ω using the factorized conditionals.
#[derive(Debug, Clone)]
pub struct SequentialSampler {
    families: EdgeSetFamilies,
}

impl SequentialSampler {
    pub fn new(families: &EdgeSetFamilies) -> Result<Self, EventError> {
        for region in 0..families.regions().len() {
            check_disjoint(families, region)?;
        }
        Ok(SequentialSampler { families: families.clone() })
    }

    fn write<R: Rng + ?Sized>(&self, rng: &mut R, x: &mut Configuration, up: &mut [f64]) -> Result<(), EventError> {
        for &e in self.families.omega() {
            let r = up[e];
            up[e] = 1.0;
            let if_up = not_z(&self.families, up);
            up[e] = 0.0;
            let if_down = not_z(&self.families, up);
            let denom = r * if_up + (1.0 - r) * if_down;
            if denom < ZERO_CONDITIONAL {
                return Err(EventError::ZeroConditional(denom));
            }
            let is_up = rng.random::<f64>() * denom < r * if_up;
            up[e] = if is_up { 1.0 } else { 0.0 };
            x.set(e, is_up);
        }
        Ok(())
    }
}

/// How the states of Ω are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    Table,
    Sequential,
}

impl SamplingMode {
    pub fn name(self) -> &'static str {
        match self {
            SamplingMode::Table => "table",
            SamplingMode::Sequential => "sequential",
        }
    }

    /// Table when Ω fits under the cap, sequential otherwise.
    pub fn default_for(families: &EdgeSetFamilies, cap: usize) -> Self {
        if families.omega().len() <= cap {
            SamplingMode::Table
        } else {
            SamplingMode::Sequential
        }
    }
}

#[derive(Debug, Clone)]
enum OmegaSampler {
    Table(SubConfigTable),
    Sequential(SequentialSampler),
}

/// Draws configurations from the law of `X` conditioned on `X∖Z`.
#[derive(Debug, Clone)]
pub struct ConditionalSampler {
    outside: Vec<usize>,
    omega: OmegaSampler,
    reliabilities: Vec<f64>,
}

/// Per-worker scratch for [`ConditionalSampler::sample_into`].
#[derive(Debug, Clone, Default)]
pub struct SamplerScratch {
    up: Vec<f64>,
}

impl ConditionalSampler {
    pub fn new(
        net: &Network,
        families: &EdgeSetFamilies,
        mode: SamplingMode,
        table_cap: usize,
    ) -> Result<Self, EventError> {
        let omega = match mode {
            SamplingMode::Table => OmegaSampler::Table(SubConfigTable::build(net, families, table_cap)?),
            SamplingMode::Sequential => OmegaSampler::Sequential(SequentialSampler::new(families)?),
        };
        let in_omega = crate::graph::EdgeMask::from_edges(net.edge_count(), families.omega().iter().copied());
        Ok(ConditionalSampler {
            outside: (0..net.edge_count()).filter(|&e| !in_omega.contains(e)).collect(),
            omega,
            reliabilities: net.edges().iter().map(|e| e.reliability).collect(),
        })
    }

    pub fn mode(&self) -> SamplingMode {
        match self.omega {
            OmegaSampler::Table(_) => SamplingMode::Table,
            OmegaSampler::Sequential(_) => SamplingMode::Sequential,
        }
    }

    pub fn table(&self) -> Option<&SubConfigTable> {
        match &self.omega {
            OmegaSampler::Table(t) => Some(t),
            OmegaSampler::Sequential(_) => None,
        }
    }

    /// Overwrites every edge state of `x` with a fresh conditional draw.
    pub fn sample_into<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        x: &mut Configuration,
        scratch: &mut SamplerScratch,
    ) -> Result<(), EventError> {
        for &e in &self.outside {
            x.set(e, rng.random::<f64>() < self.reliabilities[e]);
        }
        match &self.omega {
            OmegaSampler::Table(t) => {
                t.write(rng, x);
                Ok(())
            }
            OmegaSampler::Sequential(s) => {
                scratch.up.clear();
                scratch.up.extend_from_slice(&self.reliabilities);
                s.write(rng, x, &mut scratch.up)
            }
        }
    }
}

/// True iff `x` satisfies some `Z_i`, evaluated directly from the sets.
pub fn pinned_region(families: &EdgeSetFamilies, x: &Configuration) -> Option<usize> {
    let last = families.regions().len() - 1;
    families.regions().iter().enumerate().position(|(i, fam)| {
        let t = || fam.pathsets.iter().any(|s| s.edges().iter().all(|&e| x.contains(e)));
        let k = || fam.cutsets.iter().any(|s| s.edges().iter().all(|&e| !x.contains(e)));
        match shape(i, last) {
            EventShape::PathsOnly => t(),
            EventShape::CutsOnly => k(),
            EventShape::Both => t() && k(),
        }
    })
}
