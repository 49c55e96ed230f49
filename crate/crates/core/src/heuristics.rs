//! Greedy randomized construction of disjoint pathsets and cutsets for one
//! region of a two-terminal problem.
//!
//! [`generate_path`] grows a simple `s`–`t` path whose length falls in a
//! window, drifting away from the shortest route while there is slack.
//! [`generate_cutset`] removes edges in shaken order of distance to `s`
//! until `t` is out of reach, then prunes the result to a minimal cutset.
//! [`run_region_heuristic`] chains both according to a version string such
//! as `PCCP` and keeps the combination with the highest `Pr(Z_i)`.

use alloc::collections::VecDeque;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::edge_sets::RawRegionSets;
use crate::error::HeuristicError;
use crate::events::{disjoint_event_prob, shape, EventShape};
use crate::graph::{Bound, EdgeMask, Network};
use crate::region::RegionSpec;

const UNSEEN: u32 = u32::MAX;

/// BFS from `from` over `alive` edges, never entering nodes flagged in
/// `blocked` except `allow`. Writes hop counts into `dist`.
fn bfs_avoiding(
    net: &Network,
    alive: &EdgeMask,
    from: usize,
    blocked: Option<&[bool]>,
    allow: usize,
    dist: &mut [u32],
    queue: &mut VecDeque<usize>,
) {
    dist.fill(UNSEEN);
    queue.clear();
    dist[from] = 0;
    queue.push_back(from);
    while let Some(u) = queue.pop_front() {
        if u == allow && u != from {
            continue;
        }
        for &(v, e) in net.incident(u) {
            if dist[v] != UNSEEN || !alive.contains(e) {
                continue;
            }
            if v != allow && blocked.is_some_and(|b| b[v]) {
                continue;
            }
            dist[v] = dist[u] + 1;
            queue.push_back(v);
        }
    }
}

fn st_distance(
    net: &Network,
    alive: &EdgeMask,
    s: usize,
    t: usize,
    dist: &mut [u32],
    queue: &mut VecDeque<usize>,
) -> u32 {
    bfs_avoiding(net, alive, s, None, usize::MAX, dist, queue);
    dist[t]
}

fn admits(bound: Bound, hops: u32) -> bool {
    hops != UNSEEN && bound.admits(crate::graph::Distance::Finite(hops))
}

/// Random simple `s`–`t` path with length in `[min_len, max_len]` that uses
/// no edge of `forbidden`, or `None`.
pub fn generate_path<R: Rng + ?Sized>(
    net: &Network,
    s: usize,
    t: usize,
    min_len: u32,
    max_len: u32,
    forbidden: &EdgeMask,
    rng: &mut R,
) -> Option<Vec<usize>> {
    debug_assert!(s != t && 1 <= min_len && min_len <= max_len);
    let n = net.node_count();
    let mut alive = forbidden.complement();
    let mut on_path = vec![false; n];
    let mut dist = vec![UNSEEN; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut path = Vec::new();
    let mut curr = s;
    let mut len = 0u32;
    on_path[s] = true;

    while curr != t {
        // shortest remaining route, measured from t so curr's neighbours get distances too
        bfs_avoiding(net, &alive, t, Some(&on_path), curr, &mut dist, &mut queue);
        let d = dist[curr];
        if d == UNSEEN || len + d > max_len {
            return None;
        }
        // one candidate edge per usable neighbour
        let mut moves: Vec<(usize, usize)> = Vec::new();
        for &(v, e) in net.incident(curr) {
            if alive.contains(e) && !on_path[v] && moves.iter().all(|&(w, _)| w != v) {
                moves.push((v, e));
            }
        }
        let (sp_next, sp_edge) =
            *moves.iter().find(|&&(v, _)| dist[v] == d - 1).expect("BFS distance implies a next hop");
        let others: Vec<(usize, usize)> = moves.into_iter().filter(|&(v, _)| v != sp_next).collect();
        let follow = others.is_empty() || {
            let p =
                if max_len == min_len { 1.0 } else { ((len + d) as f64 - min_len as f64) / (max_len - min_len) as f64 };
            rng.random::<f64>() < p.clamp(0.0, 1.0)
        };
        let (next, edge) = if follow { (sp_next, sp_edge) } else { others[rng.random_range(0..others.len())] };
        alive.remove(edge);
        path.push(edge);
        on_path[next] = true;
        curr = next;
        len += 1;
    }
    (len >= min_len).then_some(path)
}

/// Swaps value pairs in one pass over all index pairs in random order;
/// pair `(u, v)` swaps with probability `1 / (1 + |d_u - d_v|)`.
pub fn shake_distances<R: Rng + ?Sized>(d: &mut [u32], rng: &mut R) {
    let n = d.len();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(rng);
    for (u, v) in pairs {
        let gap = d[u].abs_diff(d[v]) as f64;
        if rng.random::<f64>() < 1.0 / (1.0 + gap) {
            d.swap(u, v);
        }
    }
}

/// Minimal cutset breaking every `s`–`t` path within `bound`, disjoint from
/// `held`, or `None` when paths within `bound` exist inside `held` alone or
/// when `s` and `t` are already beyond `bound`.
pub fn generate_cutset<R: Rng + ?Sized>(
    net: &Network,
    s: usize,
    t: usize,
    bound: Bound,
    held: &EdgeMask,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let n = net.node_count();
    let mut dist = vec![UNSEEN; n];
    let mut queue = VecDeque::with_capacity(n);

    let free = held.complement();
    bfs_avoiding(net, &free, s, None, usize::MAX, &mut dist, &mut queue);
    let mut shaken = dist.clone();
    shake_distances(&mut shaken, rng);
    let mut order: Vec<usize> = free.iter().collect();
    order.shuffle(rng);
    order.sort_by_key(|&e| {
        let edge = net.edge(e);
        shaken[edge.a].min(shaken[edge.b])
    });

    let mut alive = net.all_edges();
    let mut cut = Vec::new();
    let mut pending = order.into_iter();
    while admits(bound, st_distance(net, &alive, s, t, &mut dist, &mut queue)) {
        let e = pending.next()?;
        alive.remove(e);
        cut.push(e);
    }

    let mut minimal = Vec::with_capacity(cut.len());
    for e in cut {
        alive.insert(e);
        if admits(bound, st_distance(net, &alive, s, t, &mut dist, &mut queue)) {
            alive.remove(e);
            minimal.push(e);
        }
    }
    // an empty cut means the bound is already broken without removing anything
    (!minimal.is_empty()).then_some(minimal)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Path,
    Cut,
}

/// Order in which one iteration adds pathsets (`P`) and cutsets (`C`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Version(Vec<Component>);

impl Version {
    pub fn components(&self) -> &[Component] {
        &self.0
    }

    pub fn paths(&self) -> usize {
        self.0.iter().filter(|&&c| c == Component::Path).count()
    }

    pub fn cuts(&self) -> usize {
        self.0.len() - self.paths()
    }
}

impl FromStr for Version {
    type Err = HeuristicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = |reason| HeuristicError::InvalidVersion { version: s.to_string(), reason };
        if s.is_empty() {
            return Err(invalid("empty"));
        }
        s.chars()
            .map(|c| match c.to_ascii_uppercase() {
                'P' => Ok(Component::Path),
                'C' => Ok(Component::Cut),
                _ => Err(invalid("letters must be P or C")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Version)
    }
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            f.write_str(match c {
                Component::Path => "P",
                Component::Cut => "C",
            })?;
        }
        Ok(())
    }
}

/// Stop condition for [`run_region_heuristic`], polled before each iteration.
pub trait Budget {
    fn exhausted(&mut self) -> bool;
}

/// Runs a fixed number of iterations.
#[derive(Debug, Clone, Copy)]
pub struct Iterations(pub u64);

impl Budget for Iterations {
    fn exhausted(&mut self) -> bool {
        if self.0 == 0 {
            true
        } else {
            self.0 -= 1;
            false
        }
    }
}

/// What the heuristic must build for one region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionTarget {
    pub region: usize,
    pub shape: TargetShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetShape {
    /// Region 0: pathsets of length in `[1, max_len]`.
    Lower { max_len: u32 },
    /// Paths of length in `[min_len, max_len]` and `(min_len - 1)`-cutsets.
    Interior { min_len: u32, max_len: u32 },
    /// Last region: plain disconnecting cutsets.
    Upper,
}

impl RegionTarget {
    /// Unbounded path limits fall back to `n - 1`, the longest simple path.
    pub fn for_region(net: &Network, spec: &RegionSpec, region: usize) -> Result<Self, HeuristicError> {
        if region >= spec.region_count() {
            return Err(HeuristicError::NoSuchRegion { region, regions: spec.region_count() });
        }
        let longest = net.node_count().saturating_sub(1) as u32;
        let limit = |b: Option<Bound>| match b {
            Some(Bound::Hops(h)) => h.min(longest),
            _ => longest,
        };
        let shape = match shape(region, spec.last_region()) {
            EventShape::PathsOnly => TargetShape::Lower { max_len: limit(spec.pathset_bound(region)) },
            EventShape::CutsOnly => TargetShape::Upper,
            EventShape::Both => {
                let Some(Bound::Hops(below)) = spec.cutset_bound(region) else {
                    unreachable!("interior regions have a finite lower threshold")
                };
                TargetShape::Interior { min_len: below + 1, max_len: limit(spec.pathset_bound(region)) }
            }
        };
        Ok(RegionTarget { region, shape })
    }

    fn event_shape(&self) -> EventShape {
        match self.shape {
            TargetShape::Lower { .. } => EventShape::PathsOnly,
            TargetShape::Interior { .. } => EventShape::Both,
            TargetShape::Upper => EventShape::CutsOnly,
        }
    }

    fn path_window(&self) -> (u32, u32) {
        match self.shape {
            TargetShape::Lower { max_len } => (1, max_len),
            TargetShape::Interior { min_len, max_len } => (min_len, max_len),
            TargetShape::Upper => (1, 0),
        }
    }

    fn cut_bound(&self) -> Bound {
        match self.shape {
            TargetShape::Interior { min_len, .. } => Bound::Hops(min_len - 1),
            _ => Bound::Unbounded,
        }
    }

    fn check(&self, version: &Version) -> Result<(), HeuristicError> {
        let invalid = |reason| HeuristicError::InvalidVersion { version: version.to_string(), reason };
        match self.shape {
            TargetShape::Lower { .. } if version.cuts() > 0 => Err(invalid("region 0 takes pathsets only")),
            TargetShape::Upper if version.paths() > 0 => Err(invalid("the last region takes cutsets only")),
            TargetShape::Interior { .. } if version.paths() == 0 || version.cuts() == 0 => {
                Err(invalid("interior regions need at least one P and one C"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicSolution {
    pub region: usize,
    pub pathsets: Vec<Vec<usize>>,
    pub cutsets: Vec<Vec<usize>>,
    pub probability: f64,
    /// `components[k]`: partial solutions reached with `k` sets.
    pub components: Vec<u64>,
    pub iterations: u64,
    /// Best probability after every improvement, in order.
    pub best_trace: Vec<f64>,
}

impl HeuristicSolution {
    pub fn to_raw(&self) -> RawRegionSets {
        RawRegionSets { pathsets: self.pathsets.clone(), cutsets: self.cutsets.clone() }
    }
}

/// Main loop: repeats the version's sequence until `budget` runs out and
/// keeps the family with the highest `Pr(Z_i)`. Each sub-generation gets
/// `max_tries` attempts; a failed one abandons the iteration.
pub fn run_region_heuristic<R: Rng + ?Sized, B: Budget + ?Sized>(
    net: &Network,
    target: RegionTarget,
    version: &Version,
    max_tries: u32,
    budget: &mut B,
    rng: &mut R,
) -> Result<HeuristicSolution, HeuristicError> {
    let &[s, t] = net.terminals() else {
        return Err(HeuristicError::NotTwoTerminal(net.terminals().len()));
    };
    if max_tries == 0 {
        return Err(HeuristicError::ZeroTries);
    }
    target.check(version)?;
    let (min_len, max_len) = target.path_window();
    let cut_bound = target.cut_bound();
    let event = target.event_shape();

    let mut best = HeuristicSolution {
        region: target.region,
        pathsets: Vec::new(),
        cutsets: Vec::new(),
        probability: 0.0,
        components: vec![0; version.components().len() + 1],
        iterations: 0,
        best_trace: Vec::new(),
    };
    if version.paths() > 0 && min_len > max_len {
        return Ok(best);
    }

    while !budget.exhausted() {
        best.iterations += 1;
        let mut paths: Vec<Vec<usize>> = Vec::new();
        let mut cuts: Vec<Vec<usize>> = Vec::new();
        let mut used = EdgeMask::empty(net.edge_count());
        for &component in version.components() {
            let made = (0..max_tries).find_map(|_| match component {
                Component::Path => generate_path(net, s, t, min_len, max_len, &used, rng),
                Component::Cut => generate_cutset(net, s, t, cut_bound, &used, rng),
            });
            let Some(set) = made else { break };
            for &e in &set {
                used.insert(e);
            }
            match component {
                Component::Path => paths.push(set),
                Component::Cut => cuts.push(set),
            }
            best.components[paths.len() + cuts.len()] += 1;
            let p = disjoint_event_prob(net, event, &paths, &cuts);
            if p > best.probability {
                best.probability = p;
                best.pathsets = paths.clone();
                best.cutsets = cuts.clone();
                best.best_trace.push(p);
            }
        }
    }
    Ok(best)
}
