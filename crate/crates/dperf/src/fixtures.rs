//! Built-in test networks and topology generators.

use dperf_core::{Edge, Network, RawRegionSets, RegionError, RegionSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Triangular};

use crate::error::{Error, Result};

/// Reduced transport backbone with 22 nodes; edge id = position.
pub const ANTEL_EDGES: [(usize, usize); 32] = [
    (11, 10),
    (11, 14),
    (13, 15),
    (4, 3),
    (4, 7),
    (8, 7),
    (8, 12),
    (12, 15),
    (15, 14),
    (8, 11),
    (6, 10),
    (4, 9),
    (9, 13),
    (15, 18),
    (18, 17),
    (14, 17),
    (9, 8),
    (7, 6),
    (10, 16),
    (16, 19),
    (20, 19),
    (21, 20),
    (17, 21),
    (3, 2),
    (2, 1),
    (1, 0),
    (1, 5),
    (0, 5),
    (0, 6),
    (5, 6),
    (18, 21),
    (12, 13),
];
pub const ANTEL_NODES: usize = 22;
pub const ANTEL_TERMINALS: [usize; 2] = [4, 14];
/// Hop thresholds of the ANTEL scenario; a fourth region holds disconnection.
pub const ANTEL_THRESHOLDS: [u32; 2] = [5, 7];

/// The ANTEL network with one reliability on every edge.
pub fn antel(reliability: f64) -> Result<Network> {
    let edges = ANTEL_EDGES.iter().map(|&(a, b)| Edge { a, b, reliability }).collect();
    Ok(Network::new(ANTEL_NODES, edges, ANTEL_TERMINALS.to_vec())?)
}

/// Hand-picked pathsets and cutsets for the four ANTEL regions.
pub fn antel_families() -> Vec<RawRegionSets> {
    let sets = |p: &[&[usize]], c: &[&[usize]]| RawRegionSets {
        pathsets: p.iter().map(|s| s.to_vec()).collect(),
        cutsets: c.iter().map(|s| s.to_vec()).collect(),
    };
    vec![
        sets(&[&[4, 5, 9, 1], &[11, 12, 2, 8]], &[]),
        sets(&[&[11, 12, 2, 13, 14, 15]], &[&[1, 8]]),
        sets(&[&[4, 17, 10, 18, 19, 20, 21, 22, 15]], &[&[1, 8, 13]]),
        sets(&[], &[&[3, 4, 11], &[1, 8, 15]]),
    ]
}

/// Fines per region for the three reference reliabilities.
pub fn antel_fines(reliability: f64) -> Option<[f64; 4]> {
    match reliability {
        0.9 => Some([0.0, 5.0, 10.0, 20.0]),
        0.95 => Some([0.0, 30.0, 60.0, 120.0]),
        0.99 => Some([0.0, 1000.0, 2000.0, 4000.0]),
        _ => None,
    }
}

/// Regions up to 5 hops, 6 to 7, above 7 and disconnected.
pub fn antel_regions(fines: [f64; 4]) -> Result<RegionSpec, RegionError> {
    RegionSpec::with_disconnected_region(&ANTEL_THRESHOLDS, fines.to_vec())
}

/// Node id of grid coordinate `(x, y)` in a `side`×`side` grid.
pub fn grid_node(side: usize, x: usize, y: usize) -> usize {
    y * side + x
}

/// `side`×`side` grid with horizontal edges first, then vertical ones.
/// Terminals default to opposite corners.
pub fn generate_grid(side: usize, reliability: f64) -> Result<Network> {
    if side < 2 {
        return Err(Error::Invalid(format!("grid side must be at least 2, got {side}")));
    }
    let mut edges = Vec::with_capacity(2 * side * (side - 1));
    for y in 0..side {
        for x in 0..side - 1 {
            edges.push(Edge { a: grid_node(side, x, y), b: grid_node(side, x + 1, y), reliability });
        }
    }
    for y in 0..side - 1 {
        for x in 0..side {
            edges.push(Edge { a: grid_node(side, x, y), b: grid_node(side, x, y + 1), reliability });
        }
    }
    Ok(Network::new(side * side, edges, vec![0, side * side - 1])?)
}

/// Replaces every reliability by an independent triangular draw.
pub fn triangular_reliabilities(net: &Network, min: f64, mode: f64, max: f64, seed: u64) -> Result<Network> {
    let dist = Triangular::new(min, max, mode)
        .map_err(|e| Error::Invalid(format!("triangular({min}, {mode}, {max}): {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(net.with_reliabilities(|_, _| dist.sample(&mut rng))?)
}

/// 8×8 grid, terminals (2,2) and (4,4), triangular(0.985, 0.99, 0.995)
/// reliabilities drawn with `seed`.
pub fn grid1(seed: u64) -> Result<Network> {
    let base = generate_grid(8, 0.99)?.with_terminals(vec![grid_node(8, 2, 2), grid_node(8, 4, 4)])?;
    triangular_reliabilities(&base, 0.985, 0.99, 0.995, seed)
}

/// Paths of 6 to 10 hops form region 1.
pub fn grid1_regions() -> RegionSpec {
    RegionSpec::from_hops(&[5, 10], vec![0.0, 1.0, 2.0]).expect("static spec")
}

/// Grows `base` by `extra_nodes` nodes, each linked to `edges_per_node`
/// distinct existing nodes chosen with probability proportional to degree.
pub fn generate_preferential_extension(
    base: &Network,
    extra_nodes: usize,
    edges_per_node: usize,
    reliability: f64,
    seed: u64,
) -> Result<Network> {
    if edges_per_node == 0 {
        return Err(Error::Invalid("edges_per_node must be at least 1".into()));
    }
    if edges_per_node > base.node_count() {
        return Err(Error::Invalid(format!(
            "edges_per_node {edges_per_node} exceeds the {} base nodes",
            base.node_count()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = base.edges().to_vec();
    // one entry per edge endpoint, so uniform picks are degree-weighted
    let mut ends: Vec<usize> = edges.iter().flat_map(|e| [e.a, e.b]).collect();
    if ends.is_empty() && extra_nodes > 0 {
        return Err(Error::Invalid("base network has no edges".into()));
    }
    let mut chosen = Vec::with_capacity(edges_per_node);
    for node in base.node_count()..base.node_count() + extra_nodes {
        chosen.clear();
        while chosen.len() < edges_per_node {
            let target = ends[rng.random_range(0..ends.len())];
            if !chosen.contains(&target) {
                chosen.push(target);
            }
        }
        for &target in &chosen {
            edges.push(Edge { a: node, b: target, reliability });
            ends.extend([node, target]);
        }
    }
    Ok(Network::new(base.node_count() + extra_nodes, edges, base.terminals().to_vec())?)
}
