//! Undirected multigraphs with per-edge reliabilities, edge masks and
//! hop-distance queries over partial graphs.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::NetworkError;

/// Hop distance between two nodes of a partial graph.
///
/// `Unreachable` orders above every finite distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u32),
    Unreachable,
}

impl Distance {
    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn hops(self) -> Option<u32> {
        match self {
            Distance::Finite(h) => Some(h),
            Distance::Unreachable => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(h) => write!(f, "{h}"),
            Distance::Unreachable => f.write_str("inf"),
        }
    }
}

/// Upper bound on a hop distance. `Unbounded` admits every finite distance,
/// so an unbounded pathset is a plain pathset and an unbounded cutset a
/// plain (disconnecting) cutset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    Hops(u32),
    Unbounded,
}

impl Bound {
    pub fn admits(self, d: Distance) -> bool {
        match (self, d) {
            (_, Distance::Unreachable) => false,
            (Bound::Unbounded, Distance::Finite(_)) => true,
            (Bound::Hops(b), Distance::Finite(h)) => h <= b,
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Bound::Hops(a), Bound::Hops(b)) => a.cmp(b),
            (Bound::Hops(_), Bound::Unbounded) => Ordering::Less,
            (Bound::Unbounded, Bound::Hops(_)) => Ordering::Greater,
            (Bound::Unbounded, Bound::Unbounded) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Hops(h) => write!(f, "{h}"),
            Bound::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Fixed-length bit vector over edge ids. Bit `e` set means edge `e` is
/// active (operating, or a member of the subset).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeMask {
    words: Vec<u64>,
    len: usize,
}

/// A network configuration: one state bit per edge.
pub type Configuration = EdgeMask;

impl EdgeMask {
    pub fn empty(len: usize) -> Self {
        EdgeMask { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut m = Self::empty(len);
        m.set_all();
        m
    }

    pub fn from_edges(len: usize, edges: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Self::empty(len);
        for e in edges {
            m.insert(e);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        debug_assert!(e < self.len);
        self.words[e >> 6] >> (e & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, e: usize, on: bool) {
        debug_assert!(e < self.len);
        let bit = 1u64 << (e & 63);
        if on {
            self.words[e >> 6] |= bit;
        } else {
            self.words[e >> 6] &= !bit;
        }
    }

    #[inline]
    pub fn insert(&mut self, e: usize) {
        self.set(e, true);
    }

    #[inline]
    pub fn remove(&mut self, e: usize) {
        self.set(e, false);
    }

    #[inline]
    pub fn toggle(&mut self, e: usize) {
        self.words[e >> 6] ^= 1u64 << (e & 63);
    }

    pub fn set_all(&mut self) {
        for w in &mut self.words {
            *w = u64::MAX;
        }
        let tail = self.len & 63;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last = (1u64 << tail) - 1;
            }
        }
    }

    pub fn clear(&mut self) {
        for w in &mut self.words {
            *w = 0;
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Edge ids whose bit is set, ascending.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&e| self.contains(e))
    }

    /// Complement within `0..len`.
    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        let tail = self.len & 63;
        if tail != 0 {
            if let Some(last) = out.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        out
    }
}

impl fmt::Debug for EdgeMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// An undirected edge with its operating probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub reliability: f64,
}

impl Edge {
    pub fn other(&self, node: usize) -> usize {
        if node == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Undirected graph with independently failing edges and a terminal set.
///
/// Edge ids are list indices. Parallel edges are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    node_count: usize,
    edges: Vec<Edge>,
    terminals: Vec<usize>,
    // (neighbour, edge id) per node, in edge-id order
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Network {
    pub fn new(node_count: usize, edges: Vec<Edge>, terminals: Vec<usize>) -> Result<Self, NetworkError> {
        if node_count == 0 {
            return Err(NetworkError::NoNodes);
        }
        for (id, e) in edges.iter().enumerate() {
            if e.a >= node_count || e.b >= node_count {
                return Err(NetworkError::EndpointOutOfRange { edge: id, node_count });
            }
            if e.a == e.b {
                return Err(NetworkError::SelfLoop { edge: id, node: e.a });
            }
            if !(e.reliability > 0.0 && e.reliability < 1.0) {
                return Err(NetworkError::Reliability { edge: id, value: e.reliability });
            }
        }
        let mut terminals = terminals;
        terminals.sort_unstable();
        terminals.dedup();
        if let Some(&t) = terminals.iter().find(|&&t| t >= node_count) {
            return Err(NetworkError::TerminalOutOfRange { node: t, node_count });
        }
        if terminals.len() < 2 {
            return Err(NetworkError::TooFewTerminals(terminals.len()));
        }
        let mut adjacency = vec![Vec::new(); node_count];
        for (id, e) in edges.iter().enumerate() {
            adjacency[e.a].push((e.b, id));
            adjacency[e.b].push((e.a, id));
        }
        Ok(Network { node_count, edges, terminals, adjacency })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn reliability(&self, id: usize) -> f64 {
        self.edges[id].reliability
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    /// `(neighbour, edge id)` pairs incident to `node`.
    pub fn incident(&self, node: usize) -> &[(usize, usize)] {
        &self.adjacency[node]
    }

    /// Same topology with a different terminal set.
    pub fn with_terminals(&self, terminals: Vec<usize>) -> Result<Self, NetworkError> {
        Network::new(self.node_count, self.edges.clone(), terminals)
    }

    /// Same topology and terminals with per-edge reliabilities replaced.
    pub fn with_reliabilities(&self, mut f: impl FnMut(usize, &Edge) -> f64) -> Result<Self, NetworkError> {
        let edges = self.edges.iter().enumerate().map(|(id, e)| Edge { reliability: f(id, e), ..*e }).collect();
        Network::new(self.node_count, edges, self.terminals.clone())
    }

    pub fn all_edges(&self) -> EdgeMask {
        EdgeMask::full(self.edge_count())
    }

    /// Hop distances from `source` in the partial graph of `active` edges.
    pub fn bfs_distances(&self, active: &EdgeMask, source: usize) -> Vec<Distance> {
        let mut scratch = BfsScratch::new(self);
        scratch.run(self, active, source, None);
        scratch.dist.iter().map(|&d| if d == UNSEEN { Distance::Unreachable } else { Distance::Finite(d) }).collect()
    }

    /// Maximum hop distance over terminal pairs in the partial graph.
    pub fn max_terminal_distance(&self, active: &EdgeMask) -> Distance {
        BfsScratch::new(self).max_terminal_distance(self, active)
    }

    /// True iff every terminal pair is within `d` hops using `active` edges.
    pub fn is_d_connected(&self, active: &EdgeMask, d: Bound) -> bool {
        d.admits(self.max_terminal_distance(active))
    }
}

const UNSEEN: u32 = u32::MAX;

/// Reusable BFS buffers for hot loops.
#[derive(Debug, Clone)]
pub struct BfsScratch {
    dist: Vec<u32>,
    queue: VecDeque<usize>,
}

impl BfsScratch {
    pub fn new(net: &Network) -> Self {
        BfsScratch { dist: vec![UNSEEN; net.node_count()], queue: VecDeque::with_capacity(net.node_count()) }
    }

    /// Plain BFS; stops early once every node in `stop_when_seen` is reached.
    fn run(&mut self, net: &Network, active: &EdgeMask, source: usize, stop_when_seen: Option<&[usize]>) {
        self.dist.fill(UNSEEN);
        self.queue.clear();
        self.dist[source] = 0;
        self.queue.push_back(source);
        let mut pending = stop_when_seen.map(|targets| targets.iter().filter(|&&t| t != source).count());
        if pending == Some(0) {
            return;
        }
        while let Some(u) = self.queue.pop_front() {
            let du = self.dist[u];
            for &(v, e) in &net.adjacency[u] {
                if self.dist[v] == UNSEEN && active.contains(e) {
                    self.dist[v] = du + 1;
                    self.queue.push_back(v);
                    if let (Some(left), Some(targets)) = (pending.as_mut(), stop_when_seen) {
                        if targets.contains(&v) {
                            *left -= 1;
                            if *left == 0 {
                                return;
                            }
                        }
                    }
                }
            }
        }
    }

    /// Δ of a configuration: one BFS per terminal except the last.
    pub fn max_terminal_distance(&mut self, net: &Network, active: &EdgeMask) -> Distance {
        let terms = net.terminals();
        let mut worst = 0u32;
        for (i, &src) in terms[..terms.len() - 1].iter().enumerate() {
            let rest = &terms[i + 1..];
            self.run(net, active, src, Some(rest));
            for &t in rest {
                let d = self.dist[t];
                if d == UNSEEN {
                    return Distance::Unreachable;
                }
                worst = worst.max(d);
            }
        }
        Distance::Finite(worst)
    }
}
