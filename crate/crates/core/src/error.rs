use alloc::string::String;

use thiserror::Error;

use crate::graph::Bound;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("network has no nodes")]
    NoNodes,
    #[error("edge {edge} has an endpoint outside [0, {node_count})")]
    EndpointOutOfRange { edge: usize, node_count: usize },
    #[error("edge {edge} is a self-loop at node {node}")]
    SelfLoop { edge: usize, node: usize },
    #[error("edge {edge} has reliability {value}, expected a value in (0, 1)")]
    Reliability { edge: usize, value: f64 },
    #[error("terminal {node} outside [0, {node_count})")]
    TerminalOutOfRange { node: usize, node_count: usize },
    #[error("at least two distinct terminals are required, got {0}")]
    TooFewTerminals(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("expected {expected} phi values for {thresholds} thresholds, got {found}")]
    PhiCount { thresholds: usize, expected: usize, found: usize },
    #[error("thresholds must be strictly increasing and at least 1 (offending threshold {0})")]
    Thresholds(Bound),
    #[error("only the last threshold may be unbounded")]
    UnboundedNotLast,
    #[error("phi value {0} is not finite")]
    NonFinitePhi(f64),
    #[error("distance 0 between distinct terminals is impossible")]
    ZeroDistance,
}

/// Identifies one member of a region's families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetRef {
    pub region: usize,
    pub kind: SetKind,
    pub index: usize,
}

impl core::fmt::Display for SetRef {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let k = match self.kind {
            SetKind::Pathset => "pathset",
            SetKind::Cutset => "cutset",
        };
        write!(f, "region {} {} #{}", self.region, k, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    Pathset,
    Cutset,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("expected families for {expected} regions, got {found}")]
    RegionCount { expected: usize, found: usize },
    #[error("{at}: edge id {edge} is outside [0, {edge_count})")]
    EdgeOutOfRange { at: SetRef, edge: usize, edge_count: usize },
    #[error("{0}: empty edge set")]
    EmptySet(SetRef),
    #[error("{0}: this region admits no sets of that kind")]
    Misplaced(SetRef),
    #[error("{at}: not a {bound}-pathset")]
    InvalidPathset { at: SetRef, bound: Bound },
    #[error("{at}: not a {bound}-cutset")]
    InvalidCutset { at: SetRef, bound: Bound },
    #[error("{first} and {second} share edges")]
    OverlapWithinRegion { first: SetRef, second: SetRef },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EventError {
    #[error("region {0} families are not pairwise edge-disjoint; factorized probabilities do not apply")]
    FamilyNotDisjoint(usize),
    #[error("conditioning event has probability {0:e}; the fixings already force membership in Z")]
    ZeroConditional(f64),
    #[error("|Omega| = {size} exceeds the table cap {cap}")]
    OmegaTooLarge { size: usize, cap: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("{edges} edges exceed the enumeration cap {cap}")]
    TooManyEdges { edges: usize, cap: usize },
    #[error("|Omega| = {size} exceeds the enumeration cap {cap}")]
    OmegaTooLarge { size: usize, cap: usize },
    #[error("configuration {config:#x} satisfies Z_{region} but its distance falls in region {actual}")]
    Unsound { config: u64, region: usize, actual: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("sample size must be at least 1")]
    NoSamples,
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Event(#[from] EventError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeuristicError {
    #[error("invalid version {version:?}: {reason}")]
    InvalidVersion { version: String, reason: &'static str },
    #[error("heuristics need exactly two terminals, got {0}")]
    NotTwoTerminal(usize),
    #[error("region {region} does not exist (spec has {regions} regions)")]
    NoSuchRegion { region: usize, regions: usize },
    #[error("max_tries must be at least 1")]
    ZeroTries,
}
