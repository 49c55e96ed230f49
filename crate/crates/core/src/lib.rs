//! Estimation of distance-dependent performability metrics on networks
//! with independently failing edges.
//!
//! A metric Φ maps each network configuration to a value determined by the
//! largest hop distance between terminals. This crate provides crude Monte
//! Carlo sampling, a variance-reduced sampler that conditions on families of
//! bounded pathsets and cutsets, greedy randomized heuristics that build
//! those families, and exhaustive enumeration for small instances.
//!
//! The crate is `no_std` and needs only `alloc`. Threading, timing and file
//! formats live in the companion `dperf` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod edge_sets;
pub mod error;
pub mod estimate;
pub mod events;
pub mod exact;
pub mod graph;
pub mod heuristics;
pub mod region;
mod sum;

pub use edge_sets::{
    build_families, validate_cutset, validate_pathset, EdgeSet, EdgeSetFamilies, OverlapPolicy, RawRegionSets,
};
pub use error::{
    EstimateError, EventError, ExactError, FamilyError, HeuristicError, NetworkError, RegionError, SetKind, SetRef,
};
pub use events::{ConditionalSampler, EventProbabilities, SamplingMode, SubConfigTable};
pub use graph::{Bound, Configuration, Distance, Edge, EdgeMask, Network};
pub use region::RegionSpec;
pub use sum::CompensatedSum;
