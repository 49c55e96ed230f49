//! Wall-clock driver for the set-construction heuristics.

use std::time::{Duration, Instant};

use dperf_core::heuristics::{run_region_heuristic, Budget, HeuristicSolution, RegionTarget, TargetShape, Version};
use dperf_core::{Network, RawRegionSets, RegionSpec};

use crate::error::Result;
use crate::estimators::stream_rng;

const HEURISTIC_TAG: u64 = 2;

/// Stops once a fixed instant has passed.
#[derive(Debug, Clone, Copy)]
pub struct Deadline(pub Instant);

impl Deadline {
    pub fn after(limit: Duration) -> Self {
        Deadline(Instant::now() + limit)
    }
}

impl Budget for Deadline {
    fn exhausted(&mut self) -> bool {
        Instant::now() >= self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicConfig {
    /// Used for interior regions.
    pub version: Version,
    /// Used for region 0.
    pub lower_version: Version,
    /// Used for the last region.
    pub upper_version: Version,
    pub max_time: Duration,
    pub max_tries: u32,
    pub seed: u64,
}

impl HeuristicConfig {
    pub fn version_for(&self, target: &RegionTarget) -> &Version {
        match target.shape {
            TargetShape::Lower { .. } => &self.lower_version,
            TargetShape::Interior { .. } => &self.version,
            TargetShape::Upper => &self.upper_version,
        }
    }
}

/// Runs one region for `config.max_time`.
pub fn run_region(
    net: &Network,
    spec: &RegionSpec,
    region: usize,
    config: &HeuristicConfig,
) -> Result<HeuristicSolution> {
    let target = RegionTarget::for_region(net, spec, region)?;
    let mut rng = stream_rng(config.seed, HEURISTIC_TAG, region);
    let mut budget = Deadline::after(config.max_time);
    Ok(run_region_heuristic(net, target, config.version_for(&target), config.max_tries, &mut budget, &mut rng)?)
}

/// Runs every region in parallel, each with its own time budget.
pub fn run_all_regions(net: &Network, spec: &RegionSpec, config: &HeuristicConfig) -> Result<Vec<HeuristicSolution>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> =
            (0..spec.region_count()).map(|i| scope.spawn(move || run_region(net, spec, i, config))).collect();
        handles.into_iter().map(|h| h.join().expect("heuristic worker panicked")).collect()
    })
}

pub fn solutions_to_raw(spec: &RegionSpec, solutions: &[HeuristicSolution]) -> Vec<RawRegionSets> {
    let mut raw = vec![RawRegionSets::default(); spec.region_count()];
    for s in solutions {
        raw[s.region] = s.to_raw();
    }
    raw
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{antel, antel_fines, antel_regions};
    use dperf_core::{build_families, OverlapPolicy};

    #[test]
    fn short_run_on_antel_validates() {
        let net = antel(0.9).unwrap();
        let spec = antel_regions(antel_fines(0.9).unwrap()).unwrap();
        let config = HeuristicConfig {
            version: "PCCP".parse().unwrap(),
            lower_version: "PPPP".parse().unwrap(),
            upper_version: "CCCC".parse().unwrap(),
            max_time: Duration::from_millis(200),
            max_tries: 5,
            seed: 4,
        };
        let sols = run_all_regions(&net, &spec, &config).unwrap();
        assert!(sols.iter().all(|s| s.probability > 0.0));
        build_families(&net, &spec, &solutions_to_raw(&spec, &sols), OverlapPolicy::Reject).unwrap();
    }
}
