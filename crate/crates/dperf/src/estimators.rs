//! Multi-threaded crude and conditioned estimators.
//!
//! The sample is split over a fixed number of random streams, so results
//! depend on `(seed, samples)` only: the worker count changes wall time,
//! not the numbers. Stream `s` of method `k` is ChaCha8 seeded with `seed`
//! on stream `(k << 32) | s`; tallies are merged in stream order.

use std::fmt;
use std::time::Instant;

use dperf_core::estimate::{
    check_sample_size, conditioned_point, conditioned_run, crude_point, crude_run, worker_share, Tally,
};
use dperf_core::events::{total_z_and_phi, DEFAULT_TABLE_CAP};
use dperf_core::{
    ConditionalSampler, EdgeSetFamilies, EventProbabilities, Network, RegionSpec, SamplingMode, SubConfigTable,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of independent random streams a run is divided into.
pub const STREAMS: usize = 64;

const CRUDE_TAG: u64 = 0;
const CONDITIONED_TAG: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingPlan {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SamplingPlan {
    fn check(&self) -> Result<()> {
        check_sample_size(self.samples)?;
        if self.workers == 0 {
            return Err(Error::Invalid("workers must be at least 1".into()));
        }
        Ok(())
    }
}

pub fn stream_rng(seed: u64, tag: u64, stream: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tag << 32) | stream as u64);
    rng
}

fn run_streams<F>(plan: &SamplingPlan, tag: u64, regions: usize, kernel: F) -> Result<Tally>
where
    F: Fn(u64, &mut ChaCha8Rng) -> Result<Tally> + Sync,
{
    let workers = plan.workers.min(STREAMS);
    let mut parts: Vec<Option<Result<Tally>>> = (0..STREAMS).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let kernel = &kernel;
                scope.spawn(move || {
                    (w..STREAMS)
                        .step_by(workers)
                        .map(|s| {
                            let mut rng = stream_rng(plan.seed, tag, s);
                            (s, kernel(worker_share(plan.samples, STREAMS, s), &mut rng))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (s, t) in h.join().expect("sampling worker panicked") {
                parts[s] = Some(t);
            }
        }
    });
    let mut total = Tally::new(regions);
    for part in parts {
        total.merge(&part.expect("every stream ran")?);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Crude,
    Conditioned,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Crude => "crude",
            Method::Conditioned => "conditioned",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub point_estimate: f64,
    pub variance_of_estimator: f64,
    pub standard_error: f64,
    /// Unbiased variance of the sampled Φ values.
    pub sample_variance: f64,
    pub sample_size: u64,
    pub per_region_counts: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_regions: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_offset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_size: Option<usize>,
    pub seed: u64,
    pub workers: usize,
    pub setup_seconds: f64,
    pub sampling_seconds: f64,
}

impl EstimateReport {
    pub fn total_seconds(&self) -> f64 {
        self.setup_seconds + self.sampling_seconds
    }
}

/// Crude variance over conditioned variance.
pub fn variance_ratio(crude: &EstimateReport, conditioned: &EstimateReport) -> f64 {
    crude.variance_of_estimator / conditioned.variance_of_estimator
}

/// Variance ratio times time ratio; the conditioned time includes setup.
pub fn relative_efficiency(crude: &EstimateReport, conditioned: &EstimateReport) -> f64 {
    variance_ratio(crude, conditioned) * (crude.total_seconds() / conditioned.total_seconds())
}

/// Conditions worth reporting that do not stop a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// All families are empty; the conditioned method reduces to crude.
    NoUsefulSets,
    /// Same-region sets share edges; only the table sampler applies.
    OverlappingSets(usize),
    /// The families pin every configuration; nothing is sampled.
    Exhaustive,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NoUsefulSets => {
                f.write_str("no pathsets or cutsets given; conditioned sampling equals crude sampling")
            }
            Warning::OverlappingSets(n) => {
                write!(f, "{n} pairs of same-region sets overlap; using exhaustive table probabilities")
            }
            Warning::Exhaustive => {
                f.write_str("the families pin every configuration; the conditioned estimate is exact")
            }
        }
    }
}

pub fn crude_estimate(net: &Network, spec: &RegionSpec, plan: &SamplingPlan) -> Result<EstimateReport> {
    plan.check()?;
    let start = Instant::now();
    let tally = run_streams(plan, CRUDE_TAG, spec.region_count(), |n, rng| Ok(crude_run(net, spec, n, rng)))?;
    let sampling_seconds = start.elapsed().as_secs_f64();
    let (point_estimate, variance) = crude_point(&tally);
    Ok(EstimateReport {
        method: Method::Crude,
        mode: None,
        point_estimate,
        variance_of_estimator: variance,
        standard_error: variance.sqrt(),
        sample_variance: tally.sample_variance(),
        sample_size: tally.count(),
        per_region_counts: tally.region_counts().to_vec(),
        z_regions: None,
        z: None,
        phi_offset: None,
        omega_size: None,
        seed: plan.seed,
        workers: plan.workers,
        setup_seconds: 0.0,
        sampling_seconds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionedOptions {
    /// `None` picks the table when Ω fits under `table_cap`.
    pub mode: Option<SamplingMode>,
    pub table_cap: usize,
}

impl Default for ConditionedOptions {
    fn default() -> Self {
        ConditionedOptions { mode: None, table_cap: DEFAULT_TABLE_CAP }
    }
}

/// Sampler and pinned masses for a family; the masses match the sampler's
/// law. The sampler is `None` when the families cover every configuration.
pub fn prepare_conditioning(
    net: &Network,
    spec: &RegionSpec,
    families: &EdgeSetFamilies,
    options: &ConditionedOptions,
) -> Result<(Option<ConditionalSampler>, EventProbabilities, Vec<Warning>)> {
    let mut warnings = Vec::new();
    if families.is_empty() {
        warnings.push(Warning::NoUsefulSets);
    }
    if !families.overlaps().is_empty() {
        warnings.push(Warning::OverlappingSets(families.overlaps().len()));
    }
    let mode = options.mode.unwrap_or_else(|| SamplingMode::default_for(families, options.table_cap));
    let sampler = ConditionalSampler::new(net, families, mode, options.table_cap)?;
    let events = match sampler.table() {
        Some(t) => EventProbabilities::from_regions(spec, t.z_regions().to_vec()),
        None => total_z_and_phi(net, families, spec)?,
    };
    let exhaustive = match sampler.table() {
        Some(t) => !t.retains_any(),
        None if events.z >= 1.0 - EXHAUSTIVE_CHECK && families.omega().len() <= options.table_cap => {
            !SubConfigTable::build(net, families, options.table_cap)?.retains_any()
        }
        None => false,
    };
    if exhaustive {
        warnings.push(Warning::Exhaustive);
        return Ok((None, events, warnings));
    }
    if events.z >= 1.0 {
        return Err(Error::Invalid(format!("the families pin every configuration (z = {})", events.z)));
    }
    Ok((Some(sampler), events, warnings))
}

/// `z` above `1 - EXHAUSTIVE_CHECK` triggers an exact coverage test.
const EXHAUSTIVE_CHECK: f64 = 1e-9;

pub fn conditioned_estimate(
    net: &Network,
    spec: &RegionSpec,
    families: &EdgeSetFamilies,
    plan: &SamplingPlan,
    options: &ConditionedOptions,
) -> Result<(EstimateReport, Vec<Warning>)> {
    plan.check()?;
    let setup = Instant::now();
    let (sampler, events, warnings) = prepare_conditioning(net, spec, families, options)?;
    let setup_seconds = setup.elapsed().as_secs_f64();

    let start = Instant::now();
    let (tally, point_estimate, variance) = match &sampler {
        Some(sampler) => {
            let tally = run_streams(plan, CONDITIONED_TAG, spec.region_count(), |n, rng| {
                Ok(conditioned_run(net, spec, sampler, n, rng)?)
            })?;
            let (point, variance) = conditioned_point(&tally, &events);
            (tally, point, variance)
        }
        None => (Tally::new(spec.region_count()), events.phi_offset, 0.0),
    };
    let sampling_seconds = start.elapsed().as_secs_f64();
    let report = EstimateReport {
        method: Method::Conditioned,
        mode: sampler.as_ref().map(|s| s.mode().name().to_string()),
        point_estimate,
        variance_of_estimator: variance,
        standard_error: variance.sqrt(),
        sample_variance: tally.sample_variance(),
        sample_size: tally.count(),
        per_region_counts: tally.region_counts().to_vec(),
        z_regions: Some(events.z_regions.clone()),
        z: Some(events.z),
        phi_offset: Some(events.phi_offset),
        omega_size: Some(families.omega().len()),
        seed: plan.seed,
        workers: plan.workers,
        setup_seconds,
        sampling_seconds,
    };
    Ok((report, warnings))
}
