//! Single-stream sampling kernels for the crude and conditioned estimators,
//! plus the closed-form single-sample variances.
//!
//! Parallel drivers split the sample across independent random streams,
//! run one kernel per stream and fold the resulting [`Tally`] values in
//! stream order.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{EstimateError, EventError};
use crate::events::{ConditionalSampler, EventProbabilities, SamplerScratch};
use crate::graph::{BfsScratch, EdgeMask, Network};
use crate::region::{sample_into, RegionSpec};
use crate::sum::CompensatedSum;

/// Running mean and sum of squared deviations (Welford) plus region counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Tally {
    n: u64,
    mean: f64,
    m2: f64,
    region_counts: Vec<u64>,
}

impl Tally {
    pub fn new(regions: usize) -> Self {
        Tally { n: 0, mean: 0.0, m2: 0.0, region_counts: vec![0; regions] }
    }

    #[inline]
    pub fn push(&mut self, value: f64, region: usize) {
        self.n += 1;
        let delta = value - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (value - self.mean);
        self.region_counts[region] += 1;
    }

    /// Pooled combination (Chan et al.); order-sensitive only in rounding.
    pub fn merge(&mut self, other: &Tally) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other.clone();
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64);
        self.n = n;
        for (a, b) in self.region_counts.iter_mut().zip(&other.region_counts) {
            *a += b;
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (zero below two samples).
    pub fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn region_counts(&self) -> &[u64] {
        &self.region_counts
    }
}

/// Draws `n` unconditioned configurations and tallies their Φ values.
pub fn crude_run<R: Rng + ?Sized>(net: &Network, spec: &RegionSpec, n: u64, rng: &mut R) -> Tally {
    let mut tally = Tally::new(spec.region_count());
    let mut x = EdgeMask::empty(net.edge_count());
    let mut bfs = BfsScratch::new(net);
    for _ in 0..n {
        sample_into(net, rng, &mut x);
        let region = spec.classify(net, &x, &mut bfs);
        tally.push(spec.phi(region), region);
    }
    tally
}

/// Draws `n` configurations from `X∖Z` and tallies their Φ values.
pub fn conditioned_run<R: Rng + ?Sized>(
    net: &Network,
    spec: &RegionSpec,
    sampler: &ConditionalSampler,
    n: u64,
    rng: &mut R,
) -> Result<Tally, EventError> {
    let mut tally = Tally::new(spec.region_count());
    let mut x = EdgeMask::empty(net.edge_count());
    let mut bfs = BfsScratch::new(net);
    let mut scratch = SamplerScratch::default();
    for _ in 0..n {
        sampler.sample_into(rng, &mut x, &mut scratch)?;
        let region = spec.classify(net, &x, &mut bfs);
        tally.push(spec.phi(region), region);
    }
    Ok(tally)
}

/// Point estimate and estimator variance of the crude method.
pub fn crude_point(tally: &Tally) -> (f64, f64) {
    (tally.mean(), tally.sample_variance() / tally.count() as f64)
}

/// Point estimate `(1-z)·mean + φ` and estimator variance `(1-z)²·s²/N`.
pub fn conditioned_point(tally: &Tally, events: &EventProbabilities) -> (f64, f64) {
    let keep = 1.0 - events.z;
    (keep * tally.mean() + events.phi_offset, keep * keep * tally.sample_variance() / tally.count() as f64)
}

/// Exact region probabilities `p_i` with pinned masses `z_i`.
#[derive(Debug, Clone, Copy)]
pub struct RegionMasses<'a> {
    pub p: &'a [f64],
    pub z: &'a [f64],
}

impl RegionMasses<'_> {
    fn check(&self, spec: &RegionSpec) -> Result<(), EstimateError> {
        let k = spec.region_count();
        if self.p.len() != k || self.z.len() != k {
            return Err(EstimateError::Inconsistent(format!(
                "expected {k} regions, got {} p and {} z values",
                self.p.len(),
                self.z.len()
            )));
        }
        for (i, (&p, &z)) in self.p.iter().zip(self.z).enumerate() {
            if !(0.0..=1.0).contains(&p) || z < 0.0 {
                return Err(EstimateError::Inconsistent(format!("region {i}: p={p}, z={z}")));
            }
            if z > p {
                return Err(EstimateError::Inconsistent(format!("region {i}: z={z} exceeds p={p}")));
            }
        }
        Ok(())
    }
}

/// Single-sample variances `(σ̂²_1, σ̃²_1)` of the crude and conditioned
/// estimators from exact region masses.
pub fn theoretical_variances(spec: &RegionSpec, masses: RegionMasses<'_>) -> Result<(f64, f64), EstimateError> {
    masses.check(spec)?;
    let phi = spec.phi_values();
    let mean: f64 = phi.iter().zip(masses.p).map(|(f, p)| f * p).sum();
    let second: f64 = phi.iter().zip(masses.p).map(|(f, p)| f * f * p).sum();
    let z: f64 = masses.z.iter().sum();
    let offset: f64 = phi.iter().zip(masses.z).map(|(f, z)| f * z).sum();
    let residual: f64 = phi.iter().zip(masses.p.iter().zip(masses.z)).map(|(f, (p, z))| f * f * (p - z)).sum();
    let crude = second - mean * mean;
    let conditioned = (1.0 - z) * residual - (mean - offset) * (mean - offset);
    Ok((crude, conditioned))
}

/// `σ̂²_1 - σ̃²_1` as a sum of non-negative terms:
/// `Σ_ij (Φ_i-Φ_j)² (p_i-z_i) z_j + Σ_{i<j} (Φ_j-Φ_i)² z_i z_j`.
pub fn variance_difference(spec: &RegionSpec, masses: RegionMasses<'_>) -> Result<f64, EstimateError> {
    masses.check(spec)?;
    let phi = spec.phi_values();
    let k = phi.len();
    let mut acc = CompensatedSum::new();
    for i in 0..k {
        for j in 0..k {
            let d2 = (phi[i] - phi[j]) * (phi[i] - phi[j]);
            acc.add(d2 * (masses.p[i] - masses.z[i]) * masses.z[j]);
            if i < j {
                acc.add(d2 * masses.z[i] * masses.z[j]);
            }
        }
    }
    Ok(acc.value())
}

/// Strict variance reduction holds iff some non-empty region `i` and some
/// region `j` with non-empty `Z_j` carry different Φ values.
pub fn strict_reduction_condition(spec: &RegionSpec, masses: RegionMasses<'_>) -> bool {
    let phi = spec.phi_values();
    (0..phi.len()).any(|i| masses.p[i] > 0.0 && (0..phi.len()).any(|j| masses.z[j] > 0.0 && phi[i] != phi[j]))
}

/// Work split: worker `w` of `workers` handles this many samples.
pub fn worker_share(n: u64, workers: usize, w: usize) -> u64 {
    let workers = workers as u64;
    let w = w as u64;
    n / workers + u64::from(w < n % workers)
}

/// Checks used by drivers before sampling.
pub fn check_sample_size(n: u64) -> Result<(), EstimateError> {
    if n == 0 {
        Err(EstimateError::NoSamples)
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn merge_matches_sequential_push() {
        let values = [1.0, 4.0, 2.5, 9.0, 0.0, 3.0, 3.0];
        let mut all = Tally::new(1);
        for v in values {
            all.push(v, 0);
        }
        let mut a = Tally::new(1);
        let mut b = Tally::new(1);
        for v in &values[..3] {
            a.push(*v, 0);
        }
        for v in &values[3..] {
            b.push(*v, 0);
        }
        a.merge(&b);
        assert_eq!(a.count(), all.count());
        assert!((a.mean() - all.mean()).abs() < 1e-14);
        assert!((a.sample_variance() - all.sample_variance()).abs() < 1e-13);
        assert_eq!(a.region_counts(), &[7]);
    }

    #[test]
    fn constant_phi_has_zero_variance() {
        let net = Network::new(2, vec![Edge { a: 0, b: 1, reliability: 0.5 }], vec![0, 1]).unwrap();
        let spec = RegionSpec::new(vec![], vec![3.25]).unwrap();
        let t = crude_run(&net, &spec, 1000, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(crude_point(&t), (3.25, 0.0));
    }

    #[test]
    fn variance_corner_cases() {
        let spec = RegionSpec::from_hops(&[1, 2], vec![0.0, 1.0, 2.0]).unwrap();
        let p = [0.9, 0.081, 0.019];
        let (crude, cond) = theoretical_variances(&spec, RegionMasses { p: &p, z: &[0.0; 3] }).unwrap();
        assert!((crude - cond).abs() < 1e-15);
        assert_eq!(variance_difference(&spec, RegionMasses { p: &p, z: &[0.0; 3] }).unwrap(), 0.0);
        let (_, cond) = theoretical_variances(&spec, RegionMasses { p: &p, z: &p }).unwrap();
        assert!(cond.abs() < 1e-15);
        assert!(theoretical_variances(&spec, RegionMasses { p: &p, z: &[0.95, 0.0, 0.0] }).is_err());

        let flat = RegionSpec::from_hops(&[1, 2], vec![4.0, 4.0, 4.0]).unwrap();
        let z = [0.5, 0.01, 0.0];
        assert_eq!(variance_difference(&flat, RegionMasses { p: &p, z: &z }).unwrap(), 0.0);
        assert!(!strict_reduction_condition(&flat, RegionMasses { p: &p, z: &z }));
        assert!(strict_reduction_condition(&spec, RegionMasses { p: &p, z: &z }));
    }

    #[test]
    fn worker_shares_cover_n() {
        for (n, w) in [(10u64, 3usize), (1, 4), (1_000_003, 7)] {
            let total: u64 = (0..w).map(|i| worker_share(n, w, i)).sum();
            assert_eq!(total, n);
        }
    }
}
