//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::Command;
use std::time::{Duration, Instant};

use dperf::estimators::{conditioned_estimate, crude_estimate, variance_ratio, ConditionedOptions, SamplingPlan};
use dperf::fixtures::{antel, antel_families, antel_fines, antel_regions, grid1, grid1_regions};
use dperf::heuristic::{run_region, HeuristicConfig};
use dperf::oracle::parallel_exact;
use dperf::report::RunReport;
use dperf_core::edge_sets::validate_cutset;
use dperf_core::estimate::{strict_reduction_condition, theoretical_variances, variance_difference, RegionMasses};
use dperf_core::events::{pinned_region, total_z_and_phi, SamplerScratch};
use dperf_core::exact::enumerate_z;
use dperf_core::graph::{Bound, EdgeMask};
use dperf_core::heuristics::{run_region_heuristic, Iterations, RegionTarget, TargetShape, Version};
use dperf_core::{
    build_families, ConditionalSampler, Edge, EdgeSetFamilies, Network, OverlapPolicy, RawRegionSets, RegionSpec,
    SamplingMode, SubConfigTable,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence, 50 random graphs, 3 SE", oracle_equivalence),
        ("z-consistency on ANTEL, tolerance 1e-12", z_consistency),
        ("variance-difference identity, 1000 instances, 1e-12", variance_identity),
        ("ANTEL desk-scale reproduction, N = 1e6", antel_reproduction),
        ("conditioned sampler law, TV <= 0.01, 1e6 draws", sampler_law),
        ("heuristic structure on Grid1, 100 runs x 7 versions", heuristic_structure),
        ("heuristic quality on Grid1, 40 s, best >= 5e-5", heuristic_quality),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}. {name} ({secs:.1}s): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name} ({secs:.1}s): {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn version_for(shape: TargetShape) -> Version {
    match shape {
        TargetShape::Lower { .. } => "PPP",
        TargetShape::Interior { .. } => "PCPC",
        TargetShape::Upper => "CCC",
    }
    .parse()
    .expect("static version")
}

fn random_instance(rng: &mut ChaCha8Rng) -> (Network, RegionSpec) {
    let n = rng.random_range(4..=10);
    let m = rng.random_range(n - 1..=18);
    let mut edges = Vec::with_capacity(m);
    // a spanning path keeps most instances connected, the rest is random
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    for w in order.windows(2).take(m) {
        edges.push((w[0], w[1]));
    }
    while edges.len() < m {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.push((a, b));
        }
    }
    let edges = edges.into_iter().map(|(a, b)| Edge { a, b, reliability: rng.random_range(0.5..0.99) }).collect();
    let (s, t) = (order[0], order[rng.random_range(1..n)]);
    let net = Network::new(n, edges, vec![s, t]).expect("valid instance");
    let count = rng.random_range(1..=3);
    let mut hops: Vec<u32> = Vec::new();
    while hops.len() < count {
        let h = rng.random_range(1..n as u32);
        if !hops.contains(&h) {
            hops.push(h);
        }
    }
    hops.sort();
    let disconnected = rng.random_bool(0.5);
    let phi: Vec<f64> =
        (0..hops.len() + 1 + usize::from(disconnected)).map(|i| (i as f64) + rng.random::<f64>()).collect();
    let spec =
        if disconnected { RegionSpec::with_disconnected_region(&hops, phi) } else { RegionSpec::from_hops(&hops, phi) }
            .expect("valid regions");
    (net, spec)
}

fn heuristic_families(net: &Network, spec: &RegionSpec, rng: &mut ChaCha8Rng) -> Result<EdgeSetFamilies, String> {
    let raw = (0..spec.region_count())
        .map(|i| {
            let target = RegionTarget::for_region(net, spec, i).map_err(|e| e.to_string())?;
            run_region_heuristic(net, target, &version_for(target.shape), 3, &mut Iterations(8), rng)
                .map(|s| s.to_raw())
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    build_families(net, spec, &raw, OverlapPolicy::Reject).map_err(|e| e.to_string())
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let plan = SamplingPlan { samples: 100_000, seed: 11, workers: workers() };
    let mut worst: f64 = 0.0;
    for g in 0..50 {
        let (net, spec) = random_instance(&mut rng);
        let fam = heuristic_families(&net, &spec, &mut rng)?;
        let exact = parallel_exact(&net, &spec, None, workers(), 18).map_err(|e| e.to_string())?.expected_phi;
        let crude = crude_estimate(&net, &spec, &plan).map_err(|e| e.to_string())?;
        let (cond, _) = conditioned_estimate(&net, &spec, &fam, &plan, &ConditionedOptions::default())
            .map_err(|e| e.to_string())?;
        for (name, r) in [("crude", &crude), ("conditioned", &cond)] {
            let gap = (r.point_estimate - exact).abs();
            if r.standard_error > 0.0 {
                worst = worst.max(gap / r.standard_error);
            }
            ensure(gap <= 3.0 * r.standard_error + 1e-12, || {
                format!("graph {g}: {name} {} vs exact {exact}, se {}", r.point_estimate, r.standard_error)
            })?;
        }
    }
    Ok(format!("largest deviation {worst:.2} SE"))
}

/// `Pr(event)` over the listed edges, every edge at reliability `r`.
fn enumerate_over(edges: &[usize], r: f64, event: impl Fn(&dyn Fn(usize) -> bool) -> bool) -> f64 {
    let mut total = 0.0;
    for s in 0u32..1 << edges.len() {
        let up = |e: usize| edges.iter().position(|&x| x == e).is_some_and(|k| s >> k & 1 == 1);
        if event(&up) {
            let k = s.count_ones() as i32;
            total += r.powi(k) * (1.0 - r).powi(edges.len() as i32 - k);
        }
    }
    total
}

fn z_consistency() -> Outcome {
    let raw = antel_families();
    let z1 = enumerate_over(&[11, 12, 2, 13, 14, 15, 1, 8], 0.9, |up| {
        raw[1].pathsets[0].iter().all(|&e| up(e)) && raw[1].cutsets[0].iter().all(|&e| !up(e))
    });
    let z3 = enumerate_over(&[3, 4, 11, 1, 8, 15], 0.9, |up| raw[3].cutsets.iter().any(|c| c.iter().all(|&e| !up(e))));
    ensure((z1 - 0.00531441).abs() <= 1e-12, || format!("oracle z_1 = {z1}"))?;
    ensure((z3 - 0.001999).abs() <= 1e-12, || format!("oracle z_3 = {z3}"))?;

    let mut worst: f64 = 0.0;
    for r in [0.9, 0.95, 0.99] {
        let net = antel(r).map_err(|e| e.to_string())?;
        let spec = antel_regions(antel_fines(r).expect("reference reliability")).map_err(|e| e.to_string())?;
        let fam = build_families(&net, &spec, &raw, OverlapPolicy::Reject).map_err(|e| e.to_string())?;
        let ev = total_z_and_phi(&net, &fam, &spec).map_err(|e| e.to_string())?;
        let table = SubConfigTable::build(&net, &fam, 24).map_err(|e| e.to_string())?;
        let enumerated = enumerate_z(&net, &fam, &spec, 24).map_err(|e| e.to_string())?;
        for ((f, t), e) in ev.z_regions.iter().zip(table.z_regions()).zip(&enumerated) {
            worst = worst.max((f - e).abs()).max((t - e).abs());
        }
        worst = worst.max((table.total() - (1.0 - ev.z)).abs());
        if r == 0.9 {
            worst = worst.max((ev.z_regions[1] - z1).abs()).max((ev.z_regions[3] - z3).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("largest disagreement {worst:e}"))?;
    Ok(format!("largest disagreement {worst:e}; z_1 = {z1}, z_3 = {z3}"))
}

fn weighted_variance(phi: &[f64], w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mean: f64 = phi.iter().zip(w).map(|(f, w)| f * w).sum::<f64>() / total;
    phi.iter().zip(w).map(|(f, w)| w / total * (f - mean) * (f - mean)).sum()
}

fn variance_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut strict = 0;
    for case in 0..1000 {
        let k = rng.random_range(1..=5);
        let w: Vec<f64> =
            (0..k).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.01..1.0) }).collect();
        let total: f64 = w.iter().sum();
        if total == 0.0 {
            continue;
        }
        let p: Vec<f64> = w.iter().map(|x| x / total).collect();
        let z: Vec<f64> = p
            .iter()
            .map(|p| match rng.random_range(0..4) {
                0 => 0.0,
                1 => *p,
                _ => p * rng.random::<f64>(),
            })
            .collect();
        let phi: Vec<f64> = (0..k)
            .map(
                |_| if rng.random_bool(0.5) { f64::from(rng.random_range(0u8..3)) } else { rng.random_range(0.0..5.0) },
            )
            .collect();
        let hops: Vec<u32> = (1..k as u32).collect();
        let spec = RegionSpec::from_hops(&hops, phi.clone()).map_err(|e| e.to_string())?;
        let masses = RegionMasses { p: &p, z: &z };
        let (crude, cond) = theoretical_variances(&spec, masses).map_err(|e| e.to_string())?;
        let zt: f64 = z.iter().sum();
        let rest: Vec<f64> = p.iter().zip(&z).map(|(p, z)| p - z).collect();
        let direct_crude = weighted_variance(&phi, &p);
        let direct_cond = (1.0 - zt) * (1.0 - zt) * weighted_variance(&phi, &rest);
        let diff = variance_difference(&spec, masses).map_err(|e| e.to_string())?;
        ensure((crude - direct_crude).abs() <= 1e-12 && (cond - direct_cond).abs() <= 1e-12, || {
            format!("case {case}: closed forms ({crude}, {cond}) vs direct ({direct_crude}, {direct_cond})")
        })?;
        ensure((diff - (direct_crude - direct_cond)).abs() <= 1e-12, || format!("case {case}: difference {diff}"))?;
        ensure(diff >= 0.0, || format!("case {case}: negative difference {diff}"))?;
        let condition = strict_reduction_condition(&spec, masses);
        ensure((diff > 0.0) == condition, || format!("case {case}: difference {diff}, condition {condition}"))?;
        strict += usize::from(condition);
    }
    Ok(format!("{strict} instances with a strict reduction"))
}

fn antel_reproduction() -> Outcome {
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for (r, lo, hi) in [(0.9, 9.0, 20.0), (0.95, 25.0, 70.0), (0.99, 300.0, f64::INFINITY)] {
        let net = antel(r).map_err(|e| e.to_string())?;
        let spec = antel_regions(antel_fines(r).expect("reference reliability")).map_err(|e| e.to_string())?;
        let fam = build_families(&net, &spec, &antel_families(), OverlapPolicy::Reject).map_err(|e| e.to_string())?;
        let plan = SamplingPlan { samples: 1_000_000, seed: 1, workers: workers() };
        let crude = crude_estimate(&net, &spec, &plan).map_err(|e| e.to_string())?;
        let (cond, _) = conditioned_estimate(&net, &spec, &fam, &plan, &ConditionedOptions::default())
            .map_err(|e| e.to_string())?;
        let combined = crude.standard_error.hypot(cond.standard_error);
        let gap = (crude.point_estimate - cond.point_estimate).abs();
        let ratio = variance_ratio(&crude, &cond);
        lines.push(format!(
            "r={r}: crude {:.6}, conditioned {:.6}, ratio {ratio:.2}",
            crude.point_estimate, cond.point_estimate
        ));
        if gap > 3.0 * combined {
            failures.push(format!("r={r}: estimates differ by {gap:e} > 3 x {combined:e}"));
        }
        if !(lo..=hi).contains(&ratio) {
            failures.push(format!("r={r}: ratio {ratio:.2} outside [{lo}, {hi}]"));
        }
    }
    if failures.is_empty() {
        Ok(lines.join("; "))
    } else {
        Err(format!("{}; {}", failures.join("; "), lines.join("; ")))
    }
}

fn sampler_law() -> Outcome {
    let raw_all = antel_families();
    let raw = vec![RawRegionSets::default(), raw_all[1].clone(), RawRegionSets::default(), raw_all[3].clone()];
    let mut details = Vec::new();
    for r in [0.9, 0.95] {
        let net = antel(r).map_err(|e| e.to_string())?;
        let spec = antel_regions(antel_fines(r).expect("reference reliability")).map_err(|e| e.to_string())?;
        let fam = build_families(&net, &spec, &raw, OverlapPolicy::Reject).map_err(|e| e.to_string())?;
        let omega = fam.omega().to_vec();
        ensure(omega.len() <= 10, || format!("|Omega| = {}", omega.len()))?;

        let pinned = |s: usize| {
            let up = |e: usize| omega.iter().position(|&x| x == e).is_some_and(|k| s >> k & 1 == 1);
            (raw[1].pathsets[0].iter().all(|&e| up(e)) && raw[1].cutsets[0].iter().all(|&e| !up(e)))
                || raw[3].cutsets.iter().any(|c| c.iter().all(|&e| !up(e)))
        };
        let weight = |s: usize| {
            let k = s.count_ones() as i32;
            r.powi(k) * (1.0 - r).powi(omega.len() as i32 - k)
        };
        let law: Vec<f64> = (0..1usize << omega.len()).map(|s| if pinned(s) { 0.0 } else { weight(s) }).collect();
        let total: f64 = law.iter().sum();

        for mode in [SamplingMode::Table, SamplingMode::Sequential] {
            let sampler = ConditionalSampler::new(&net, &fam, mode, 24).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let mut x = EdgeMask::empty(net.edge_count());
            let mut scratch = SamplerScratch::default();
            let mut counts = vec![0u64; law.len()];
            let draws = 1_000_000;
            for _ in 0..draws {
                sampler.sample_into(&mut rng, &mut x, &mut scratch).map_err(|e| e.to_string())?;
                let s = omega.iter().enumerate().filter(|&(_, &e)| x.contains(e)).fold(0, |acc, (k, _)| acc | 1 << k);
                ensure(!pinned(s) && pinned_region(&fam, &x).is_none(), || format!("r={r} {mode:?}: draw in Z"))?;
                counts[s] += 1;
            }
            let tv: f64 =
                0.5 * counts.iter().zip(&law).map(|(&c, &w)| (c as f64 / draws as f64 - w / total).abs()).sum::<f64>();
            ensure(tv <= 0.01, || format!("r={r} {mode:?}: TV {tv}"))?;
            details.push(format!("r={r} {}: TV {tv:.5}", mode.name()));
        }
    }
    Ok(details.join(", "))
}

fn check_solution(
    net: &Network,
    spec: &RegionSpec,
    sol: &dperf_core::heuristics::HeuristicSolution,
) -> Result<(), String> {
    let mut raw = vec![RawRegionSets::default(); spec.region_count()];
    raw[1] = sol.to_raw();
    build_families(net, spec, &raw, OverlapPolicy::Reject).map_err(|e| e.to_string())?;
    for c in &sol.cutsets {
        for skip in 0..c.len() {
            let smaller: Vec<usize> = c.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &e)| e).collect();
            ensure(!validate_cutset(net, &smaller, Bound::Hops(5)), || format!("cutset {c:?} is not minimal"))?;
        }
    }
    ensure(sol.best_trace.windows(2).all(|w| w[0] <= w[1]), || format!("trace {:?} not monotone", sol.best_trace))
}

const VERSIONS: [&str; 7] = ["PC", "PCP", "PCC", "PCPP", "PCPC", "PCCP", "PCCC"];

fn heuristic_structure() -> Outcome {
    let net = grid1(1).map_err(|e| e.to_string())?;
    let spec = grid1_regions();
    let target = RegionTarget::for_region(&net, &spec, 1).map_err(|e| e.to_string())?;
    let mut nonempty = 0;
    for v in VERSIONS {
        let version: Version = v.parse().map_err(|e: dperf_core::HeuristicError| e.to_string())?;
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sol = run_region_heuristic(&net, target, &version, 5, &mut Iterations(20), &mut rng)
                .map_err(|e| e.to_string())?;
            check_solution(&net, &spec, &sol).map_err(|e| format!("{v} seed {seed}: {e}"))?;
            nonempty += usize::from(sol.probability > 0.0);
        }
    }
    Ok(format!("700 runs valid, {nonempty} with a nonzero probability"))
}

fn heuristic_quality() -> Outcome {
    let net = grid1(1).map_err(|e| e.to_string())?;
    let spec = grid1_regions();
    let results: Vec<(&str, Result<f64, String>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = VERSIONS[3..]
            .iter()
            .map(|&v| {
                let (net, spec) = (&net, &spec);
                scope.spawn(move || {
                    let config = HeuristicConfig {
                        version: v.parse().expect("static version"),
                        lower_version: "PPPP".parse().expect("static version"),
                        upper_version: "CCCC".parse().expect("static version"),
                        max_time: Duration::from_secs(40),
                        max_tries: 5,
                        seed: 1,
                    };
                    let sol = run_region(net, spec, 1, &config).map_err(|e| e.to_string())?;
                    check_solution(net, spec, &sol)?;
                    Ok(sol.probability)
                })
            })
            .collect();
        VERSIONS[3..].iter().copied().zip(handles.into_iter().map(|h| h.join().expect("heuristic thread"))).collect()
    });
    let mut best: f64 = 0.0;
    let mut parts = Vec::new();
    for (v, r) in results {
        let p = r.map_err(|e| format!("{v}: {e}"))?;
        best = best.max(p);
        parts.push(format!("{v} {p:.3e}"));
    }
    ensure(best >= 5e-5, || format!("best {best:e}; {}", parts.join(", ")))?;
    Ok(parts.join(", "))
}

fn cli_point(args: &[&str]) -> Result<(Option<f64>, Option<f64>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dperf")).args(args).env_clear().output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let report: RunReport = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    Ok((report.crude.map(|r| r.point_estimate), report.conditioned.map(|r| r.point_estimate)))
}

fn cli_determinism() -> Outcome {
    let base = [
        "estimate",
        "--graph",
        "antel",
        "--re",
        "0.95",
        "--thresholds",
        "5,7",
        "--fines",
        "0,30,60,120",
        "--sets",
        "table2",
        "--samples",
        "100000",
        "--seed",
        "17",
        "--format",
        "json",
    ];
    let mut runs = 0;
    for mode in ["table", "sequential"] {
        for w in ["1", "2"] {
            let mut args = base.to_vec();
            args.extend_from_slice(&["--mode", mode, "--workers", w]);
            let first = cli_point(&args)?;
            let second = cli_point(&args)?;
            ensure(first == second, || format!("mode {mode}, {w} workers: {first:?} vs {second:?}"))?;
            ensure(first.0.is_some() && first.1.is_some(), || "missing estimate".into())?;
            runs += 2;
        }
    }
    Ok(format!("{runs} invocations, repeated runs bit-identical"))
}
