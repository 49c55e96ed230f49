//! Command-line surface.

use std::io::Write as _;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dperf_core::events::DEFAULT_TABLE_CAP;
use dperf_core::exact::DEFAULT_ENUMERATION_CAP;
use dperf_core::heuristics::Version;
use dperf_core::{build_families, EdgeSetFamilies, Network, OverlapPolicy, RawRegionSets, RegionSpec, SamplingMode};

use crate::error::{Error, Result};
use crate::estimators::{conditioned_estimate, crude_estimate, ConditionedOptions, SamplingPlan};
use crate::heuristic::{run_all_regions, run_region, solutions_to_raw, HeuristicConfig};
use crate::io::{
    families_to_json, parse_families, parse_graph, parse_list, parse_regions, read_to_string, region_spec, write_string,
};
use crate::oracle::{oracle_report, parallel_exact};
use crate::report::{write_oracle, HeuristicSummary, RunReport};
use crate::{fixtures, io};

#[derive(Debug, Parser)]
#[command(name = "dperf", version, about = "Hop-distance performability estimation on unreliable networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate E[Φ] by crude and/or conditioned Monte Carlo.
    #[command(visible_alias = "run")]
    Estimate(EstimateArgs),
    /// Exact values by enumerating every configuration.
    Oracle(OracleArgs),
    /// Build pathsets and cutsets with the randomized heuristics.
    Heuristic(HeuristicArgs),
    /// Write a generated network in the graph file format.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Graph file, or `antel` for the built-in backbone.
    #[arg(long)]
    pub graph: Option<String>,
    /// `grid:K`, or `extend:EXTRA:PER_NODE` to grow `--graph` by preferential attachment.
    #[arg(long)]
    pub generator: Option<String>,
    /// Comma-separated terminal node ids, replacing the graph's own.
    #[arg(long)]
    pub terminals: Option<String>,
    /// Sets every edge reliability.
    #[arg(long = "re")]
    pub reliability: Option<f64>,
    /// `MIN,MODE,MAX`: draws every edge reliability from a triangular law.
    #[arg(long)]
    pub triangular: Option<String>,
    /// Seed for generators and reliability draws.
    #[arg(long, default_value_t = 1, env = "DPERF_GRAPH_SEED")]
    pub graph_seed: u64,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    /// Region spec file (text or JSON).
    #[arg(long, conflicts_with_all = ["thresholds", "fines"])]
    pub regions: Option<PathBuf>,
    /// Comma-separated hop thresholds.
    #[arg(long)]
    pub thresholds: Option<String>,
    /// Comma-separated Φ values; one extra value adds a disconnection region.
    #[arg(long, alias = "phi")]
    pub fines: Option<String>,
}

#[derive(Debug, Args)]
pub struct SetArgs {
    /// Families file, or `table2` for the built-in ANTEL sets.
    #[arg(long)]
    pub sets: Option<String>,
    /// Accept same-region overlaps (table sampling only).
    #[arg(long)]
    pub allow_overlap: bool,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Version for interior regions, e.g. PCCP.
    #[arg(long = "heuristic")]
    pub version: Option<String>,
    #[arg(long, default_value = "PPPP")]
    pub lower_version: String,
    #[arg(long, default_value = "CCCC")]
    pub upper_version: String,
    /// Seconds per region.
    #[arg(long, default_value_t = 40.0, env = "DPERF_MAX_TIME")]
    pub max_time: f64,
    #[arg(long, default_value_t = 5, env = "DPERF_MAX_TRIES")]
    pub max_tries: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Crude,
    Conditioned,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Table,
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text, env = "DPERF_FORMAT")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub regions: RegionArgs,
    #[command(flatten)]
    pub sets: SetArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto, env = "DPERF_MODE")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 1_000_000, env = "DPERF_SAMPLES")]
    pub samples: u64,
    #[arg(long, default_value_t = 1, env = "DPERF_SEED")]
    pub seed: u64,
    /// Defaults to the available parallelism.
    #[arg(long, env = "DPERF_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TABLE_CAP, env = "DPERF_TABLE_CAP")]
    pub table_cap: usize,
    /// Also enumerate exactly (small graphs only).
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub regions: RegionArgs,
    #[command(flatten)]
    pub sets: SetArgs,
    #[arg(long, env = "DPERF_WORKERS")]
    pub workers: Option<usize>,
    /// Largest edge count to enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP, env = "DPERF_ENUMERATION_CAP")]
    pub cap: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HeuristicArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub regions: RegionArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Single region to build; all regions when absent.
    #[arg(long)]
    pub region: Option<usize>,
    #[arg(long, default_value_t = 1, env = "DPERF_SEED")]
    pub seed: u64,
    /// Families file to write; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn workers_or_default(w: Option<usize>) -> usize {
    w.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn load_network(args: &GraphArgs) -> Result<Network> {
    let base = match args.graph.as_deref() {
        Some("antel") => Some(fixtures::antel(0.9)?),
        Some(path) => Some(parse_graph(&read_to_string(path.as_ref())?, path)?),
        None => None,
    };
    let mut net = match (args.generator.as_deref(), base) {
        (Some(gen), base) => generate(gen, base, args)?,
        (None, Some(net)) => net,
        (None, None) => return Err(Error::Invalid("give --graph or --generator".into())),
    };
    if let Some(t) = &args.terminals {
        net = net.with_terminals(parse_list(t, "terminal")?)?;
    }
    if let Some(r) = args.reliability {
        net = net.with_reliabilities(|_, _| r)?;
    }
    if let Some(tri) = &args.triangular {
        let v: Vec<f64> = parse_list(tri, "triangular parameter")?;
        let [min, mode, max] = v[..] else {
            return Err(Error::Invalid("--triangular takes MIN,MODE,MAX".into()));
        };
        net = fixtures::triangular_reliabilities(&net, min, mode, max, args.graph_seed)?;
    }
    Ok(net)
}

fn generate(spec: &str, base: Option<Network>, args: &GraphArgs) -> Result<Network> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num =
        |s: &str| s.parse::<usize>().map_err(|_| Error::Invalid(format!("bad number {s:?} in generator {spec:?}")));
    match parts[..] {
        ["grid", k] => fixtures::generate_grid(num(k)?, args.reliability.unwrap_or(0.9)),
        ["extend", extra, per] => {
            let base = base.ok_or_else(|| Error::Invalid("extend needs a base --graph".into()))?;
            let r = args.reliability.unwrap_or(0.9);
            fixtures::generate_preferential_extension(&base, num(extra)?, num(per)?, r, args.graph_seed)
        }
        _ => Err(Error::Invalid(format!("unknown generator {spec:?}; expected grid:K or extend:EXTRA:PER_NODE"))),
    }
}

pub fn load_regions(args: &RegionArgs) -> Result<RegionSpec> {
    if let Some(path) = &args.regions {
        return parse_regions(&read_to_string(path)?, &path.display().to_string());
    }
    let fines = args.fines.as_deref().ok_or_else(|| Error::Invalid("give --regions or --fines".into()))?;
    let thresholds: Vec<u32> = args.thresholds.as_deref().map_or(Ok(Vec::new()), |t| parse_list(t, "threshold"))?;
    region_spec(&thresholds, parse_list(fines, "phi value")?)
}

fn load_raw_sets(args: &SetArgs, spec: &RegionSpec) -> Result<Option<Vec<RawRegionSets>>> {
    match args.sets.as_deref() {
        None => Ok(None),
        Some("table2") => Ok(Some(fixtures::antel_families())),
        Some(path) => Ok(Some(parse_families(&read_to_string(path.as_ref())?, path, spec.region_count())?)),
    }
}

fn policy(args: &SetArgs) -> OverlapPolicy {
    if args.allow_overlap {
        OverlapPolicy::Allow
    } else {
        OverlapPolicy::Reject
    }
}

fn heuristic_config(b: &BudgetArgs, seed: u64) -> Result<Option<HeuristicConfig>> {
    let Some(version) = &b.version else { return Ok(None) };
    if !(b.max_time.is_finite() && b.max_time >= 0.0) {
        return Err(Error::Invalid(format!("bad --max-time {}", b.max_time)));
    }
    Ok(Some(HeuristicConfig {
        version: version.parse()?,
        lower_version: b.lower_version.parse()?,
        upper_version: b.upper_version.parse()?,
        max_time: Duration::from_secs_f64(b.max_time),
        max_tries: b.max_tries,
        seed,
    }))
}

fn emit(output: &OutputArgs, report: &RunReport) -> Result<()> {
    let body = match output.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    write_out(output.out.as_ref(), &body)
}

fn write_out(path: Option<&PathBuf>, body: &str) -> Result<()> {
    match path {
        Some(p) => write_string(p, body),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

pub fn estimate(args: &EstimateArgs) -> Result<RunReport> {
    let net = load_network(&args.graph)?;
    let spec = load_regions(&args.regions)?;
    let plan = SamplingPlan { samples: args.samples, seed: args.seed, workers: workers_or_default(args.workers) };
    let mut report = RunReport::new(&net, &spec);

    let want_conditioned = args.method != MethodArg::Crude;
    let mut raw = load_raw_sets(&args.sets, &spec)?;
    if raw.is_none() && want_conditioned {
        let config = heuristic_config(&args.budget, args.seed)?
            .ok_or_else(|| Error::Invalid("conditioned estimation needs --sets or --heuristic".into()))?;
        let solutions = run_all_regions(&net, &spec, &config)?;
        for s in &solutions {
            let target = dperf_core::heuristics::RegionTarget::for_region(&net, &spec, s.region)?;
            report.heuristic.push(HeuristicSummary::new(s, config.version_for(&target).to_string()));
        }
        raw = Some(solutions_to_raw(&spec, &solutions));
    }
    let families = match &raw {
        Some(r) => build_families(&net, &spec, r, policy(&args.sets))?,
        None => EdgeSetFamilies::empty(&spec),
    };

    if args.method != MethodArg::Conditioned {
        report.crude = Some(crude_estimate(&net, &spec, &plan)?);
    }
    if want_conditioned {
        let mode = match args.mode {
            ModeArg::Auto => None,
            ModeArg::Table => Some(SamplingMode::Table),
            ModeArg::Sequential => Some(SamplingMode::Sequential),
        };
        let options = ConditionedOptions { mode, table_cap: args.table_cap };
        let (r, warnings) = conditioned_estimate(&net, &spec, &families, &plan, &options)?;
        report.conditioned = Some(r);
        report.warnings.extend(warnings.iter().map(ToString::to_string));
    }
    report.compare();
    if args.oracle {
        let fam = raw.is_some().then_some(&families);
        let exact = parallel_exact(&net, &spec, fam, plan.workers, DEFAULT_ENUMERATION_CAP)?;
        report.exact = Some(oracle_report(&spec, &exact)?);
    }
    Ok(report)
}

pub fn oracle(args: &OracleArgs) -> Result<RunReport> {
    let net = load_network(&args.graph)?;
    let spec = load_regions(&args.regions)?;
    let families = load_raw_sets(&args.sets, &spec)?
        .map(|raw| build_families(&net, &spec, &raw, policy(&args.sets)))
        .transpose()?;
    let exact = parallel_exact(&net, &spec, families.as_ref(), workers_or_default(args.workers), args.cap)?;
    let mut report = RunReport::new(&net, &spec);
    report.exact = Some(oracle_report(&spec, &exact)?);
    Ok(report)
}

/// Returns the families file text and a human-readable summary.
pub fn heuristic(args: &HeuristicArgs) -> Result<(String, String)> {
    let net = load_network(&args.graph)?;
    let spec = load_regions(&args.regions)?;
    let config = heuristic_config(&args.budget, args.seed)?
        .ok_or_else(|| Error::Invalid("--heuristic VERSION is required".into()))?;
    let solutions = match args.region {
        Some(i) => vec![run_region(&net, &spec, i, &config)?],
        None => run_all_regions(&net, &spec, &config)?,
    };
    let raw = solutions_to_raw(&spec, &solutions);
    build_families(&net, &spec, &raw, OverlapPolicy::Reject)?;
    let mut summary = String::new();
    for s in &solutions {
        let target = dperf_core::heuristics::RegionTarget::for_region(&net, &spec, s.region)?;
        let version: &Version = config.version_for(&target);
        summary += &format!(
            "region {} ({version}): Pr = {:e}, {} pathsets, {} cutsets, {} iterations\n",
            s.region,
            s.probability,
            s.pathsets.len(),
            s.cutsets.len(),
            s.iterations
        );
    }
    Ok((families_to_json(&raw) + "\n", summary))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Estimate(args) => {
            let report = estimate(&args)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            emit(&args.output, &report)
        }
        Command::Oracle(args) => {
            let report = oracle(&args)?;
            match args.output.format {
                Format::Json => emit(&args.output, &report),
                Format::Text => {
                    let mut text = String::new();
                    write_oracle(&mut text, report.exact.as_ref().expect("oracle fills exact"));
                    write_out(args.output.out.as_ref(), &text)
                }
            }
        }
        Command::Heuristic(args) => {
            let (families, summary) = heuristic(&args)?;
            eprint!("{summary}");
            write_out(args.out.as_ref(), &families)
        }
        Command::Generate(args) => {
            let net = load_network(&args.graph)?;
            write_out(args.out.as_ref(), &io::write_graph(&net))
        }
    }
}
