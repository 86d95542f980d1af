//! Command-line front end: `synth`, `learn`, `validate`, `bench`.
//!
//! Exit codes: 0 success, 1 validation failure, 2 algorithmic stall,
//! 3 input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::builder::{build_traced, CcpgJson, CcpgOutput};
use crate::ci::{CiOracle, DsepTester, GaussianTester, GaussianTesterConfig};
use crate::data::{default_labels, InterventionEntry, RegimeManifest};
use crate::error::{Error, Result};
use crate::graph::{read_dag_json, Dag, Intervention};
use crate::prefix::PrefixStepTrace;
use crate::synth::{self, DEFAULT_WEIGHT_RANGE};
use crate::validate::check_ccpg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_STALL: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ccpg", version, about = "Learn causally consistent partition graphs from CI tests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a ground-truth DAG, SEM and regime data.
    Synth(SynthArgs),
    /// Learn a CCPG from an exact oracle (--dag) or from samples (--data).
    Learn(LearnArgs),
    /// Check a learned CCPG against a ground-truth DAG.
    Validate(ValidateArgs),
    /// Run a benchmark suite and write CSV rows.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Er,
    Instar,
    Chain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InterventionKind {
    None,
    Covered,
    Log2,
}

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: GraphKind,
    #[arg(long)]
    pub n: usize,
    /// Edge probability for `er`.
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rows per regime; 0 writes no CSV files.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = InterventionKind::None)]
    pub interventions: InterventionKind,
    #[arg(long, default_value_t = DEFAULT_WEIGHT_RANGE.0)]
    pub weight_low: f64,
    #[arg(long, default_value_t = DEFAULT_WEIGHT_RANGE.1)]
    pub weight_high: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct LearnArgs {
    /// Ground-truth DAG JSON; answers queries by d-separation.
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    pub dag: Option<PathBuf>,
    /// Regime manifest; answers queries with a Fisher-z test on its
    /// observational CSV.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Regime manifest naming the intervention targets (and, with --data,
    /// their CSV files).
    #[arg(long)]
    pub interventions: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 10)]
    pub min_samples: usize,
    #[arg(long)]
    pub bonferroni: bool,
    /// Also write per-step prefix traces next to the output file.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub dag: PathBuf,
    #[arg(long)]
    pub ccpg: PathBuf,
    #[arg(long)]
    pub interventions: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Observational exact-oracle runs on ER DAGs.
    Counts,
    /// Exact-oracle runs with the covered-edge verifying set.
    Recovery,
    /// Fisher-z runs on in-star linear-Gaussian data.
    Samples,
}

#[derive(Debug, clap::Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
    pub sizes: Vec<usize>,
    /// Seeds as `a..b` (half open) or a comma list.
    #[arg(long, default_value = "0..5")]
    pub seeds: String,
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses arguments, runs the command, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Stall { .. } => EXIT_STALL,
        _ => EXIT_INPUT,
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Synth(a) => synth_cmd(a).map(|_| EXIT_OK),
        Command::Learn(a) => learn_cmd(a).map(|_| EXIT_OK),
        Command::Validate(a) => validate_cmd(a, &mut std::io::stdout()),
        Command::Bench(a) => bench_cmd(a).map(|_| EXIT_OK),
    }
}

fn derived_seed(seed: u64, stream: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stream.wrapping_mul(0xBF58_476D_1CE4_E5B9) + 1)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn synth_cmd(args: &SynthArgs) -> Result<()> {
    if args.n == 0 {
        return Err(Error::Input("--n must be at least 1".into()));
    }
    let g = match args.kind {
        GraphKind::Er => synth::random_dag(args.n, args.p, args.seed)?,
        GraphKind::Instar => synth::in_star(args.n),
        GraphKind::Chain => synth::chain(args.n),
    };
    let model = synth::random_sem(&g, args.weight_low, args.weight_high, derived_seed(args.seed, 1))?;
    let ints = match args.interventions {
        InterventionKind::None => Vec::new(),
        InterventionKind::Covered => synth::covered_edge_verifying_set(&g),
        InterventionKind::Log2 => synth::log2_intervention_set(args.n),
    };

    std::fs::create_dir_all(&args.out)?;
    let labels = default_labels(args.n);
    write_json(&args.out.join("dag.json"), &g.to_json(Some(&labels)))?;
    write_json(&args.out.join("sem.json"), &model.to_json())?;

    let mut manifest = RegimeManifest::default();
    if args.samples > 0 {
        let obs = synth::sample(&model, args.samples, derived_seed(args.seed, 2))?;
        obs.write_csv(&args.out.join("observational.csv"))?;
        manifest.observational = Some("observational.csv".into());
    }
    for i in &ints {
        let path = if args.samples > 0 {
            let name = format!("intervention_{}.csv", i.id);
            let data = synth::sample_intervened(&model, i, args.samples, derived_seed(args.seed, 100 + i.id as u64))?;
            data.write_csv(&args.out.join(&name))?;
            Some(name)
        } else {
            None
        };
        manifest.interventions.push(InterventionEntry { targets: i.targets.to_vec(), path });
    }
    write_json(&args.out.join("manifest.json"), &manifest)?;
    Ok(())
}

fn read_interventions(path: Option<&Path>) -> Result<(Vec<Intervention>, Option<(RegimeManifest, PathBuf)>)> {
    match path {
        None => Ok((Vec::new(), None)),
        Some(p) => {
            let (m, base) = RegimeManifest::read(p)?;
            Ok((m.interventions(), Some((m, base))))
        }
    }
}

#[derive(Serialize)]
struct TraceFile<'a> {
    steps: &'a [PrefixStepTrace],
}

/// Runs the learner and writes the CCPG JSON (and optionally the trace).
pub fn learn_cmd(args: &LearnArgs) -> Result<CcpgOutput> {
    let (ints, int_manifest) = read_interventions(args.interventions.as_deref())?;
    let result = if let Some(dag_path) = &args.dag {
        let (g, _) = read_dag_json(dag_path)?;
        for i in &ints {
            g.check_set(&i.targets)?;
        }
        let mut oracle = CiOracle::new(DsepTester::new(g, &ints)?);
        build_traced(&mut oracle, &ints)?
    } else {
        let data_path = args
            .data
            .as_ref()
            .ok_or_else(|| Error::Input("either --dag or --data is required".into()))?;
        let (manifest, base) = RegimeManifest::read(data_path)?;
        let obs = manifest.load_observational(&base)?;
        let regimes = match &int_manifest {
            Some((m, b)) => m.load_interventional(b)?,
            None => Vec::new(),
        };
        let cfg = GaussianTesterConfig {
            alpha: args.alpha,
            min_samples: args.min_samples,
            bonferroni: args.bonferroni,
        };
        let mut oracle = CiOracle::new(GaussianTester::new(&obs, &regimes, cfg)?);
        build_traced(&mut oracle, &ints)?
    };
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_json(&args.out, &result.output.to_json())?;
    if args.trace {
        write_json(&trace_path(&args.out), &TraceFile { steps: &result.steps })?;
    }
    Ok(result.output)
}

/// `dir/ccpg.json` -> `dir/ccpg.trace.json`.
pub fn trace_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "ccpg".into());
    out.with_file_name(format!("{stem}.trace.json"))
}

pub fn validate_cmd(args: &ValidateArgs, sink: &mut impl Write) -> Result<i32> {
    let (g, _) = read_dag_json(&args.dag)?;
    let text = std::fs::read_to_string(&args.ccpg)?;
    let out: CcpgOutput = serde_json::from_str::<CcpgJson>(&text)?.into();
    let (ints, _) = read_interventions(args.interventions.as_deref())?;
    let report = check_ccpg(&g, &out, args.interventions.as_ref().map(|_| ints.as_slice()))?;
    writeln!(sink, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_INVALID })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub seed: u64,
    pub ci_unique: u64,
    pub ci_total: u64,
    pub recovered: u8,
    pub wall_ms: u128,
}

pub fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let bad = || Error::Input(format!("bad seed list {spec:?}"));
    if let Some((a, b)) = spec.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        return Ok((a..b).collect());
    }
    spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

/// One benchmark run; a stall under the sample tester counts as not
/// recovered.
pub fn bench_one(suite: Suite, n: usize, seed: u64, args: &BenchArgs) -> Result<BenchRow> {
    let start = Instant::now();
    let (output, recovered) = match suite {
        Suite::Counts => {
            let g = synth::random_dag(n, args.p, seed)?;
            let mut oracle = CiOracle::new(DsepTester::observational(g.clone()));
            let out = build_traced(&mut oracle, &[])?.output;
            let ok = check_ccpg(&g, &out, None)?.passed;
            (Some(out), ok)
        }
        Suite::Recovery => {
            let g = synth::random_dag(n, args.p, seed)?;
            let ints = synth::covered_edge_verifying_set(&g);
            let mut oracle = CiOracle::new(DsepTester::new(g.clone(), &ints)?);
            let out = build_traced(&mut oracle, &ints)?.output;
            let ok = out.equals_dag(&g);
            (Some(out), ok)
        }
        Suite::Samples => {
            let g = synth::in_star(n);
            let (lo, hi) = DEFAULT_WEIGHT_RANGE;
            let model = synth::random_sem(&g, lo, hi, derived_seed(seed, 1))?;
            let data = synth::sample(&model, args.samples, derived_seed(seed, 2))?;
            let cfg = GaussianTesterConfig { alpha: args.alpha, ..Default::default() };
            let mut oracle = CiOracle::new(GaussianTester::new(&data, &[], cfg)?);
            match build_traced(&mut oracle, &[]) {
                Ok(r) => {
                    let ok = r.output.equals_dag(&g);
                    (Some(r.output), ok)
                }
                Err(Error::Stall { .. }) => (None, false),
                Err(e) => return Err(e),
            }
        }
    };
    let (ci_unique, ci_total) = output.map_or((0, 0), |o| (o.ci_unique, o.ci_total));
    Ok(BenchRow {
        n,
        seed,
        ci_unique,
        ci_total,
        recovered: recovered as u8,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Worker count from `CCPG_THREADS`, defaulting to rayon's choice.
pub fn thread_cap() -> Option<usize> {
    std::env::var("CCPG_THREADS").ok()?.trim().parse().ok().filter(|&t| t > 0)
}

pub fn bench_rows(args: &BenchArgs) -> Result<Vec<BenchRow>> {
    let seeds = parse_seeds(&args.seeds)?;
    let jobs: Vec<(usize, u64)> = args
        .sizes
        .iter()
        .flat_map(|&n| seeds.iter().map(move |&s| (n, s)))
        .collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = thread_cap() {
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    let mut rows = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, s)| bench_one(args.suite, n, s, args))
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by_key(|r| (r.n, r.seed));
    Ok(rows)
}

pub fn bench_cmd(args: &BenchArgs) -> Result<Vec<BenchRow>> {
    let rows = bench_rows(args)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(&args.out)?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(rows)
}

/// Convenience for callers holding a graph in memory.
pub fn write_dag(path: &Path, g: &Dag) -> Result<()> {
    write_json(path, &g.to_json(None))
}
