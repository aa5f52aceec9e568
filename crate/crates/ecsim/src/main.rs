//! `ecsim` — cost analysis of TTL-cache insertion policies under pay-per-use
//! storage and bandwidth pricing.
//!
//! Subcommands: `analyze` (steady-state ratio curves for one distribution),
//! `multifile` (aggregate curves over a Zipf catalog), `simulate` (trace
//! replay under several cost models), `adversary` (worst-case ratio checks
//! against the proven bounds), and `gen` (synthetic traces). Reports are CSV
//! by default and JSON with `--json`; every subcommand is deterministic for
//! a fixed `--seed`.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid parameters or input data,
//! 3 internal/output failure.

use std::fmt::{self, Write as _};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand};
use elastic_cache::adversary::{self, AdversaryConfig};
use elastic_cache::analytic::{ratio_sweep, CurvePolicy, SweepGrid, SweepRow};
use elastic_cache::multifile::{multifile_sweep, simulate_multifile};
use elastic_cache::trace_io::{generate_trace, generate_zipf_trace, load_trace, read_trace, write_trace};
use elastic_cache::{
    parallel, BandSpec, CostParams, DistSpec, ModelError, PolicySpec, RequestTrace, SimOptions,
    TraceCostModel, ZipfCatalog,
};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "ecsim",
    version,
    about = "TTL-cache insertion policies under elastic storage/bandwidth pricing",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit the report as JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads for sweeps and simulations (default: one per core).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state cost-ratio curves for one inter-request distribution.
    Analyze(AnalyzeArgs),
    /// Aggregate cost-ratio curves over a Zipf-popularity catalog.
    Multifile(MultifileArgs),
    /// Replay a trace (from a file or generated) under several cost models.
    Simulate(SimulateArgs),
    /// Worst-case competitive-ratio checks against the proven bounds.
    Adversary(AdversaryArgs),
    /// Generate a synthetic request trace.
    Gen(GenArgs),
}

/// Cost-model parameters shared by the analysis subcommands.
#[derive(Args)]
struct CostArgs {
    /// Remote fetch cost per unit size, in storage-cost-per-time units.
    #[arg(long = "R", default_value_t = 1.0, value_name = "COST")]
    remote: f64,
    /// Eviction TTL (default: R).
    #[arg(long, value_name = "TIME")]
    ttl: Option<f64>,
    /// Qualifying window of the dual policy (default: the TTL).
    #[arg(long, value_name = "TIME")]
    window: Option<f64>,
}

impl CostArgs {
    /// Validates and applies the `window = ttl = R` default chain.
    fn resolve(&self) -> Result<(f64, f64, f64), ModelError> {
        CostParams::new(self.remote)?;
        let ttl = self.ttl.unwrap_or(self.remote);
        if !ttl.is_finite() || ttl < 0.0 {
            return Err(ModelError::Parameter(format!(
                "ttl must be non-negative and finite, got {ttl}"
            )));
        }
        let window = self.window.unwrap_or(ttl);
        if !window.is_finite() || window < 0.0 {
            return Err(ModelError::Parameter(format!(
                "window must be non-negative and finite, got {window}"
            )));
        }
        Ok((self.remote, ttl, window))
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Distribution family with the rate swept by the grid: exp:auto,
    /// erlang:<k>,auto, det:auto, or pareto:<alpha>,auto.
    #[arg(long)]
    dist: DistSpec,
    #[command(flatten)]
    cost: CostArgs,
    /// Comma-separated policies: offline, baseline, always:<M>, window:<M>,
    /// dual:2.
    #[arg(long, value_delimiter = ',', default_values_t = default_policies())]
    policies: Vec<PolicyArg>,
    /// Rate grid as min,max,points (log-spaced).
    #[arg(long, default_value_t = GridArg::default(), value_name = "MIN,MAX,POINTS")]
    grid: GridArg,
}

#[derive(Args)]
struct MultifileArgs {
    /// Distribution family for per-file gaps: exp:auto, erlang:<k>,auto,
    /// det:auto, or pareto:<alpha>,auto.
    #[arg(long, default_value = "exp:auto")]
    dist: DistSpec,
    #[command(flatten)]
    cost: CostArgs,
    /// Comma-separated policies: offline, baseline, always:<M>, window:<M>,
    /// dual:2.
    #[arg(long, value_delimiter = ',', default_values_t = default_policies())]
    policies: Vec<PolicyArg>,
    /// Grid of per-file average rates as min,max,points (log-spaced).
    #[arg(long, default_value_t = GridArg::default(), value_name = "MIN,MAX,POINTS")]
    grid: GridArg,
    /// Catalog size.
    #[arg(long, default_value_t = 1_000_000)]
    files: usize,
    /// Zipf popularity exponent.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Trace file to replay ('-' reads stdin); omit to generate one.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    #[command(flatten)]
    cost: CostArgs,
    /// Comma-separated cost models: offline, baseline, always:<M>,
    /// window:<M>, dual:2.
    #[arg(long, value_delimiter = ',', default_values_t = default_policies())]
    policies: Vec<PolicyArg>,
    /// Request-count thresholds splitting objects into three bands.
    #[arg(long, default_value_t = BandArg::default(), value_name = "LOW,HIGH")]
    bands: BandArg,
    /// Also write the per-band cost-share breakdown CSV to this file.
    #[arg(long, value_name = "PATH")]
    band_out: Option<PathBuf>,
    /// Accounting horizon (default: the last trace timestamp, or the
    /// generation horizon when generating).
    #[arg(long, value_name = "TIME")]
    horizon: Option<f64>,
    /// Clip cached intervals at the horizon instead of letting each
    /// object's final TTL interval run past it.
    #[arg(long)]
    truncate_at_horizon: bool,
    /// Catalog size for a generated trace.
    #[arg(long, default_value_t = 10_000)]
    files: usize,
    /// Zipf popularity exponent for a generated trace.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Gap-distribution family for a generated trace (rates come from
    /// --rate and the Zipf weights).
    #[arg(long, default_value = "exp:auto")]
    dist: DistSpec,
    /// Average requests per TTL window per file for a generated trace.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Seed for the generated trace.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AdversaryArgs {
    #[command(flatten)]
    cost: CostArgs,
    /// Comma-separated online policies: always:<M>, window:<M>, dual:2.
    #[arg(long, value_delimiter = ',', default_values_t = default_online_policies())]
    policies: Vec<PolicyArg>,
    /// Batches in the constructed worst-case trace.
    #[arg(long, default_value_t = 1000)]
    batches: u32,
    /// Random adversarial trials per policy (0 skips the search).
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Base seed for the random search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    /// Gap distribution: concrete (e.g. exp:2, det:1) with --requests, or a
    /// family (e.g. exp:auto) with --horizon.
    #[arg(long)]
    dist: DistSpec,
    /// Request count for a single-object trace.
    #[arg(long, conflicts_with = "horizon")]
    requests: Option<usize>,
    /// Time horizon for a Zipf-catalog trace.
    #[arg(long, value_name = "TIME")]
    horizon: Option<f64>,
    /// Catalog size (with --horizon).
    #[arg(long, default_value_t = 10_000)]
    files: usize,
    /// Zipf popularity exponent (with --horizon).
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Average requests per rate window per file (with --horizon).
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Rate window that --rate is measured against (with --horizon).
    #[arg(long, default_value_t = 1.0, value_name = "TIME")]
    ttl: f64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A policy named on the command line, before cost parameters are attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PolicyArg {
    Offline,
    Baseline,
    Always(u32),
    Window(u32),
    Dual,
}

fn default_policies() -> Vec<PolicyArg> {
    vec![
        PolicyArg::Offline,
        PolicyArg::Baseline,
        PolicyArg::Always(1),
        PolicyArg::Always(2),
        PolicyArg::Window(2),
        PolicyArg::Window(4),
        PolicyArg::Dual,
    ]
}

fn default_online_policies() -> Vec<PolicyArg> {
    vec![
        PolicyArg::Always(1),
        PolicyArg::Always(2),
        PolicyArg::Window(2),
        PolicyArg::Window(4),
        PolicyArg::Dual,
    ]
}

impl FromStr for PolicyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let err = || {
            format!(
                "unknown policy {s:?}; expected offline, baseline, always:<M>, \
                 window:<M>, or dual:2"
            )
        };
        match s.trim() {
            "offline" => Ok(Self::Offline),
            "baseline" => Ok(Self::Baseline),
            "dual:2" => Ok(Self::Dual),
            other => {
                let (kind, m) = other.split_once(':').ok_or_else(err)?;
                let m: u32 = m.trim().parse().map_err(|_| err())?;
                if m < 1 {
                    return Err(format!("policy {s:?}: M must be >= 1"));
                }
                match kind.trim() {
                    "always" => Ok(Self::Always(m)),
                    "window" => Ok(Self::Window(m)),
                    _ => Err(err()),
                }
            }
        }
    }
}

impl fmt::Display for PolicyArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Offline => write!(f, "offline"),
            Self::Baseline => write!(f, "baseline"),
            Self::Always(m) => write!(f, "always:{m}"),
            Self::Window(m) => write!(f, "window:{m}"),
            Self::Dual => write!(f, "dual:2"),
        }
    }
}

impl PolicyArg {
    fn curve(self) -> CurvePolicy {
        match self {
            Self::Offline => CurvePolicy::Offline,
            Self::Baseline => CurvePolicy::StaticBaseline,
            Self::Always(m) => CurvePolicy::AlwaysOnMth { m },
            Self::Window(m) => CurvePolicy::SingleWindowMth { m },
            Self::Dual => CurvePolicy::DualWindow2nd,
        }
    }

    fn model(self, ttl: f64, window: f64) -> Result<TraceCostModel, ModelError> {
        Ok(match self {
            Self::Offline => TraceCostModel::OfflineOptimal,
            Self::Baseline => TraceCostModel::StaticOracle,
            Self::Always(m) => TraceCostModel::Policy(PolicySpec::always_on_mth(m, ttl)?),
            Self::Window(m) => TraceCostModel::Policy(PolicySpec::single_window_mth(m, ttl)?),
            Self::Dual => TraceCostModel::Policy(PolicySpec::dual_window_2nd(window, ttl)?),
        })
    }

    fn online(self, ttl: f64, window: f64) -> Result<PolicySpec, ModelError> {
        match self {
            Self::Offline | Self::Baseline => Err(ModelError::Parameter(format!(
                "{self} has no worst-case bound to check; pick always:<M>, \
                 window:<M>, or dual:2"
            ))),
            Self::Always(m) => PolicySpec::always_on_mth(m, ttl),
            Self::Window(m) => PolicySpec::single_window_mth(m, ttl),
            Self::Dual => PolicySpec::dual_window_2nd(window, ttl),
        }
    }
}

/// A `min,max,points` grid argument.
#[derive(Debug, Clone, Copy)]
struct GridArg {
    min: f64,
    max: f64,
    points: usize,
}

impl Default for GridArg {
    fn default() -> Self {
        Self { min: 1e-2, max: 1e3, points: 121 }
    }
}

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let err = || format!("grid {s:?} is not of the form min,max,points");
        let parts: Vec<&str> = s.split(',').collect();
        let [min, max, points] = parts.as_slice() else {
            return Err(err());
        };
        Ok(Self {
            min: min.trim().parse().map_err(|_| err())?,
            max: max.trim().parse().map_err(|_| err())?,
            points: points.trim().parse().map_err(|_| err())?,
        })
    }
}

impl fmt::Display for GridArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.min, self.max, self.points)
    }
}

impl GridArg {
    fn to_grid(self) -> Result<SweepGrid, ModelError> {
        SweepGrid::new(self.min, self.max, self.points)
    }
}

/// A `low,high` band-threshold argument.
#[derive(Debug, Clone, Copy)]
struct BandArg {
    low: u64,
    high: u64,
}

impl Default for BandArg {
    fn default() -> Self {
        Self { low: 3, high: 20 }
    }
}

impl FromStr for BandArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let err = || format!("bands {s:?} are not of the form low,high");
        let (low, high) = s.split_once(',').ok_or_else(err)?;
        Ok(Self {
            low: low.trim().parse().map_err(|_| err())?,
            high: high.trim().parse().map_err(|_| err())?,
        })
    }
}

impl fmt::Display for BandArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.low, self.high)
    }
}

/// An error carrying the process exit code it should produce.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

type CliResult<T> = Result<T, Failure>;

/// Bad parameters or input data (exit 2).
fn validation(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, error: err.into() }
}

/// Unexpected failure, e.g. the output path cannot be written (exit 3).
fn internal(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 3, error: err.into() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    parallel::configure_threads(cli.threads).map_err(validation)?;
    match &cli.command {
        Command::Analyze(args) => cmd_analyze(&cli, args),
        Command::Multifile(args) => cmd_multifile(&cli, args),
        Command::Simulate(args) => cmd_simulate(&cli, args),
        Command::Adversary(args) => cmd_adversary(&cli, args),
        Command::Gen(args) => cmd_gen(&cli, args),
    }
}

fn open_output(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    match out {
        Some(path) => File::create(path)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| internal(anyhow!("cannot create {}: {e}", path.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

/// A closed pipe (e.g. piping into `head`) is not a failure.
fn finish_write(result: io::Result<()>) -> CliResult<()> {
    match result {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(internal(anyhow!("cannot write output: {e}"))),
    }
}

fn emit_text(cli: &Cli, text: &str) -> CliResult<()> {
    let mut w = open_output(&cli.out)?;
    finish_write(w.write_all(text.as_bytes()).and_then(|()| w.flush()))
}

fn emit_json(cli: &Cli, value: &serde_json::Value) -> CliResult<()> {
    let mut w = open_output(&cli.out)?;
    if let Err(e) = serde_json::to_writer_pretty(&mut w, value) {
        return finish_write(Err(io::Error::from(e)));
    }
    finish_write(writeln!(w).and_then(|()| w.flush()))
}

/// Requires a swept family (`exp:auto` style) where the grid sets the rate.
fn swept_family(spec: DistSpec) -> Result<elastic_cache::DistFamily, Failure> {
    match spec {
        DistSpec::Swept(family) => Ok(family),
        DistSpec::Fixed(d) => Err(validation(anyhow!(
            "the rate comes from the grid here; give a family like exp:auto \
             instead of {d}"
        ))),
    }
}

fn sweep_csv(labels: &[String], rows: &[SweepRow]) -> String {
    let mut s = String::from("rate");
    for label in labels {
        s.push(',');
        s.push_str(label);
    }
    s.push('\n');
    for row in rows {
        write!(s, "{}", row.rate).expect("string writes cannot fail");
        for ratio in &row.ratios {
            write!(s, ",{ratio}").expect("string writes cannot fail");
        }
        s.push('\n');
    }
    s
}

fn sweep_json(rows: &[SweepRow], labels: &[String]) -> Vec<serde_json::Value> {
    rows.iter()
        .map(|row| {
            let ratios: serde_json::Map<String, serde_json::Value> = labels
                .iter()
                .zip(&row.ratios)
                .map(|(l, r)| (l.clone(), json!(r)))
                .collect();
            json!({ "rate": row.rate, "ratios": ratios })
        })
        .collect()
}

fn cmd_analyze(cli: &Cli, args: &AnalyzeArgs) -> CliResult<()> {
    let family = swept_family(args.dist)?;
    let (remote, ttl, window) = args.cost.resolve().map_err(validation)?;
    let grid = args.grid.to_grid().map_err(validation)?;
    let policies: Vec<CurvePolicy> = args.policies.iter().map(|p| p.curve()).collect();
    let rows = ratio_sweep(family, remote, ttl, window, &policies, &grid).map_err(validation)?;
    let labels: Vec<String> = policies.iter().map(CurvePolicy::label).collect();
    if cli.json {
        emit_json(
            cli,
            &json!({
                "command": "analyze",
                "dist": family.to_string(),
                "remote": remote,
                "ttl": ttl,
                "window": window,
                "policies": labels,
                "rows": sweep_json(&rows, &labels),
            }),
        )
    } else {
        emit_text(cli, &sweep_csv(&labels, &rows))
    }
}

fn cmd_multifile(cli: &Cli, args: &MultifileArgs) -> CliResult<()> {
    let family = swept_family(args.dist)?;
    let (remote, ttl, window) = args.cost.resolve().map_err(validation)?;
    let grid = args.grid.to_grid().map_err(validation)?;
    // The total rate is a placeholder; the sweep rescales it per grid point.
    let catalog = ZipfCatalog::new(args.files, args.gamma, 1.0, family).map_err(validation)?;
    let policies: Vec<CurvePolicy> = args.policies.iter().map(|p| p.curve()).collect();
    let rows =
        multifile_sweep(&catalog, remote, ttl, window, &policies, &grid).map_err(validation)?;
    let labels: Vec<String> = policies.iter().map(CurvePolicy::label).collect();
    if cli.json {
        emit_json(
            cli,
            &json!({
                "command": "multifile",
                "dist": family.to_string(),
                "remote": remote,
                "ttl": ttl,
                "window": window,
                "files": args.files,
                "gamma": args.gamma,
                "policies": labels,
                "rows": sweep_json(&rows, &labels),
            }),
        )
    } else {
        emit_text(cli, &sweep_csv(&labels, &rows))
    }
}

fn load_or_generate(
    args: &SimulateArgs,
    ttl: f64,
) -> CliResult<(RequestTrace, Option<f64>, serde_json::Value)> {
    match &args.trace {
        Some(path) => {
            let trace = if path.as_os_str() == "-" {
                read_trace(io::stdin().lock())
            } else {
                load_trace(path)
            }
            .map_err(validation)?;
            Ok((trace, args.horizon, json!({ "trace": path.display().to_string() })))
        }
        None => {
            let family = swept_family(args.dist)?;
            if ttl <= 0.0 {
                return Err(validation(anyhow!(
                    "generating a trace needs a positive ttl as the rate window"
                )));
            }
            let horizon = args.horizon.unwrap_or(100.0 * ttl);
            let catalog = ZipfCatalog::new(
                args.files,
                args.gamma,
                args.rate * args.files as f64 / ttl,
                family,
            )
            .map_err(validation)?;
            let trace = generate_zipf_trace(&catalog, horizon, args.seed).map_err(validation)?;
            let source = json!({
                "generated": {
                    "files": args.files,
                    "gamma": args.gamma,
                    "dist": family.to_string(),
                    "rate": args.rate,
                    "horizon": horizon,
                    "seed": args.seed,
                }
            });
            Ok((trace, Some(horizon), source))
        }
    }
}

fn band_csv(bands: &BandSpec, rows: &[elastic_cache::MultifileRow]) -> String {
    let labels = bands.labels();
    let mut s = String::from("band,policy,cost_ratio_share\n");
    for (band, label) in labels.iter().enumerate() {
        for row in rows {
            writeln!(s, "{label},{},{}", row.label, row.band_shares[band])
                .expect("string writes cannot fail");
        }
    }
    s
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> CliResult<()> {
    let (remote, ttl, window) = args.cost.resolve().map_err(validation)?;
    let costs = CostParams::new(remote).map_err(validation)?;
    let models: Vec<TraceCostModel> = args
        .policies
        .iter()
        .map(|p| p.model(ttl, window))
        .collect::<Result<_, _>>()
        .map_err(validation)?;
    let bands = BandSpec::new(args.bands.low, args.bands.high).map_err(validation)?;
    let (trace, horizon, source) = load_or_generate(args, ttl)?;
    let opts = SimOptions { horizon, truncate_at_horizon: args.truncate_at_horizon };
    let report = simulate_multifile(&trace, &models, &costs, &opts, &bands).map_err(validation)?;

    if let Some(path) = &args.band_out {
        let csv = band_csv(&report.bands, &report.rows);
        std::fs::write(path, csv)
            .map_err(|e| internal(anyhow!("cannot write {}: {e}", path.display())))?;
    }

    if cli.json {
        let band_labels = report.bands.labels();
        let rows: Vec<serde_json::Value> = report
            .rows
            .iter()
            .map(|row| {
                let shares: serde_json::Map<String, serde_json::Value> = band_labels
                    .iter()
                    .zip(row.band_shares)
                    .map(|(l, s)| (l.clone(), json!(s)))
                    .collect();
                json!({
                    "policy": row.label,
                    "bandwidth_cost": row.report.bandwidth_cost,
                    "storage_cost": row.report.storage_cost,
                    "total_cost": row.total_cost,
                    "misses": row.report.miss_count,
                    "hits": row.report.hit_count,
                    "ratio_vs_offline": row.ratio_vs_offline,
                    "band_shares": shares,
                })
            })
            .collect();
        emit_json(
            cli,
            &json!({
                "command": "simulate",
                "source": source,
                "remote": remote,
                "ttl": ttl,
                "window": window,
                "truncate_at_horizon": args.truncate_at_horizon,
                "requests": trace.request_count(),
                "objects": trace.object_count(),
                "bands": band_labels,
                "offline_total": report.offline_total,
                "rows": rows,
            }),
        )
    } else {
        let mut csv =
            String::from("policy,bandwidth_cost,storage_cost,total_cost,misses,hits,ratio_vs_offline\n");
        for row in &report.rows {
            writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                row.label,
                row.report.bandwidth_cost,
                row.report.storage_cost,
                row.total_cost,
                row.report.miss_count,
                row.report.hit_count,
                row.ratio_vs_offline
            )
            .expect("string writes cannot fail");
        }
        emit_text(cli, &csv)
    }
}

fn cmd_adversary(cli: &Cli, args: &AdversaryArgs) -> CliResult<()> {
    let (remote, ttl, window) = args.cost.resolve().map_err(validation)?;
    let costs = CostParams::new(remote).map_err(validation)?;
    struct Row {
        policy: String,
        bound: f64,
        batch_ratio: f64,
        search_ratio: Option<f64>,
        best_ratio: f64,
        within_bound: bool,
    }
    let mut rows = Vec::with_capacity(args.policies.len());
    for &arg in &args.policies {
        let policy = arg.online(ttl, window).map_err(validation)?;
        let bound = adversary::theorem_bound(&policy).expect("online policies carry a bound");
        let m = match arg {
            PolicyArg::Always(m) | PolicyArg::Window(m) => m,
            PolicyArg::Dual => 2,
            PolicyArg::Offline | PolicyArg::Baseline => unreachable!("rejected above"),
        };
        let cfg = AdversaryConfig::new(m, args.batches, ttl, remote).map_err(validation)?;
        let batch = adversary::batch_trace(&cfg);
        let batch_ratio = adversary::trace_ratios(&batch, &policy, &costs)
            .map_err(validation)?
            .with_trailing_ttl;
        let search_ratio = if args.trials > 0 {
            let outcome = adversary::random_adversary_search(&policy, &costs, args.trials, args.seed)
                .map_err(validation)?;
            Some(outcome.worst.with_trailing_ttl)
        } else {
            None
        };
        let best_ratio = search_ratio.map_or(batch_ratio, |s| s.max(batch_ratio));
        rows.push(Row {
            policy: arg.to_string(),
            bound,
            batch_ratio,
            search_ratio,
            best_ratio,
            within_bound: best_ratio <= bound + 1e-9,
        });
    }

    if cli.json {
        let rows: Vec<serde_json::Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "policy": r.policy,
                    "bound": r.bound,
                    "batch_ratio": r.batch_ratio,
                    "search_ratio": r.search_ratio,
                    "best_ratio": r.best_ratio,
                    "within_bound": r.within_bound,
                })
            })
            .collect();
        emit_json(
            cli,
            &json!({
                "command": "adversary",
                "remote": remote,
                "ttl": ttl,
                "window": window,
                "batches": args.batches,
                "trials": args.trials,
                "seed": args.seed,
                "rows": rows,
            }),
        )
    } else {
        let mut csv =
            String::from("policy,bound,batch_ratio,search_ratio,best_ratio,within_bound\n");
        for r in &rows {
            let search = r.search_ratio.map_or(String::new(), |s| s.to_string());
            writeln!(
                csv,
                "{},{},{},{search},{},{}",
                r.policy, r.bound, r.batch_ratio, r.best_ratio, r.within_bound
            )
            .expect("string writes cannot fail");
        }
        emit_text(cli, &csv)
    }
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> CliResult<()> {
    let trace = match (args.requests, args.horizon) {
        (Some(n), None) => {
            let d = match args.dist {
                DistSpec::Fixed(d) => d,
                DistSpec::Swept(f) => {
                    return Err(validation(anyhow!(
                        "--requests needs a concrete distribution (e.g. exp:2), got {f}"
                    )))
                }
            };
            generate_trace(d, n, args.seed).map_err(validation)?
        }
        (None, Some(horizon)) => {
            let family = swept_family(args.dist)?;
            if args.ttl <= 0.0 || !args.ttl.is_finite() {
                return Err(validation(anyhow!(
                    "the rate window must be positive and finite, got {}",
                    args.ttl
                )));
            }
            let catalog = ZipfCatalog::new(
                args.files,
                args.gamma,
                args.rate * args.files as f64 / args.ttl,
                family,
            )
            .map_err(validation)?;
            generate_zipf_trace(&catalog, horizon, args.seed).map_err(validation)?
        }
        (None, None) => {
            return Err(validation(anyhow!(
                "give --requests N (single object) or --horizon T (Zipf catalog)"
            )))
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };

    if cli.json {
        let rows: Vec<serde_json::Value> = trace
            .requests()
            .map(|(t, obj)| json!({ "timestamp": t, "object": obj.name, "size": obj.size }))
            .collect();
        emit_json(
            cli,
            &json!({
                "command": "gen",
                "requests": trace.request_count(),
                "objects": trace.object_count(),
                "rows": rows,
            }),
        )
    } else {
        let mut w = open_output(&cli.out)?;
        finish_write(write_trace(&mut w, &trace).and_then(|()| w.flush()))
    }
}
