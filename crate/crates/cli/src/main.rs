//! `sdr`: robust mean estimation and simulation sweeps from the command line.
//!
//! Exit codes: 0 success, 2 bad arguments, 3 data error, 4 estimator failure.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use sdr_core::bench::{self, Estimator, ExperimentSpec};
use sdr_core::contamination::{ContaminationSpec, Scheme};
use sdr_core::io::{self, format_float};
use sdr_core::schedule::{self, ThresholdParams};
use sdr_core::{CovarianceMode, LastLevelRule, RankSource, SdrConfig, SdrError, SdrTrace, SymMatrix};

#[derive(Parser)]
#[command(name = "sdr", version, about = "Robust mean estimation by spectral dimension reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the mean of a data file (rows are observations).
    Estimate(EstimateArgs),
    /// Run a Monte-Carlo sweep and write per-trial results as CSV.
    Bench(BenchArgs),
    /// Aggregate an existing results CSV into quartiles and plots.
    Summarize(SummarizeArgs),
    /// Print the dimension schedule and, given n and ε*, the threshold.
    Schedule(ScheduleArgs),
}

/// Options shared by every subcommand that reads `key = value` files.
#[derive(Args)]
struct ConfigArg {
    /// `key = value` file mirroring the long flags; flags given on the
    /// command line take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Known covariance (square text matrix). Defaults to the identity.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["sigma_approx", "subgaussian"])]
    sigma: Option<PathBuf>,
    /// Approximate covariance, accurate to relative error `--gamma`.
    #[arg(long, value_name = "FILE", requires = "gamma", conflicts_with = "subgaussian")]
    sigma_approx: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Sub-Gaussian variance proxy; the inlier covariance is the identity.
    #[arg(long, value_name = "S")]
    subgaussian: Option<f64>,
    #[arg(long, value_name = "C")]
    c0: Option<f64>,
    #[arg(long)]
    eps_star: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Filtering threshold `t`, overriding the theoretical value.
    #[arg(long)]
    threshold: Option<f64>,
    /// `median` or `filtered-mean`.
    #[arg(long)]
    last_level: Option<String>,
    /// `effective` or `dimension`.
    #[arg(long)]
    rank_source: Option<String>,
    /// Print the per-level trace as `key=value` lines on stderr.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args)]
struct BenchArgs {
    /// `cuo`, `gmc` or `cse`.
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated sample sizes.
    #[arg(long, value_name = "LIST")]
    n: Option<String>,
    /// Comma-separated dimensions.
    #[arg(long, value_name = "LIST")]
    p: Option<String>,
    /// Comma-separated contamination rates.
    #[arg(long, value_name = "LIST")]
    eps: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of sdr,cm,gm,oracle.
    #[arg(long, value_name = "LIST")]
    estimators: Option<String>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Quartile summary CSV.
    #[arg(long, value_name = "FILE")]
    summary: Option<PathBuf>,
    /// Directory for SVG charts.
    #[arg(long, value_name = "DIR")]
    plots: Option<PathBuf>,
    #[arg(long)]
    delta: Option<f64>,
    /// Contamination bound given to SDR; defaults to the true rate.
    #[arg(long)]
    eps_star: Option<f64>,
    /// Norm of the GMC outlier mean.
    #[arg(long)]
    shift_norm: Option<f64>,
    /// Upper end of the CUO mean range.
    #[arg(long)]
    uniform_high: Option<f64>,
    /// Write runtime 0 so that reruns give identical bytes.
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args)]
struct SummarizeArgs {
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,
    /// Summary CSV; stdout when absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    plots: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArg,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long)]
    eps_star: Option<f64>,
    /// Rank entering the rate; defaults to `p`.
    #[arg(long)]
    rank: Option<f64>,
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Display) -> Self {
        CliError { code: 2, message: message.to_string() }
    }

    fn data(message: impl Display) -> Self {
        CliError { code: 3, message: message.to_string() }
    }

    fn estimator(message: impl Display) -> Self {
        CliError { code: 4, message: message.to_string() }
    }
}

/// Parse and I/O problems are data errors, anything else is a usage error.
fn classify(err: SdrError) -> CliError {
    match err {
        SdrError::Parse { .. }
        | SdrError::Io(_)
        | SdrError::NonFiniteInput { .. }
        | SdrError::NonFiniteMatrix
        | SdrError::EmptySample
        | SdrError::DimensionMismatch { .. }
        | SdrError::NotPositiveSemidefinite { .. }
        | SdrError::ZeroCovariance => CliError::data(err),
        _ => CliError::usage(err),
    }
}

fn in_file(path: &Path, err: SdrError) -> CliError {
    let mut e = classify(err);
    e.message = format!("{}: {}", path.display(), e.message);
    e
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    fn load(arg: &ConfigArg, allowed: &[&str]) -> CliResult<Self> {
        let values = match &arg.config {
            None => BTreeMap::new(),
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
                io::parse_config(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
            }
        };
        if let Some(key) = values.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(CliError::usage(format!("unknown config key `{key}`")));
        }
        Ok(Settings { values })
    }

    fn pick<T>(&self, cli: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if cli.is_some() {
            return Ok(cli);
        }
        self.values
            .get(key)
            .map(|raw| {
                raw.parse()
                    .map_err(|e| CliError::usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    fn flag(&self, cli: bool, key: &str) -> CliResult<bool> {
        Ok(cli || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

fn require<T>(value: Option<T>, name: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::usage(format!("missing required option --{name}")))
}

fn list<T: FromStr>(text: &str, name: &str) -> CliResult<Vec<T>> {
    io::parse_list(text).map_err(|e| CliError::usage(format!("--{name}: {e}")))
}

fn estimate(args: EstimateArgs) -> CliResult<()> {
    let s = Settings::load(
        &args.config,
        &[
            "input", "sigma", "sigma-approx", "gamma", "subgaussian", "c0", "eps-star", "delta", "threshold",
            "last-level", "rank-source", "trace",
        ],
    )?;
    let input: PathBuf = require(s.pick(args.input, "input")?, "input")?;
    let sigma_path: Option<PathBuf> = s.pick(args.sigma, "sigma")?;
    let approx_path: Option<PathBuf> = s.pick(args.sigma_approx, "sigma-approx")?;
    let gamma: Option<f64> = s.pick(args.gamma, "gamma")?;
    let subgaussian: Option<f64> = s.pick(args.subgaussian, "subgaussian")?;
    let c0: Option<f64> = s.pick(args.c0, "c0")?;
    let eps_star = require(s.pick(args.eps_star, "eps-star")?, "eps-star")?;
    let delta = s.pick(args.delta, "delta")?.unwrap_or(0.1);
    let threshold: Option<f64> = s.pick(args.threshold, "threshold")?;
    let last_level: Option<String> = s.pick(args.last_level, "last-level")?;
    let rank_source: Option<String> = s.pick(args.rank_source, "rank-source")?;
    let trace = s.flag(args.trace, "trace")?;

    let sources = [sigma_path.is_some(), approx_path.is_some(), subgaussian.is_some()];
    if sources.iter().filter(|&&b| b).count() > 1 {
        return Err(CliError::usage("--sigma, --sigma-approx and --subgaussian are mutually exclusive"));
    }

    let mut cfg = SdrConfig::new(eps_star, delta);
    cfg.threshold_override = threshold;
    cfg.last_level_rule = match last_level.as_deref() {
        None | Some("median") => LastLevelRule::Median,
        Some("filtered-mean") => LastLevelRule::FilteredMean,
        Some(other) => return Err(CliError::usage(format!("--last-level: unknown rule `{other}`"))),
    };
    cfg.rank_source = match rank_source.as_deref() {
        None | Some("effective") => RankSource::EffectiveRank,
        Some("dimension") => RankSource::Dimension,
        Some(other) => return Err(CliError::usage(format!("--rank-source: unknown value `{other}`"))),
    };

    let data = io::read_dataset(&input).map_err(|e| in_file(&input, e))?;
    let sigma = match (&sigma_path, &approx_path) {
        (Some(path), _) | (None, Some(path)) => io::read_sym_matrix(path).map_err(|e| in_file(path, e))?,
        (None, None) => SymMatrix::identity(data.dim()),
    };
    if approx_path.is_some() {
        cfg.mode = CovarianceMode::Approximate {
            gamma: require(gamma, "gamma")?,
        };
    } else if let Some(variance_proxy) = subgaussian {
        cfg.mode = CovarianceMode::SubGaussian {
            variance_proxy,
            c0: c0.unwrap_or(std::f64::consts::SQRT_2),
        };
    }
    cfg.validate().map_err(CliError::usage)?;
    if sigma.dim() != data.dim() {
        return Err(CliError::data(SdrError::DimensionMismatch {
            expected: data.dim(),
            found: sigma.dim(),
        }));
    }

    let (mu, sdr_trace) = sdr_core::sdr_estimate(&data, &sigma, &cfg).map_err(|e| match e {
        SdrError::NonFiniteInput { .. } | SdrError::NotPositiveSemidefinite { .. } | SdrError::ZeroCovariance => {
            CliError::data(e)
        }
        other => CliError::estimator(other),
    })?;
    print!("{}", io::format_vector(mu.as_slice()));
    if trace {
        eprint!("{}", format_trace(&sdr_trace));
    }
    Ok(())
}

fn format_trace(trace: &SdrTrace) -> String {
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    let mut out = String::new();
    let mut kv = |k: String, v: String| {
        out.push_str(&k);
        out.push('=');
        out.push_str(&v);
        out.push('\n');
    };
    kv("schedule".into(), join(trace.schedule.dims()));
    kv("threshold".into(), format_float(trace.threshold));
    if let Some(rate) = trace.rate {
        kv("rate".into(), format_float(rate));
    }
    if let Some(tau) = trace.tau {
        kv("tau".into(), format_float(tau));
    }
    kv("rank".into(), format_float(trace.rank));
    kv("scale".into(), format_float(trace.scale));
    kv("wall_time_ms".into(), format!("{:.3}", trace.wall_time.as_secs_f64() * 1e3));
    for lvl in &trace.levels {
        let key = |name: &str| format!("level.{}.{name}", lvl.level);
        kv(key("dim"), lvl.dim.to_string());
        kv(
            key("filtered"),
            lvl.filtered.map_or_else(|| "none".to_string(), |f| f.to_string()),
        );
        kv(key("kept_dim"), lvl.kept_dim.to_string());
        kv(key("component_norm"), format_float(lvl.component_norm));
        kv(key("gm_iterations"), lvl.gm_iterations.to_string());
        if let Some(min) = lvl.eigenvalues.first() {
            kv(key("min_eigenvalue"), format_float(*min));
        }
    }
    out
}

fn bench(args: BenchArgs) -> CliResult<()> {
    let s = Settings::load(
        &args.config,
        &[
            "scheme", "n", "p", "eps", "trials", "seed", "estimators", "out", "summary", "plots", "delta", "eps-star",
            "shift-norm", "uniform-high", "no-timing",
        ],
    )?;
    let scheme: Scheme = require(s.pick::<String>(args.scheme, "scheme")?, "scheme")?
        .parse()
        .map_err(CliError::usage)?;
    let ns: Vec<usize> = list(&require(s.pick::<String>(args.n, "n")?, "n")?, "n")?;
    let ps: Vec<usize> = list(&require(s.pick::<String>(args.p, "p")?, "p")?, "p")?;
    let eps: Vec<f64> = list(&require(s.pick::<String>(args.eps, "eps")?, "eps")?, "eps")?;
    let out: PathBuf = require(s.pick(args.out, "out")?, "out")?;
    let summary: Option<PathBuf> = s.pick(args.summary, "summary")?;
    let plots: Option<PathBuf> = s.pick(args.plots, "plots")?;

    let mut template = ContaminationSpec {
        scheme,
        eps: 0.0,
        shift_norm: 15.0,
        uniform_high: 3.0,
        seed: 0,
    };
    if let Some(v) = s.pick(args.shift_norm, "shift-norm")? {
        template.shift_norm = v;
    }
    if let Some(v) = s.pick(args.uniform_high, "uniform-high")? {
        template.uniform_high = v;
    }
    let mut spec = ExperimentSpec::new(template, ns, ps, eps);
    if let Some(est) = s.pick::<String>(args.estimators, "estimators")? {
        spec.estimators = list::<Estimator>(&est, "estimators")?;
    }
    if let Some(trials) = s.pick(args.trials, "trials")? {
        spec.trials = trials;
    }
    if let Some(seed) = s.pick(args.seed, "seed")? {
        spec.master_seed = seed;
    }
    if let Some(delta) = s.pick(args.delta, "delta")? {
        spec.sdr_cfg.delta = delta;
    }
    spec.eps_star = s.pick(args.eps_star, "eps-star")?;
    spec.timing = !s.flag(args.no_timing, "no-timing")?;
    spec.validate().map_err(CliError::usage)?;

    let rows = bench::run_experiment(&spec).map_err(classify)?;
    write_file(&out, bench::results_csv(&rows).as_bytes())?;
    let failures = rows.iter().filter(|r| r.l2_error.is_nan()).count();
    eprintln!("wrote {} rows to {} ({failures} failed runs)", rows.len(), out.display());
    emit_summary(&rows, summary.as_deref(), plots.as_deref())
}

fn summarize(args: SummarizeArgs) -> CliResult<()> {
    let s = Settings::load(&args.config, &["input", "out", "plots"])?;
    let input: PathBuf = require(s.pick(args.input, "input")?, "input")?;
    let out: Option<PathBuf> = s.pick(args.out, "out")?;
    let plots: Option<PathBuf> = s.pick(args.plots, "plots")?;
    let rows = bench::read_results_csv(&input).map_err(|e| in_file(&input, e))?;
    if out.is_none() {
        let summary = bench::aggregate_quantiles(&rows).map_err(CliError::data)?;
        print!("{}", bench::summary_csv(&summary));
    }
    emit_summary(&rows, out.as_deref(), plots.as_deref())
}

fn emit_summary(rows: &[bench::ResultRow], summary_path: Option<&Path>, plots: Option<&Path>) -> CliResult<()> {
    if summary_path.is_none() && plots.is_none() {
        return Ok(());
    }
    let summary = bench::aggregate_quantiles(rows).map_err(CliError::data)?;
    if let Some(path) = summary_path {
        write_file(path, bench::summary_csv(&summary).as_bytes())?;
    }
    if let Some(dir) = plots {
        let files = bench::emit_plots(&summary, dir).map_err(classify)?;
        for f in files {
            eprintln!("wrote {}", f.display());
        }
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}

fn schedule_cmd(args: ScheduleArgs) -> CliResult<()> {
    let sched = schedule::dimension_schedule(args.p).map_err(CliError::usage)?;
    let dims: Vec<String> = sched.dims().iter().map(usize::to_string).collect();
    println!("schedule={}", dims.join(","));
    println!("levels={}", sched.levels());
    match (args.n, args.eps_star) {
        (Some(n), Some(eps_star)) => {
            let rank = args.rank.unwrap_or(args.p as f64);
            let params = ThresholdParams::new(eps_star, args.delta, n, rank).map_err(CliError::usage)?;
            let rate = schedule::base_rate(n, rank, args.delta);
            println!("rate={}", format_float(rate));
            println!("tau={}", format_float(schedule::tau(rate)));
            println!("threshold={}", format_float(schedule::threshold_gaussian(&params)));
        }
        (None, None) => {}
        _ => return Err(CliError::usage("--n and --eps-star must be given together")),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Bench(a) => bench(a),
        Command::Summarize(a) => summarize(a),
        Command::Schedule(a) => schedule_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
