//! Command-line parsing. Precedence: built-in defaults, then the `--config`
//! file, then flags.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::config::{
    harmonic_lambdas, parse_count, parse_sweep, DeltaPolicy, ExperimentConfig, ExperimentKind,
};
use crate::engine::WORKERS_ENV;
use crate::error::ConfigError;

#[derive(Debug, Parser)]
#[command(name = "noma-lf", version, about = "Limited-feedback NOMA Monte Carlo experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,

    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Emit a JSON record array instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,

    /// TOML file with experiment settings; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Suppress progress on standard error.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum rates against transmit power.
    Minrate(ExperimentArgs),
    /// Rate loss against bin size at one power.
    Rateloss(ExperimentArgs),
    /// Outage probabilities against transmit power.
    Outage(ExperimentArgs),
    /// Outage-probability loss against power or bin size.
    Outageloss(ExperimentArgs),
    /// Feedback rates of both quantizers.
    Feedback(ExperimentArgs),
    /// Outage curves and their high-power slopes.
    Diversity(ExperimentArgs),
    /// K-receiver rate and outage losses against bin size.
    Kuser(ExperimentArgs),
}

impl Command {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Command::Minrate(_) => ExperimentKind::MinRate,
            Command::Rateloss(_) => ExperimentKind::RateLoss,
            Command::Outage(_) => ExperimentKind::Outage,
            Command::Outageloss(_) => ExperimentKind::OutageLoss,
            Command::Feedback(_) => ExperimentKind::FeedbackRate,
            Command::Diversity(_) => ExperimentKind::Diversity,
            Command::Kuser(_) => ExperimentKind::KUser,
        }
    }

    pub fn args(&self) -> &ExperimentArgs {
        match self {
            Command::Minrate(a)
            | Command::Rateloss(a)
            | Command::Outage(a)
            | Command::Outageloss(a)
            | Command::Feedback(a)
            | Command::Diversity(a)
            | Command::Kuser(a) => a,
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct ExperimentArgs {
    /// Transmit powers in dB: start:stop:step or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub p_db: Option<String>,

    /// Fixed bin sizes: comma list or start:stop:step.
    #[arg(long, conflicts_with = "delta_policy")]
    pub delta: Option<String>,

    /// Bin-size policies: comma list of numbers, pcube, min02-pcube or min<cap>-pcube.
    #[arg(long)]
    pub delta_policy: Option<String>,

    /// Channel variances, strongest first.
    #[arg(long, conflicts_with = "k")]
    pub lambda: Option<String>,

    /// Receiver count with variances 1/k.
    #[arg(long)]
    pub k: Option<usize>,

    /// Target rate for outage, bits/s/Hz.
    #[arg(long)]
    pub r_th: Option<f64>,

    /// Bisection accuracy.
    #[arg(long)]
    pub eps: Option<f64>,

    /// Trials per point, or the first batch under adaptive stopping (accepts 1e6).
    #[arg(long)]
    pub trials: Option<String>,

    /// Run each point until this many full-CSI outages were observed.
    #[arg(long, conflicts_with = "fixed_trials")]
    pub min_outage_events: Option<String>,

    /// Disable adaptive stopping.
    #[arg(long)]
    pub fixed_trials: bool,

    /// Trial cap per point under adaptive stopping.
    #[arg(long)]
    pub trial_cap: Option<String>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Slope window in dB as lo:hi.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
}

/// A sweep given either as text (`"0:30:5"`) or as a list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SweepSpec {
    Text(String),
    List(Vec<f64>),
}

/// Settings accepted in a `--config` TOML file; all optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub p_db: Option<SweepSpec>,
    pub delta: Option<SweepSpec>,
    pub delta_policy: Option<Vec<String>>,
    pub lambda: Option<Vec<f64>>,
    pub k: Option<usize>,
    pub r_th: Option<f64>,
    pub eps: Option<f64>,
    pub trials: Option<u64>,
    pub min_outage_events: Option<u64>,
    pub fixed_trials: Option<bool>,
    pub trial_cap: Option<u64>,
    pub seed: Option<u64>,
    pub window: Option<[f64; 2]>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse { path: path.to_path_buf(), msg: e.to_string() })
    }
}

/// Everything a run needs besides the experiment itself.
#[derive(Debug)]
pub struct Invocation {
    pub config: ExperimentConfig,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub json: bool,
    pub quiet: bool,
}

fn invalid(flag: &'static str) -> impl Fn(String) -> ConfigError {
    move |msg| ConfigError::Invalid { flag, msg }
}

fn sweep_spec(spec: &SweepSpec) -> Result<Vec<f64>, String> {
    match spec {
        SweepSpec::Text(s) => parse_sweep(s),
        SweepSpec::List(v) => Ok(v.clone()),
    }
}

fn policies(s: &str) -> Result<Vec<DeltaPolicy>, String> {
    s.split(',').map(str::parse).collect()
}

fn window(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("'{s}' must be lo:hi"))?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number"));
    Ok((num(lo)?, num(hi)?))
}

/// Applies the file, then the flags, over the defaults of `kind`, and validates.
pub fn resolve(
    kind: ExperimentKind,
    file: &FileConfig,
    args: &ExperimentArgs,
) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::defaults(kind);

    if let Some(s) = &file.p_db {
        cfg.p_db = sweep_spec(s).map_err(invalid("p_db"))?;
    }
    if let Some(s) = &file.delta {
        cfg.deltas = sweep_spec(s).map_err(invalid("delta"))?.into_iter().map(DeltaPolicy::Fixed).collect();
    }
    if let Some(list) = &file.delta_policy {
        cfg.deltas = policies(&list.join(",")).map_err(invalid("delta_policy"))?;
    }
    if let Some(k) = file.k {
        cfg.lambdas = harmonic_lambdas(k);
    }
    if let Some(l) = &file.lambda {
        cfg.lambdas = l.clone();
    }
    cfg.r_th = file.r_th.unwrap_or(cfg.r_th);
    cfg.eps = file.eps.unwrap_or(cfg.eps);
    cfg.trials = file.trials.unwrap_or(cfg.trials);
    if let Some(n) = file.min_outage_events {
        cfg.min_outage_events = Some(n);
    }
    if file.fixed_trials == Some(true) {
        cfg.min_outage_events = None;
    }
    cfg.trial_cap = file.trial_cap.unwrap_or(cfg.trial_cap);
    cfg.seed = file.seed.unwrap_or(cfg.seed);
    if let Some([lo, hi]) = file.window {
        cfg.window = Some((lo, hi));
    }

    if let Some(s) = &args.p_db {
        cfg.p_db = parse_sweep(s).map_err(invalid("--p-db"))?;
    }
    if let Some(s) = &args.delta {
        cfg.deltas = parse_sweep(s).map_err(invalid("--delta"))?.into_iter().map(DeltaPolicy::Fixed).collect();
    }
    if let Some(s) = &args.delta_policy {
        cfg.deltas = policies(s).map_err(invalid("--delta-policy"))?;
    }
    if let Some(k) = args.k {
        cfg.lambdas = harmonic_lambdas(k);
    }
    if let Some(s) = &args.lambda {
        cfg.lambdas = parse_sweep(s).map_err(invalid("--lambda"))?;
    }
    cfg.r_th = args.r_th.unwrap_or(cfg.r_th);
    cfg.eps = args.eps.unwrap_or(cfg.eps);
    if let Some(s) = &args.trials {
        cfg.trials = parse_count(s).map_err(invalid("--trials"))?;
    }
    if let Some(s) = &args.min_outage_events {
        cfg.min_outage_events = Some(parse_count(s).map_err(invalid("--min-outage-events"))?);
    }
    if args.fixed_trials {
        cfg.min_outage_events = None;
    }
    if let Some(s) = &args.trial_cap {
        cfg.trial_cap = parse_count(s).map_err(invalid("--trial-cap"))?;
    }
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    if let Some(s) = &args.window {
        cfg.window = Some(window(s).map_err(invalid("--window"))?);
    }

    cfg.validate()?;
    Ok(cfg)
}

/// Parses `argv` (program name first), loading `--config` when given.
pub fn parse_config<I, T>(argv: I) -> Result<Invocation, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| ConfigError::Usage(e.to_string()))?;
    Invocation::from_cli(cli)
}

impl Invocation {
    pub fn from_cli(cli: Cli) -> Result<Self, ConfigError> {
            let file = match &cli.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let config = resolve(cli.command.kind(), &file, cli.command.args())?;
        Ok(Invocation { config, workers: cli.workers, out: cli.out, json: cli.json, quiet: cli.quiet })
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Argument vector that parses back to `cfg`.
pub fn render(cfg: &ExperimentConfig) -> Vec<String> {
    let mut argv = vec!["noma-lf".to_string(), cfg.kind.name().to_string()];
    let mut flag = |name: &str, value: String| argv.push(format!("--{name}={value}"));
    flag("p-db", join(&cfg.p_db));
    let fixed: Option<Vec<f64>> = cfg.deltas.iter().map(|d| d.fixed()).collect();
    match fixed {
        Some(d) => flag("delta", join(&d)),
        None => flag(
            "delta-policy",
            cfg.deltas.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","),
        ),
    }
    flag("lambda", join(&cfg.lambdas));
    flag("r-th", cfg.r_th.to_string());
    flag("eps", cfg.eps.to_string());
    flag("trials", cfg.trials.to_string());
    if let Some(n) = cfg.min_outage_events {
        flag("min-outage-events", n.to_string());
    }
    flag("trial-cap", cfg.trial_cap.to_string());
    flag("seed", cfg.seed.to_string());
    if let Some((lo, hi)) = cfg.window {
        flag("window", format!("{lo}:{hi}"));
    }
    if cfg.min_outage_events.is_none() {
        argv.push("--fixed-trials".to_string());
    }
    argv
}
