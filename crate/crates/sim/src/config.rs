//! Experiment configuration, defaults and validation.

use std::fmt;
use std::str::FromStr;

use noma_lf_core::db_to_linear;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    MinRate,
    RateLoss,
    Outage,
    OutageLoss,
    FeedbackRate,
    Diversity,
    KUser,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::MinRate,
        ExperimentKind::RateLoss,
        ExperimentKind::Outage,
        ExperimentKind::OutageLoss,
        ExperimentKind::FeedbackRate,
        ExperimentKind::Diversity,
        ExperimentKind::KUser,
    ];

    /// Subcommand name, also used as the experiment id in output.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::MinRate => "minrate",
            ExperimentKind::RateLoss => "rateloss",
            ExperimentKind::Outage => "outage",
            ExperimentKind::OutageLoss => "outageloss",
            ExperimentKind::FeedbackRate => "feedback",
            ExperimentKind::Diversity => "diversity",
            ExperimentKind::KUser => "kuser",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown experiment '{s}'"))
    }
}

/// How the bin size is chosen at each transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DeltaPolicy {
    Fixed(f64),
    /// `P^(-1/3)`.
    CubeRoot,
    /// `min{cap, P^(-1/3)}`.
    CappedCubeRoot(f64),
}

impl DeltaPolicy {
    pub fn delta_at(&self, p_linear: f64) -> f64 {
        match *self {
            DeltaPolicy::Fixed(d) => d,
            DeltaPolicy::CubeRoot => p_linear.powf(-1.0 / 3.0),
            DeltaPolicy::CappedCubeRoot(cap) => cap.min(p_linear.powf(-1.0 / 3.0)),
        }
    }

    pub fn fixed(&self) -> Option<f64> {
        match *self {
            DeltaPolicy::Fixed(d) => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for DeltaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DeltaPolicy::Fixed(d) => write!(f, "{d}"),
            DeltaPolicy::CubeRoot => f.write_str("pcube"),
            DeltaPolicy::CappedCubeRoot(0.2) => f.write_str("min02-pcube"),
            DeltaPolicy::CappedCubeRoot(cap) => write!(f, "min{cap}-pcube"),
        }
    }
}

impl FromStr for DeltaPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "pcube" {
            return Ok(DeltaPolicy::CubeRoot);
        }
        if s == "min02-pcube" {
            return Ok(DeltaPolicy::CappedCubeRoot(0.2));
        }
        if let Some(cap) = s.strip_prefix("min").and_then(|r| r.strip_suffix("-pcube")) {
            let cap: f64 = cap.parse().map_err(|_| format!("invalid policy cap in '{s}'"))?;
            return Ok(DeltaPolicy::CappedCubeRoot(cap));
        }
        s.parse::<f64>()
            .map(DeltaPolicy::Fixed)
            .map_err(|_| format!("'{s}' is neither a number nor one of pcube, min02-pcube, min<cap>-pcube"))
    }
}

impl TryFrom<String> for DeltaPolicy {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<DeltaPolicy> for String {
    fn from(p: DeltaPolicy) -> String {
        p.to_string()
    }
}

/// Default trial cap per sweep point under adaptive stopping.
pub const DEFAULT_TRIAL_CAP: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Mean channel gains, strongest first.
    pub lambdas: Vec<f64>,
    pub p_db: Vec<f64>,
    pub deltas: Vec<DeltaPolicy>,
    /// Target rate for outage, bits/s/Hz.
    pub r_th: f64,
    /// Bisection accuracy for the `K`-receiver solver.
    pub eps: f64,
    pub trials: u64,
    /// When set, each sweep point runs until this many full-CSI outages.
    pub min_outage_events: Option<u64>,
    pub trial_cap: u64,
    pub seed: u64,
    /// Power window in dB for slope estimates; defaults to the top 10 dB.
    pub window: Option<(f64, f64)>,
}

/// `start:stop:step` (inclusive) or a comma list.
pub fn parse_sweep(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("'{s}' must be start:stop:step"));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("'{p}' is not a number")))
            .collect::<Result<_, _>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(format!("'{s}' needs finite start <= stop and a positive step"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        if n > 100_000 {
            return Err(format!("'{s}' expands to too many points"));
        }
        Ok((0..=n).map(|i| start + i as f64 * step).collect())
    } else {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("'{p}' is not a number")))
            .collect()
    }
}

/// Integer count that may be written in exponent form, e.g. `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.trim().parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a count"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("'{s}' is not a nonnegative integer"))
    }
}

fn default_delta_sweep() -> Vec<DeltaPolicy> {
    [0.2, 0.14, 0.1, 0.07, 0.05, 0.035, 0.02, 0.014, 0.01, 0.007, 0.005]
        .into_iter()
        .map(DeltaPolicy::Fixed)
        .collect()
}

impl ExperimentConfig {
    /// Documented defaults: two receivers with means 1 and 0.5 (four
    /// receivers with `1/k` and `r_th = 0.25` for [`ExperimentKind::KUser`]),
    /// `eps = 1e-4`, `r_th = 1`, seed 0.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = ExperimentConfig {
            kind,
            lambdas: vec![1.0, 0.5],
            p_db: vec![10.0],
            deltas: vec![DeltaPolicy::Fixed(0.01), DeltaPolicy::Fixed(0.05)],
            r_th: 1.0,
            eps: 1e-4,
            trials: 100_000,
            min_outage_events: None,
            trial_cap: DEFAULT_TRIAL_CAP,
            seed: 0,
            window: None,
        };
        match kind {
            ExperimentKind::MinRate => ExperimentConfig {
                p_db: parse_sweep("0:30:5").unwrap(),
                ..base
            },
            ExperimentKind::RateLoss | ExperimentKind::OutageLoss => {
                ExperimentConfig { deltas: default_delta_sweep(), ..base }
            }
            ExperimentKind::Outage => ExperimentConfig {
                p_db: parse_sweep("0:30:2").unwrap(),
                deltas: vec![
                    DeltaPolicy::Fixed(0.01),
                    DeltaPolicy::Fixed(0.2),
                    DeltaPolicy::CappedCubeRoot(0.2),
                ],
                min_outage_events: Some(10_000),
                ..base
            },
            ExperimentKind::FeedbackRate => base,
            ExperimentKind::Diversity => ExperimentConfig {
                p_db: parse_sweep("0:30:2").unwrap(),
                deltas: vec![DeltaPolicy::Fixed(0.2), DeltaPolicy::CappedCubeRoot(0.2)],
                min_outage_events: Some(10_000),
                ..base
            },
            ExperimentKind::KUser => ExperimentConfig {
                lambdas: harmonic_lambdas(4),
                deltas: default_delta_sweep(),
                // four receivers at 10 dB rarely reach 1 bit/s/Hz
                r_th: 0.25,
                ..base
            },
        }
    }

    pub fn receivers(&self) -> usize {
        self.lambdas.len()
    }

    /// Whether sweep points run along the bin size rather than the power.
    pub fn delta_axis(&self) -> bool {
        match self.kind {
            ExperimentKind::RateLoss | ExperimentKind::KUser => true,
            ExperimentKind::OutageLoss | ExperimentKind::FeedbackRate => self.p_db.len() == 1,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |flag: &'static str, msg: String| Err(ConfigError::Invalid { flag, msg });
        if self.p_db.is_empty() {
            return bad("--p-db", "power sweep is empty".into());
        }
        if self.p_db.iter().any(|p| !p.is_finite()) {
            return bad("--p-db", "power values must be finite".into());
        }
        if self.deltas.is_empty() {
            return bad("--delta", "bin-size sweep is empty".into());
        }
        if self.trials == 0 {
            return bad("--trials", "at least one trial is required".into());
        }
        if self.min_outage_events == Some(0) {
            return bad("--min-outage-events", "must be at least 1".into());
        }
        if self.trial_cap == 0 {
            return bad("--trial-cap", "must be at least 1".into());
        }
        if !(self.r_th.is_finite() && self.r_th > 0.0) {
            return bad("--r-th", format!("target rate must be positive, got {}", self.r_th));
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return bad("--eps", format!("bisection accuracy must be positive, got {}", self.eps));
        }
        if self.lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return bad("--lambda", "channel variances must be positive".into());
        }
        let k = self.receivers();
        if self.kind == ExperimentKind::KUser {
            if k < 2 {
                return bad("--k", "at least two receivers are required".into());
            }
        } else if k != 2 {
            return bad("--lambda", format!("{} needs exactly two variances", self.kind));
        } else if self.lambdas[0] < self.lambdas[1] {
            return bad("--lambda", "the first receiver must have the larger variance".into());
        }
        if let Some((lo, hi)) = self.window {
            if !(lo <= hi) {
                return bad("--window", "window must be lo:hi with lo <= hi".into());
            }
        }
        let fixed_power = matches!(self.kind, ExperimentKind::RateLoss | ExperimentKind::KUser);
        if fixed_power && self.p_db.len() != 1 {
            return bad("--p-db", format!("{} runs at a single power", self.kind));
        }
        let flag = if self.deltas.iter().all(|d| d.fixed().is_some()) {
            "--delta"
        } else {
            "--delta-policy"
        };
        if self.delta_axis() && self.deltas.iter().any(|d| d.fixed().is_none()) {
            return bad(flag, format!("{} sweeps fixed bin sizes only", self.kind));
        }
        for policy in &self.deltas {
            for &p_db in &self.p_db {
                let d = policy.delta_at(db_to_linear(p_db));
                if !(d > 0.0 && d < 1.0) {
                    return bad(
                        flag,
                        format!("bin size {d} from '{policy}' at {p_db} dB is outside (0, 1)"),
                    );
                }
            }
        }
        Ok(())
    }
}

pub fn harmonic_lambdas(k: usize) -> Vec<f64> {
    (1..=k).map(|i| 1.0 / i as f64).collect()
}
