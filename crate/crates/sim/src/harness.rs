//! Monte Carlo drivers, one per experiment kind.
//!
//! Every driver uses common random numbers: trial `t` sees the same channel
//! realization at every power and every bin size, so differences between
//! curves are not sampling noise. Drivers do no I/O; progress is reported
//! through a callback.

use noma_lf_core::channel::{sample_channel_into, ChannelParams, StreamSeed};
use noma_lf_core::db_to_linear;
use noma_lf_core::diversity::{default_window, estimate_diversity};
use noma_lf_core::evaluator::{evaluate_k_user, evaluate_two_user, rate_loss_bound, OutageConfig};
use noma_lf_core::power::{max_min_rate_two_user, tdma_min_rate};
use noma_lf_core::quantizer::{
    default_t_outage, default_t_rate, fle_bits, vle_len, vle_rate_bound, Flavor, QuantizerConfig,
};
use noma_lf_core::stats::Moments;
use serde::Serialize;

use crate::config::{DeltaPolicy, ExperimentConfig, ExperimentKind};
use crate::engine::{Accumulated, Adaptive, Engine};
use crate::error::SimError;

/// One named value at a sweep point. Analytic values have `count == 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub mean: f64,
    pub std_err: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub trials: u64,
    /// False when adaptive stopping hit the trial cap first.
    pub target_reached: bool,
    /// Sorted by name.
    pub metrics: Vec<Metric>,
}

impl SweepPoint {
    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub kind: ExperimentKind,
    pub seed: u64,
    /// `"p_db"` or `"delta"`.
    pub axis: &'static str,
    pub points: Vec<SweepPoint>,
    /// Whole-sweep quantities such as diversity slopes.
    pub summaries: Vec<Metric>,
    pub warnings: Vec<String>,
}

impl RunStats {
    /// `(sweep value, mean)` for every point carrying `name`.
    pub fn series(&self, name: &str) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.metric(name).map(|m| (p.value, m.mean)))
            .collect()
    }

    pub fn summary(&self, name: &str) -> Option<&Metric> {
        self.summaries.iter().find(|m| m.name == name)
    }
}

/// Progress notice sent after each sweep point.
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub kind: ExperimentKind,
    pub point: usize,
    pub of: usize,
    pub p_db: f64,
    pub trials: u64,
    pub target_reached: bool,
}

pub type ProgressFn<'a> = &'a (dyn Fn(Progress) + Sync);

/// Dispatches on `cfg.kind`.
pub fn run(cfg: &ExperimentConfig, engine: &Engine, progress: ProgressFn) -> Result<RunStats, SimError> {
    match cfg.kind {
        ExperimentKind::MinRate => run_min_rate(cfg, engine, progress),
        ExperimentKind::RateLoss => run_rate_loss(cfg, engine, progress),
        ExperimentKind::Outage => run_outage(cfg, engine, progress),
        ExperimentKind::OutageLoss => run_outage_loss(cfg, engine, progress),
        ExperimentKind::FeedbackRate => run_feedback_rate(cfg, engine, progress),
        ExperimentKind::Diversity => run_diversity(cfg, engine, progress),
        ExperimentKind::KUser => run_k_user(cfg, engine, progress),
    }
}

enum Stat {
    Sample(Moments),
    /// Event count carried by a 0/1 metric.
    Sum(Moments),
    Value(f64),
}

struct Cell {
    policy: Option<usize>,
    name: String,
    stat: Stat,
}

impl Cell {
    fn value(policy: Option<usize>, name: impl Into<String>, v: f64) -> Self {
        Cell { policy, name: name.into(), stat: Stat::Value(v) }
    }

    fn metric(&self, name: String) -> Metric {
        match self.stat {
            Stat::Sample(m) => Metric { name, mean: m.mean(), std_err: m.std_err(), count: m.count() },
            Stat::Sum(m) => Metric { name, mean: m.sum(), std_err: 0.0, count: m.count() },
            Stat::Value(v) => Metric { name, mean: v, std_err: 0.0, count: 0 },
        }
    }

    fn mean(&self) -> f64 {
        match self.stat {
            Stat::Sample(m) | Stat::Sum(m) => m.mean(),
            Stat::Value(v) => v,
        }
    }
}

/// Column names for one power point: shared columns, then one group of
/// per-policy columns for each bin-size policy.
struct Layout {
    shared: Vec<String>,
    per_policy: Vec<String>,
    policies: usize,
}

impl Layout {
    fn new(shared: &[&str], per_policy: Vec<String>, policies: usize) -> Self {
        Layout { shared: shared.iter().map(|s| s.to_string()).collect(), per_policy, policies }
    }

    fn width(&self) -> usize {
        self.shared.len() + self.policies * self.per_policy.len()
    }

    fn at(&self, policy: usize, column: usize) -> usize {
        self.shared.len() + policy * self.per_policy.len() + column
    }

    fn cells(&self, acc: &Accumulated) -> Vec<Cell> {
        let mut out = Vec::with_capacity(self.width());
        for (j, name) in self.shared.iter().enumerate() {
            out.push(Cell { policy: None, name: name.clone(), stat: Stat::Sample(acc.metrics[j]) });
        }
        for i in 0..self.policies {
            for (j, name) in self.per_policy.iter().enumerate() {
                let stat = Stat::Sample(acc.metrics[self.at(i, j)]);
                out.push(Cell { policy: Some(i), name: name.clone(), stat });
            }
        }
        out
    }
}

struct PointCells {
    p_db: f64,
    trials: u64,
    target_reached: bool,
    cells: Vec<Cell>,
}

fn find<'a>(cells: &'a [Cell], policy: Option<usize>, name: &str) -> &'a Cell {
    cells
        .iter()
        .find(|c| c.policy == policy && c.name == name)
        .unwrap_or_else(|| panic!("missing column {name}"))
}

fn deltas_at(cfg: &ExperimentConfig, p: f64) -> Vec<f64> {
    cfg.deltas.iter().map(|d| d.delta_at(p)).collect()
}

fn qualified(name: &str, policy: &DeltaPolicy) -> String {
    format!("{name}[delta={policy}]")
}

fn two_user_params(cfg: &ExperimentConfig) -> Result<ChannelParams, SimError> {
    Ok(ChannelParams::two_user(cfg.lambdas[0], cfg.lambdas[1])?)
}

/// Runs the sweep over powers. `event` names the shared 0/1 column that
/// drives adaptive stopping when `cfg.min_outage_events` is set.
fn sweep<M, F>(
    cfg: &ExperimentConfig,
    engine: &Engine,
    progress: ProgressFn,
    layout: &Layout,
    event: Option<usize>,
    make: M,
) -> Result<Vec<PointCells>, SimError>
where
    M: Fn(f64, &[f64]) -> Result<F, SimError>,
    F: Fn(u64, &mut [f64]) + Sync,
{
    let mut points = Vec::with_capacity(cfg.p_db.len());
    for (i, &p_db) in cfg.p_db.iter().enumerate() {
        let p = db_to_linear(p_db);
        let trial = make(p, &deltas_at(cfg, p))?;
        let acc = match (event, cfg.min_outage_events) {
            (Some(event_metric), Some(min_events)) => engine.run_until(
                cfg.trials,
                layout.width(),
                Adaptive { event_metric, min_events, trial_cap: cfg.trial_cap },
                trial,
            ),
            _ => engine.run(cfg.trials, layout.width(), trial),
        };
        progress(Progress {
            kind: cfg.kind,
            point: i + 1,
            of: cfg.p_db.len(),
            p_db,
            trials: acc.trials,
            target_reached: acc.target_reached,
        });
        let mut cells = layout.cells(&acc);
        if let (Some(e), Some(_)) = (event, cfg.min_outage_events) {
            cells.push(Cell { policy: None, name: "events_full".into(), stat: Stat::Sum(acc.metrics[e]) });
            cells.push(Cell::value(None, "target_reached", acc.target_reached as u8 as f64));
        }
        points.push(PointCells { p_db, trials: acc.trials, target_reached: acc.target_reached, cells });
    }
    Ok(points)
}

fn assemble(cfg: &ExperimentConfig, points: Vec<PointCells>) -> RunStats {
    let mut warnings = Vec::new();
    for p in &points {
        if !p.target_reached {
            warnings.push(format!(
                "{} dB: outage-event target not reached within {} trials",
                p.p_db, p.trials
            ));
        }
    }
    let sorted = |mut v: Vec<Metric>| {
        v.sort_by(|a, b| a.name.cmp(&b.name));
        v
    };
    let (axis, points) = if cfg.delta_axis() {
        let point = points.into_iter().next().expect("validated nonempty sweep");
        let rows = cfg
            .deltas
            .iter()
            .enumerate()
            .map(|(i, policy)| SweepPoint {
                value: policy.fixed().expect("validated fixed bin sizes"),
                trials: point.trials,
                target_reached: point.target_reached,
                metrics: sorted(
                    point
                        .cells
                        .iter()
                        .filter(|c| c.policy.is_none() || c.policy == Some(i))
                        .map(|c| c.metric(c.name.clone()))
                        .collect(),
                ),
            })
            .collect();
        ("delta", rows)
    } else {
        let rows = points
            .into_iter()
            .map(|p| SweepPoint {
                value: p.p_db,
                trials: p.trials,
                target_reached: p.target_reached,
                metrics: sorted(
                    p.cells
                        .iter()
                        .map(|c| match c.policy {
                            None => c.metric(c.name.clone()),
                            Some(i) => c.metric(qualified(&c.name, &cfg.deltas[i])),
                        })
                        .collect(),
                ),
            })
            .collect();
        ("p_db", rows)
    };
    RunStats { kind: cfg.kind, seed: cfg.seed, axis, points, summaries: Vec::new(), warnings }
}

fn rate_quantizers(deltas: &[f64], lambda1: f64) -> Result<Vec<QuantizerConfig>, SimError> {
    deltas
        .iter()
        .map(|&d| Ok(QuantizerConfig::with_default_t(d, lambda1, Flavor::RateAdaptation)?))
        .collect()
}

fn outage_quantizers(deltas: &[f64], lambda1: f64) -> Result<Vec<QuantizerConfig>, SimError> {
    deltas
        .iter()
        .map(|&d| Ok(QuantizerConfig::with_default_t(d, lambda1, Flavor::Outage)?))
        .collect()
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Full-CSI max-min rate, the adapted rate under `q_r` for each policy, and
/// the TDMA baseline against transmit power.
pub fn run_min_rate(cfg: &ExperimentConfig, engine: &Engine, progress: ProgressFn) -> Result<RunStats, SimError> {
    let params = two_user_params(cfg)?;
    let layout = Layout::new(&["r_full", "r_tdma"], names(&["r_qr", "rate_loss"]), cfg.deltas.len());
    let points = sweep(cfg, engine, progress, &layout, None, |p, deltas| {
        let qs = rate_quantizers(deltas, cfg.lambdas[0])?;
        let (params, layout, seed) = (&params, &layout, cfg.seed);
        Ok(move |t: u64, row: &mut [f64]| {
            let mut g = [0.0; 2];
            sample_channel_into(params, StreamSeed::new(seed, t), &mut g);
            row[0] = max_min_rate_two_user(g[0], g[1], p).unwrap_or(0.0);
            row[1] = tdma_min_rate(&g, p);
            for (i, q) in qs.iter().enumerate() {
                let o = evaluate_two_user(g, p, q, None);
                row[layout.at(i, 0)] = o.r_adapted_min;
                row[layout.at(i, 1)] = o.rate_loss;
            }
        })
    })?;
    Ok(assemble(cfg, points))
}

/// Mean rate loss and measured VLE feedback per bin size at one power, with
/// the analytic loss bound beside it.
pub fn run_rate_loss(cfg: &ExperimentConfig, engine: &Engine, progress: ProgressFn) -> Result<RunStats, SimError> {
    let params = two_user_params(cfg)?;
    let (l1, l2) = (cfg.lambdas[0], cfg.lambdas[1]);
    let layout = Layout::new(
        &["r_full", "r_tdma"],
        names(&["r_qr", "rate_loss", "vle_1", "vle_2"]),
        cfg.deltas.len(),
    );
    let mut points = sweep(cfg, engine, progress, &layout, None, |p, deltas| {
        let qs = rate_quantizers(deltas, l1)?;
        let (params, layout, seed) = (&params, &layout, cfg.seed);
        Ok(move |t: u64, row: &mut [f64]| {
            let mut g = [0.0; 2];
            sample_channel_into(params, StreamSeed::new(seed, t), &mut g);
            row[0] = max_min_rate_two_user(g[0], g[1], p).unwrap_or(0.0);
            row[1] = tdma_min_rate(&g, p);
            for (i, q) in qs.iter().enumerate() {
                let o = evaluate_two_user(g, p, q, None);
                row[layout.at(i, 0)] = o.r_adapted_min;
                row[layout.at(i, 1)] = o.rate_loss;
                row[layout.at(i, 2)] = o.feedback_bits[0] as f64;
                row[layout.at(i, 3)] = o.feedback_bits[1] as f64;
            }
        })
    })?;
    for point in &mut points {
        let p = db_to_linear(point.p_db);
        for (i, &d) in deltas_at(cfg, p).iter().enumerate() {
            let t = default_t_rate(d, l1)?;
            let vle_min = find(&point.cells, Some(i), "vle_1").mean().min(find(&point.cells, Some(i), "vle_2").mean());
            point.cells.push(Cell::value(Some(i), "loss_bound", rate_loss_bound(p, d, t, l1, l2)));
            point.cells.push(Cell::value(Some(i), "vle_min", vle_min));
            point.cells.push(Cell::value(Some(i), "t_r", t as f64));
        }
    }
    Ok(assemble(cfg, points))
}

/// Outage probabilities with full CSI, under `q_o` for each policy, and with
/// TDMA. Each power point runs until enough full-CSI outages were seen when
/// `cfg.min_outage_events` is set.
pub fn run_outage(cfg: &ExperimentConfig, engine: &Engine, progress: ProgressFn) -> Result<RunStats, SimError> {
    let params = two_user_params(cfg)?;
    let outage = OutageConfig::new(cfg.r_th)?;
    let layout = Layout::new(
        &["out_min", "out_tdma"],
        names(&["out_loss", "out_q", "out_q_rx1", "out_q_rx2"]),
        cfg.deltas.len(),
    );
    let points = sweep(cfg, engine, progress, &layout, Some(0), |p, deltas| {
        let qs = outage_quantizers(deltas, cfg.lambdas[0])?;
        let (params, layout, seed, outage) = (&params, &layout, cfg.seed, &outage);
        Ok(move |t: u64, row: &mut [f64]| {
            let mut g = [0.0; 2];
            sample_channel_into(params, StreamSeed::new(seed, t), &mut g);
            let full = max_min_rate_two_user(g[0], g[1], p).unwrap_or(0.0);
            row[0] = outage.is_outage(full) as u8 as f64;
            row[1] = outage.is_outage(tdma_min_rate(&g, p)) as u8 as f64;
            for (i, q) in qs.iter().enumerate() {
                let o = evaluate_two_user(g, p, q, Some(outage));
                row[layout.at(i, 0)] = (o.outage_q && !o.outage_full) as u8 as f64;
                row[layout.at(i, 1)] = o.outage_q as u8 as f64;
                row[layout.at(i, 2)] = outage.is_outage(o.receiver_rates[0]) as u8 as f64;
                row[layout.at(i, 3)] = outage.is_outage(o.receiver_rates[1]) as u8 as f64;
            }
        })
    })?;
    Ok(assemble(cfg, points))
}

/// Outage-probability loss of `q_o` against full CSI, with `sqrt(delta)` and
/// the measured minimum VLE rate as alternative abscissas.
pub fn run_outage_loss(cfg: &ExperimentConfig, engine: &Engine, progress: ProgressFn) -> Result<RunStats, SimError> {
    let params = two_user_params(cfg)?;
    let outage = OutageConfig::new(cfg.r_th)?;
    let layout = Layout::new(
        &["out_min"],
        names(&["out_loss", "out_q", "vle_o_1", "vle_o_2"]),
        cfg.deltas.len(),
    );
    let mut points = sweep(cfg, engine, progress, &layout, Some(0), |p, deltas| {
        let qs = outage_quantizers(deltas, cfg.lambdas[0])?;
        let (params, layout, seed, outage) = (&params, &layout, cfg.seed, &outage);
        Ok(move |t: u64, row: &mut [f64]| {
            let mut g = [0.0; 2];
            sample_channel_into(params, StreamSeed::new(seed, t), &mut g);
            let full = max_min_rate_two_user(g[0], g[1], p).unwrap_or(0.0);
            row[0] = outage.is_outage(full) as u8 as f64;
            for (i, q) in qs.iter().enumerate() {
                let o = evaluate_two_user(g, p, q, Some(outage));
                row[layout.at(i, 0)] = (o.outage_q && !o.outage_full) as u8 as f64;
                row[layout.at(i, 1)] = o.outage_q as u8 as f64;
                row[layout.at(i, 2)] = o.feedback_bits[0] as f64;
                row[layout.at(i, 3)] = o.feedback_bits[1] as f64;
            }
        })
    })?;
    for point in &mut points {
        let p = db_to_linear(point.p_db);
        for (i, &d) in deltas_at(cfg, p).iter().enumerate() {
            let vle_min = find(&point.cells, Some(i), "vle_o_1").mean().min(find(&point.cells, Some(i), "vle_o_2").mean());
            point.cells.push(Cell::value(Some(i), "sqrt_delta", d.sqrt()));
            point.cells.push(Cell::value(Some(i), "vle_o_min", vle_min));
        }
    }
    Ok(assemble(cfg, points))
}

/// Mean VLE length per receiver for both quantizers, next to the fixed-length
/// code size, the level count and the VLE bound.
pub fn run_feedback_rate(cfg: &ExperimentConfig, engine: &Engine, progress: ProgressFn) -> Result<RunStats, SimError> {
    let params = two_user_params(cfg)?;
    let (l1, l2) = (cfg.lambdas[0], cfg.lambdas[1]);
    let layout = Layout::new(&[], names(&["vle_o_1", "vle_o_2", "vle_r_1", "vle_r_2"]), cfg.deltas.len());
    let mut points = sweep(cfg, engine, progress, &layout, None, |_, deltas| {
        let qr = rate_quantizers(deltas, l1)?;
        let qo = outage_quantizers(deltas, l1)?;
        let (params, layout, seed) = (&params, &layout, cfg.seed);
        Ok(move |t: u64, row: &mut [f64]| {
            let mut g = [0.0; 2];
            sample_channel_into(params, StreamSeed::new(seed, t), &mut g);
            for (i, (r, o)) in qr.iter().zip(&qo).enumerate() {
                row[layout.at(i, 0)] = vle_len(o.level(g[0])) as f64;
                row[layout.at(i, 1)] = vle_len(o.level(g[1])) as f64;
                row[layout.at(i, 2)] = vle_len(r.level(g[0])) as f64;
                row[layout.at(i, 3)] = vle_len(r.level(g[1])) as f64;
            }
        })
    })?;
    for point in &mut points {
        let p = db_to_linear(point.p_db);
        for (i, &d) in deltas_at(cfg, p).iter().enumerate() {
            let (t_r, t_o) = (default_t_rate(d, l1)?, default_t_outage(d, l1)?);
            point.cells.push(Cell::value(Some(i), "delta", d));
            point.cells.push(Cell::value(Some(i), "t_r", t_r as f64));
            point.cells.push(Cell::value(Some(i), "t_o", t_o as f64));
            point.cells.push(Cell::value(Some(i), "fle_r", fle_bits(t_r, Flavor::RateAdaptation) as f64));
            point.cells.push(Cell::value(Some(i), "fle_o", fle_bits(t_o, Flavor::Outage) as f64));
            point.cells.push(Cell::value(Some(i), "vle_bound_1", vle_rate_bound(d, l1)));
            point.cells.push(Cell::value(Some(i), "vle_bound_2", vle_rate_bound(d, l2)));
        }
    }
    Ok(assemble(cfg, points))
}

/// Outage curves plus their high-power slopes. Summaries are
/// `diversity_full`, and `diversity_q[delta=..]` / `diversity_q_rx1[delta=..]`
/// per policy; a slope is omitted with a warning when its window holds a
/// zero-probability point.
pub fn run_diversity(cfg: &ExperimentConfig, engine: &Engine, progress: ProgressFn) -> Result<RunStats, SimError> {
    let params = two_user_params(cfg)?;
    let outage = OutageConfig::new(cfg.r_th)?;
    let layout = Layout::new(&["out_min"], names(&["out_q", "out_q_rx1"]), cfg.deltas.len());
    let points = sweep(cfg, engine, progress, &layout, Some(0), |p, deltas| {
        let qs = outage_quantizers(deltas, cfg.lambdas[0])?;
        let (params, layout, seed, outage) = (&params, &layout, cfg.seed, &outage);
        Ok(move |t: u64, row: &mut [f64]| {
            let mut g = [0.0; 2];
            sample_channel_into(params, StreamSeed::new(seed, t), &mut g);
            let full = max_min_rate_two_user(g[0], g[1], p).unwrap_or(0.0);
            row[0] = outage.is_outage(full) as u8 as f64;
            for (i, q) in qs.iter().enumerate() {
                let o = evaluate_two_user(g, p, q, Some(outage));
                row[layout.at(i, 0)] = o.outage_q as u8 as f64;
                row[layout.at(i, 1)] = outage.is_outage(o.receiver_rates[0]) as u8 as f64;
            }
        })
    })?;
    let mut stats = assemble(cfg, points);
    let Some(window) = cfg.window.or_else(|| default_window(&cfg.p_db)) else {
        return Ok(stats);
    };
    let mut curves = vec![("diversity_full".to_string(), "out_min".to_string())];
    for policy in &cfg.deltas {
        curves.push((qualified("diversity_q", policy), qualified("out_q", policy)));
        curves.push((qualified("diversity_q_rx1", policy), qualified("out_q_rx1", policy)));
    }
    for (summary, column) in curves {
        match estimate_diversity(&stats.series(&column), window) {
            Ok(slope) => stats.summaries.push(Metric { name: summary, mean: slope, std_err: 0.0, count: 0 }),
            Err(e) => stats.warnings.push(format!("{summary}: {e}")),
        }
    }
    stats.summaries.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(stats)
}

/// `K`-receiver losses per bin size at one power. Receiver `k` uses
/// `T_k = ceil((lambda_k / delta) ln(1 / delta))` levels. Rate loss uses
/// `q_r`, outage loss uses `q_o`.
pub fn run_k_user(cfg: &ExperimentConfig, engine: &Engine, progress: ProgressFn) -> Result<RunStats, SimError> {
    let params = ChannelParams::new(cfg.lambdas.clone())?;
    let outage = OutageConfig::new(cfg.r_th)?;
    let k = params.len();
    let mut per_policy = names(&["out_loss", "out_q", "r_qr", "rate_loss"]);
    per_policy.extend((1..=k).map(|i| format!("vle_{i}")));
    let layout = Layout::new(&["out_min", "r_full", "rate_spread"], per_policy, cfg.deltas.len());
    let mut points = sweep(cfg, engine, progress, &layout, Some(0), |p, deltas| {
        let build = |flavor: Flavor| -> Result<Vec<Vec<QuantizerConfig>>, SimError> {
            deltas
                .iter()
                .map(|&d| {
                    cfg.lambdas
                        .iter()
                        .map(|&l| Ok(QuantizerConfig::with_default_t(d, l, flavor)?))
                        .collect()
                })
                .collect()
        };
        let (qr, qo) = (build(Flavor::RateAdaptation)?, build(Flavor::Outage)?);
        let (params, layout, seed, outage, eps) = (&params, &layout, cfg.seed, &outage, cfg.eps);
        Ok(move |t: u64, row: &mut [f64]| {
            let mut g = vec![0.0; k];
            sample_channel_into(params, StreamSeed::new(seed, t), &mut g);
            for (i, (r, o)) in qr.iter().zip(&qo).enumerate() {
                let rate = evaluate_k_user(&g, p, eps, r, None).expect("validated inputs");
                let out = evaluate_k_user(&g, p, eps, o, Some(outage)).expect("validated inputs");
                if i == 0 {
                    row[0] = out.outage_full as u8 as f64;
                    row[1] = rate.r_max_full;
                    row[2] = rate.full_rate_spread;
                }
                row[layout.at(i, 0)] = (out.outage_q && !out.outage_full) as u8 as f64;
                row[layout.at(i, 1)] = out.outage_q as u8 as f64;
                row[layout.at(i, 2)] = rate.r_adapted_min;
                row[layout.at(i, 3)] = rate.rate_loss;
                for (j, &bits) in rate.feedback_bits.iter().enumerate() {
                    row[layout.at(i, 4 + j)] = bits as f64;
                }
            }
        })
    })?;
    for point in &mut points {
        let spread = match find(&point.cells, None, "rate_spread").stat {
            Stat::Sample(m) => m.max(),
            _ => unreachable!(),
        };
        point.cells.push(Cell::value(None, "rate_spread_max", spread));
        let p = db_to_linear(point.p_db);
        for (i, &d) in deltas_at(cfg, p).iter().enumerate() {
            let vles: Vec<f64> = (1..=k).map(|j| find(&point.cells, Some(i), &format!("vle_{j}")).mean()).collect();
            let vle_min = vles.iter().copied().fold(f64::INFINITY, f64::min);
            point.cells.push(Cell::value(Some(i), "vle_min", vle_min));
            for (j, &l) in cfg.lambdas.iter().enumerate() {
                point.cells.push(Cell::value(Some(i), format!("t_{}", j + 1), default_t_rate(d, l)? as f64));
            }
        }
    }
    Ok(assemble(cfg, points))
}
