//! Deterministic parallel trial loop.
//!
//! Trials are cut into fixed blocks counted from trial 0. Each block fills its
//! own accumulators in trial order, and blocks are merged pairwise in block
//! order, so the worker count never changes a single bit of the result.

use std::ops::Range;

use noma_lf_core::stats::{merge_pairwise, Moments};
use rayon::prelude::*;

use crate::error::SimError;

/// Trials per block.
pub const BLOCK: u64 = 16_384;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "NOMA_LF_WORKERS";

pub struct Engine {
    pool: rayon::ThreadPool,
}

/// Accumulated samples for one sweep point.
#[derive(Debug, Clone)]
pub struct Accumulated {
    pub metrics: Vec<Moments>,
    pub trials: u64,
    /// False when adaptive stopping ran into the trial cap.
    pub target_reached: bool,
}

/// Stop rule for [`Engine::run_until`].
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    /// Index of the 0/1 metric whose sum is the event count.
    pub event_metric: usize,
    pub min_events: u64,
    pub trial_cap: u64,
}

impl Engine {
    /// `workers = None` reads [`WORKERS_ENV`], then falls back to all cores.
    pub fn new(workers: Option<usize>) -> Result<Self, SimError> {
        let workers = match workers {
            Some(n) => n,
            None => match std::env::var(WORKERS_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| SimError::Workers(v))?,
                Err(_) => 0,
            },
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| SimError::Workers(e.to_string()))?;
        Ok(Engine { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    fn blocks<F>(&self, range: Range<u64>, width: usize, trial: &F) -> Vec<Vec<Moments>>
    where
        F: Fn(u64, &mut [f64]) + Sync,
    {
        let first = range.start / BLOCK;
        let last = range.end.div_ceil(BLOCK);
        self.pool.install(|| {
            (first..last)
                .into_par_iter()
                .map(|b| {
                    let lo = (b * BLOCK).max(range.start);
                    let hi = ((b + 1) * BLOCK).min(range.end);
                    let mut acc = vec![Moments::new(); width];
                    let mut row = vec![0.0; width];
                    for t in lo..hi {
                        trial(t, &mut row);
                        for (m, &x) in acc.iter_mut().zip(&row) {
                            m.push(x);
                        }
                    }
                    acc
                })
                .collect()
        })
    }

    /// Runs trials `0..trials`; `trial` writes `width` samples per call.
    pub fn run<F>(&self, trials: u64, width: usize, trial: F) -> Accumulated
    where
        F: Fn(u64, &mut [f64]) + Sync,
    {
        let blocks = self.blocks(0..trials, width, &trial);
        Accumulated { metrics: merge(&blocks, width), trials, target_reached: true }
    }

    /// Starts with `initial` trials and doubles the total until the event
    /// metric sums to `min_events` or the cap is reached. Batch boundaries
    /// depend only on the counts, never on timing.
    pub fn run_until<F>(&self, initial: u64, width: usize, stop: Adaptive, trial: F) -> Accumulated
    where
        F: Fn(u64, &mut [f64]) + Sync,
    {
        let mut blocks = Vec::new();
        let mut done = 0;
        let mut target = initial.min(stop.trial_cap).max(1);
        loop {
            blocks.extend(self.blocks(done..target, width, &trial));
            done = target;
            let merged = merge(&blocks, width);
            let events = merged[stop.event_metric].sum();
            if events >= stop.min_events as f64 || done >= stop.trial_cap {
                return Accumulated {
                    metrics: merged,
                    trials: done,
                    target_reached: events >= stop.min_events as f64,
                };
            }
            target = done.saturating_mul(2).min(stop.trial_cap);
        }
    }
}

fn merge(blocks: &[Vec<Moments>], width: usize) -> Vec<Moments> {
    (0..width)
        .map(|j| {
            let column: Vec<Moments> = blocks.iter().map(|b| b[j]).collect();
            merge_pairwise(&column)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noisy(t: u64, row: &mut [f64]) {
        let x = ((t.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 11) as f64) / (1u64 << 53) as f64;
        row[0] = x;
        row[1] = (x < 0.01) as u8 as f64;
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let n = 5 * BLOCK + 123;
        let a = Engine::new(Some(1)).unwrap().run(n, 2, noisy);
        let b = Engine::new(Some(4)).unwrap().run(n, 2, noisy);
        assert_eq!(a.metrics, b.metrics);
        assert_eq!(a.metrics[0].count(), n);
    }

    #[test]
    fn adaptive_reaches_target_or_flags_cap() {
        let engine = Engine::new(Some(2)).unwrap();
        let stop = Adaptive { event_metric: 1, min_events: 500, trial_cap: 1 << 30 };
        let r = engine.run_until(1000, 2, stop, noisy);
        assert!(r.target_reached);
        assert!(r.metrics[1].sum() >= 500.0);
        assert_eq!(r.metrics[0].count(), r.trials);

        let capped = Adaptive { event_metric: 1, min_events: 500, trial_cap: 20_000 };
        let r = engine.run_until(1000, 2, capped, noisy);
        assert!(!r.target_reached);
        assert_eq!(r.trials, 20_000);
    }
}
