//! Rayleigh-fading power gains drawn from counter-based random streams.
//!
//! Every trial owns its own ChaCha stream: the master seed keys the cipher and
//! the trial index selects the stream, so a draw depends only on
//! `(seed, trial)` and never on how trials are scheduled across workers.

use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{Error, Result};

/// Mean power gains `λ_k` of the receivers.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    variances: Vec<f64>,
}

impl ChannelParams {
    pub fn new(variances: Vec<f64>) -> Result<Self> {
        if variances.is_empty() {
            return Err(Error::NoReceivers);
        }
        if let Some(&bad) = variances.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidVariance(bad));
        }
        Ok(Self { variances })
    }

    /// Two receivers; the first must be the statistically stronger one.
    pub fn two_user(lambda1: f64, lambda2: f64) -> Result<Self> {
        let params = Self::new(alloc::vec![lambda1, lambda2])?;
        if lambda1 < lambda2 {
            return Err(Error::Unordered { strong: lambda1, weak: lambda2 });
        }
        Ok(params)
    }

    /// `K` receivers with `λ_k = 1/k`.
    pub fn harmonic(k: usize) -> Result<Self> {
        Self::new((1..=k).map(|i| 1.0 / i as f64).collect())
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn len(&self) -> usize {
        self.variances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variances.is_empty()
    }
}

/// Instantaneous power gains `H_k = |h_k|^2` of one channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    pub gains: Vec<f64>,
}

/// Identifies the random stream of a single trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamSeed {
    pub seed: u64,
    pub trial: u64,
}

impl StreamSeed {
    pub fn new(seed: u64, trial: u64) -> Self {
        Self { seed, trial }
    }

    /// Random generator positioned at the start of this trial's stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.trial);
        rng
    }
}

/// Uniform draw in `(0, 1)`; exact zeros are redrawn.
fn open_unit(rng: &mut impl RngCore) -> f64 {
    loop {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u > 0.0 {
            return u;
        }
    }
}

/// Exponential variate with the given mean via inversion.
pub fn exponential(rng: &mut impl RngCore, mean: f64) -> f64 {
    -mean * libm::log(open_unit(rng))
}

/// Fills `out` with one gain per receiver, exponential with mean `λ_k`.
///
/// Panics if `out` and `params` disagree in length.
pub fn sample_channel_into(params: &ChannelParams, seed: StreamSeed, out: &mut [f64]) {
    assert_eq!(out.len(), params.len(), "gain buffer length mismatch");
    let mut rng = seed.rng();
    for (gain, &lambda) in out.iter_mut().zip(&params.variances) {
        *gain = exponential(&mut rng, lambda);
    }
}

pub fn sample_channel(params: &ChannelParams, seed: StreamSeed) -> ChannelState {
    let mut gains = alloc::vec![0.0; params.len()];
    sample_channel_into(params, seed, &mut gains);
    ChannelState { gains }
}
