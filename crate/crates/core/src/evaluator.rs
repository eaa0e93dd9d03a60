//! One channel realization through the limited-feedback pipeline.
//!
//! Each receiver quantizes its own gain and feeds back the level. The base
//! station picks the decoding order and power split from the quantized gains
//! as if they were exact, then transmits. Rate adaptation uses the rates the
//! quantized gains promise; the outage view evaluates the chosen split on the
//! true gains against a fixed target rate.

use alloc::vec::Vec;

use crate::power::{
    equalizing_alpha, log2_1p, max_min_rate_two_user, solve_max_min_k, strong_rate, weak_rate,
    DecodingOrder,
};
use crate::quantizer::{vle_len, QuantizerConfig};
use crate::{Error, Result};

/// Target rate for outage, with `beta = 2^r_th - 1` cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageConfig {
    r_th: f64,
    beta: f64,
}

impl OutageConfig {
    pub fn new(r_th: f64) -> Result<Self> {
        if !(r_th.is_finite() && r_th > 0.0) {
            return Err(Error::InvalidTargetRate(r_th));
        }
        Ok(Self { r_th, beta: crate::power::exp2_m1(r_th) })
    }

    pub fn r_th(&self) -> f64 {
        self.r_th
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Strict: a rate equal to the target is not an outage.
    #[inline]
    pub fn is_outage(&self, rate: f64) -> bool {
        rate < self.r_th
    }
}

fn check_quantized_pair(q_strong: f64, q_weak: f64) -> Result<()> {
    for q in [q_strong, q_weak] {
        if !(q.is_finite() && q >= 0.0) {
            return Err(Error::InvalidGain(q));
        }
    }
    if q_strong < q_weak {
        return Err(Error::Unordered { strong: q_strong, weak: q_weak });
    }
    Ok(())
}

#[inline]
fn quantized_alpha(q_strong: f64, q_weak: f64, p: f64) -> f64 {
    if q_strong > 0.0 && q_weak > 0.0 {
        equalizing_alpha(q_strong, q_weak, p)
    } else {
        0.0
    }
}

/// Power fraction of the stronger receiver computed from quantized gains;
/// zero when either quantized gain is zero.
pub fn alpha_from_quantized(q_strong: f64, q_weak: f64, p: f64) -> Result<f64> {
    check_quantized_pair(q_strong, q_weak)?;
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::InvalidPower(p));
    }
    Ok(quantized_alpha(q_strong, q_weak, p))
}

/// Transmission rates `(strong, weak)` chosen from the quantized gains.
pub fn adapted_rates(q_strong: f64, q_weak: f64, p: f64) -> Result<(f64, f64)> {
    let alpha = alpha_from_quantized(q_strong, q_weak, p)?;
    Ok((strong_rate(alpha, q_strong, p), weak_rate(alpha, q_weak, p)))
}

/// Slack for comparing rates that are equal in exact arithmetic.
const RATE_SLACK: f64 = 1e-12;

/// Whether the adapted rates are decodable on the true channel: the weak
/// receiver decodes its message, the strong receiver decodes the weak message
/// and, after cancelling it, its own.
pub fn achievable_check(h_strong: f64, h_weak: f64, q_strong: f64, q_weak: f64, p: f64) -> bool {
    let Ok(alpha) = alpha_from_quantized(q_strong, q_weak, p) else {
        return false;
    };
    let r_strong_q = strong_rate(alpha, q_strong, p);
    let r_weak_q = weak_rate(alpha, q_weak, p);
    weak_rate(alpha, h_weak, p) + RATE_SLACK >= r_weak_q
        && weak_rate(alpha, h_strong, p) + RATE_SLACK >= r_weak_q
        && strong_rate(alpha, h_strong, p) + RATE_SLACK >= r_strong_q
}

/// Rates `[receiver 1, receiver 2]` on the true gains when `alpha` goes to
/// the receiver that `order` marks as strong.
#[inline]
pub fn receiver_rates(h1: f64, h2: f64, alpha: f64, order: DecodingOrder, p: f64) -> [f64; 2] {
    match order {
        DecodingOrder::FirstStrong => [strong_rate(alpha, h1, p), weak_rate(alpha, h2, p)],
        DecodingOrder::SecondStrong => [weak_rate(alpha, h1, p), strong_rate(alpha, h2, p)],
    }
}

/// Smaller of the two rates actually delivered on the true gains.
pub fn actual_min_rate(h1: f64, h2: f64, alpha_q: f64, order: DecodingOrder, p: f64) -> f64 {
    let [r1, r2] = receiver_rates(h1, h2, alpha_q, order, p);
    r1.min(r2)
}

pub fn outage_indicator(
    h1: f64,
    h2: f64,
    alpha_q: f64,
    order: DecodingOrder,
    p: f64,
    cfg: &OutageConfig,
) -> bool {
    cfg.is_outage(actual_min_rate(h1, h2, alpha_q, order, p))
}

/// `max{4 + lambda1 / lambda2, lambda2}`.
pub fn loss_constant(lambda1: f64, lambda2: f64) -> f64 {
    (4.0 + lambda1 / lambda2).max(lambda2)
}

/// Upper bound on the mean rate loss of the rate-adaptation quantizer:
/// `log2(1 + C0 * p * max{exp(-T delta / lambda1), delta})`.
pub fn rate_loss_bound(p: f64, delta: f64, t: u64, lambda1: f64, lambda2: f64) -> f64 {
    let tail = libm::exp(-(t as f64) * delta / lambda1);
    log2_1p(loss_constant(lambda1, lambda2) * p * tail.max(delta))
}

/// Joint-event tallies for the outage loss.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OutageCounts {
    /// Quantized outage while full CSI would have succeeded.
    pub joint_events: u64,
    pub trials: u64,
}

impl OutageCounts {
    pub fn record(&mut self, outage_full: bool, outage_q: bool) {
        self.trials += 1;
        if outage_q && !outage_full {
            self.joint_events += 1;
        }
    }
}

/// `Pr{quantized outage and no full-CSI outage}`, i.e. `out_q - out_min`.
pub fn outage_loss(counts: &OutageCounts) -> f64 {
    if counts.trials == 0 {
        0.0
    } else {
        counts.joint_events as f64 / counts.trials as f64
    }
}

/// `2xy / (sqrt((x+y)^2 + 4 x y^2 p) + x + y)`.
pub fn effective_snr_first_strong(x: f64, y: f64, p: f64) -> f64 {
    2.0 * x * y / (libm::sqrt((x + y) * (x + y) + 4.0 * x * y * y * p) + x + y)
}

/// `2xy / (sqrt((x+y)^2 + 4 x^2 y p) + x + y)`.
pub fn effective_snr_second_strong(x: f64, y: f64, p: f64) -> f64 {
    2.0 * x * y / (libm::sqrt((x + y) * (x + y) + 4.0 * x * x * y * p) + x + y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrDecomposition {
    /// Effective SNR per unit power: `r_max = log2(1 + p * snr_max)`.
    pub snr_max: f64,
    pub first_strong: f64,
    pub second_strong: f64,
}

pub fn snr_decomposition(h1: f64, h2: f64, p: f64) -> SnrDecomposition {
    let ge = effective_snr_first_strong(h1, h2, p);
    let lt = effective_snr_second_strong(h1, h2, p);
    SnrDecomposition { snr_max: if h1 >= h2 { ge } else { lt }, first_strong: ge, second_strong: lt }
}

/// Everything measured on one two-receiver realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub r_max_full: f64,
    /// Minimum of the two rates chosen from quantized gains.
    pub r_adapted_min: f64,
    /// `r_max_full - r_adapted_min`.
    pub rate_loss: f64,
    /// Minimum rate delivered on the true gains with the quantized split.
    pub r_q_actual: f64,
    /// Per-receiver delivered rates on the true gains.
    pub receiver_rates: [f64; 2],
    pub outage_full: bool,
    pub outage_q: bool,
    pub levels: [u64; 2],
    /// VLE codeword length for each receiver's level.
    pub feedback_bits: [u32; 2],
    pub alpha_q: f64,
    pub order_q: DecodingOrder,
}

/// Runs one realization `gains = [H1, H2]` through quantization, allocation
/// and evaluation. Outage flags are false when `outage` is `None`.
///
/// Gains must be positive.
pub fn evaluate_two_user(
    gains: [f64; 2],
    p: f64,
    quantizer: &QuantizerConfig,
    outage: Option<&OutageConfig>,
) -> TrialOutcome {
    let [h1, h2] = gains;
    let r_max_full = max_min_rate_two_user(h1, h2, p).unwrap_or(0.0);

    let levels = [quantizer.level(h1), quantizer.level(h2)];
    let (q1, q2) = (quantizer.reconstruct(levels[0]), quantizer.reconstruct(levels[1]));
    let order_q = DecodingOrder::from_gains(q1, q2);
    let (q_strong, q_weak) = match order_q {
        DecodingOrder::FirstStrong => (q1, q2),
        DecodingOrder::SecondStrong => (q2, q1),
    };
    let alpha_q = quantized_alpha(q_strong, q_weak, p);
    let r_adapted_min = strong_rate(alpha_q, q_strong, p).min(weak_rate(alpha_q, q_weak, p));

    let receiver_rates = receiver_rates(h1, h2, alpha_q, order_q, p);
    let r_q_actual = receiver_rates[0].min(receiver_rates[1]);
    let (outage_full, outage_q) = match outage {
        Some(cfg) => (cfg.is_outage(r_max_full), cfg.is_outage(r_q_actual)),
        None => (false, false),
    };

    TrialOutcome {
        r_max_full,
        r_adapted_min,
        rate_loss: r_max_full - r_adapted_min,
        r_q_actual,
        receiver_rates,
        outage_full,
        outage_q,
        levels,
        feedback_bits: [vle_len(levels[0]), vle_len(levels[1])],
        alpha_q,
        order_q,
    }
}

/// Everything measured on one `K`-receiver realization.
#[derive(Debug, Clone, PartialEq)]
pub struct KUserOutcome {
    pub r_max_full: f64,
    /// Max-min rate solved on the quantized gains; zero if any quantized gain is zero.
    pub r_adapted_min: f64,
    pub rate_loss: f64,
    /// Minimum rate delivered on the true gains with the quantized allocation.
    pub r_q_actual: f64,
    pub outage_full: bool,
    pub outage_q: bool,
    pub feedback_bits: Vec<u32>,
    /// Largest minus smallest rate under the full-CSI allocation.
    pub full_rate_spread: f64,
}

fn sic_rates(alphas: &[f64], order: &[usize], gains: &[f64], p: f64) -> Vec<f64> {
    let mut rates = alloc::vec![0.0; gains.len()];
    let mut interference = 0.0;
    for &i in order {
        rates[i] = log2_1p(alphas[i] / (interference + 1.0 / (p * gains[i])));
        interference += alphas[i];
    }
    rates
}

fn spread(rates: &[f64]) -> f64 {
    let hi = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = rates.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// `K`-receiver counterpart of [`evaluate_two_user`]: bisection on the true
/// gains gives the full-CSI reference, bisection on the quantized gains gives
/// the allocation actually used. Each receiver has its own quantizer.
pub fn evaluate_k_user(
    gains: &[f64],
    p: f64,
    eps: f64,
    quantizers: &[QuantizerConfig],
    outage: Option<&OutageConfig>,
) -> Result<KUserOutcome> {
    if quantizers.len() != gains.len() {
        return Err(Error::IndexOutOfRange { index: quantizers.len(), count: gains.len() });
    }
    let full = solve_max_min_k(gains, p, eps)?;
    let full_rates = sic_rates(&full.allocation.alphas, &full.allocation.order, gains, p);

    let levels: Vec<u64> = gains.iter().zip(quantizers).map(|(&h, q)| q.level(h)).collect();
    let quantized: Vec<f64> =
        levels.iter().zip(quantizers).map(|(&l, q)| q.reconstruct(l)).collect();

    let (r_adapted_min, r_q_actual) = if quantized.iter().any(|&q| q <= 0.0) {
        (0.0, 0.0)
    } else {
        let adapted = solve_max_min_k(&quantized, p, eps)?;
        let delivered =
            sic_rates(&adapted.allocation.alphas, &adapted.allocation.order, gains, p);
        (adapted.r_max, delivered.iter().copied().fold(f64::INFINITY, f64::min))
    };
    let (outage_full, outage_q) = match outage {
        Some(cfg) => (cfg.is_outage(full.r_max), cfg.is_outage(r_q_actual)),
        None => (false, false),
    };

    Ok(KUserOutcome {
        r_max_full: full.r_max,
        r_adapted_min,
        rate_loss: full.r_max - r_adapted_min,
        r_q_actual,
        outage_full,
        outage_q,
        feedback_bits: levels.iter().map(|&l| vle_len(l)).collect(),
        full_rate_spread: spread(&full_rates),
    })
}
