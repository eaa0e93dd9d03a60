//! Max-min fair power allocation with full channel knowledge.
//!
//! With two receivers the optimum has a closed form. With `K` receivers every
//! receiver gets the same rate at the optimum, which reduces the problem to
//! finding the root of the increasing function [`required_power`] by bisection and then
//! back-substituting the power fractions with [`alloc_from_rate`].

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{LN_2, LOG2_E};

use crate::{Error, Result};

/// Hard cap on bisection steps. `ceil(log2(r_ub / eps))` stays far below it
/// for any representable bracket.
pub const MAX_BISECTION_ITERATIONS: u32 = 64;

/// `log2(1 + x)`, accurate for small `x`.
#[inline]
pub fn log2_1p(x: f64) -> f64 {
    libm::log1p(x) * LOG2_E
}

/// `2^r - 1`, accurate for small `r`.
#[inline]
pub fn exp2_m1(r: f64) -> f64 {
    libm::expm1(r * LN_2)
}

/// Which receiver is treated as the stronger one and runs SIC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodingOrder {
    /// Receiver 1 decodes and cancels receiver 2's message first.
    FirstStrong,
    /// Receiver 2 decodes and cancels receiver 1's message first.
    SecondStrong,
}

impl DecodingOrder {
    /// Order picked by comparing two gains; ties go to receiver 1.
    pub fn from_gains(g1: f64, g2: f64) -> Self {
        if g1 >= g2 {
            DecodingOrder::FirstStrong
        } else {
            DecodingOrder::SecondStrong
        }
    }
}

/// Power fractions for each receiver together with the decoding order.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    /// `alphas[i]` is the fraction of power given to receiver `i`'s message.
    pub alphas: Vec<f64>,
    /// Receiver indices by descending effective gain. `order[0]` decodes every
    /// other message before its own.
    pub order: Vec<usize>,
}

impl PowerAllocation {
    /// Fractions listed in decoding order (strongest receiver first).
    pub fn alphas_in_order(&self) -> Vec<f64> {
        self.order.iter().map(|&i| self.alphas[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    /// Lower end of the final bracket, so the rate is always supportable.
    pub r_max: f64,
    pub allocation: PowerAllocation,
    pub iterations: u32,
    /// `|required_power(r_max) - 1|`.
    pub residual: f64,
}

fn check_gain(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidGain(h))
    }
}

fn check_power(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPower(p))
    }
}

fn check_sorted_gains(gains_desc: &[f64]) -> Result<()> {
    if gains_desc.is_empty() {
        return Err(Error::NoReceivers);
    }
    for &h in gains_desc {
        check_gain(h)?;
    }
    if gains_desc.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::UnsortedGains);
    }
    Ok(())
}

/// Rate of the SIC receiver after cancelling the other message.
#[inline]
pub fn strong_rate(alpha: f64, h: f64, p: f64) -> f64 {
    log2_1p(p * alpha * h)
}

/// Rate of a receiver decoding its own message with the other as noise.
#[inline]
pub fn weak_rate(alpha: f64, h: f64, p: f64) -> f64 {
    log2_1p(p * h * (1.0 - alpha) / (p * h * alpha + 1.0))
}

/// Closed-form fraction of power for the stronger receiver that equalizes
/// both rates.
#[inline]
pub(crate) fn equalizing_alpha(h_strong: f64, h_weak: f64, p: f64) -> f64 {
    let s = h_strong + h_weak;
    2.0 * h_weak / (libm::sqrt(s * s + 4.0 * h_strong * h_weak * h_weak * p) + s)
}

/// Optimal power fraction of the stronger receiver (`h_strong >= h_weak`).
pub fn optimal_alpha_two_user(h_strong: f64, h_weak: f64, p: f64) -> Result<f64> {
    check_gain(h_strong)?;
    check_gain(h_weak)?;
    check_power(p)?;
    if h_strong < h_weak {
        return Err(Error::Unordered { strong: h_strong, weak: h_weak });
    }
    Ok(equalizing_alpha(h_strong, h_weak, p))
}

/// Max-min rate of two receivers under full CSI, either gain order.
pub fn max_min_rate_two_user(h1: f64, h2: f64, p: f64) -> Result<f64> {
    check_gain(h1)?;
    check_gain(h2)?;
    check_power(p)?;
    let s = h1 + h2;
    let cross = if h1 >= h2 { h1 * h2 * h2 } else { h1 * h1 * h2 };
    let snr = 2.0 * h1 * h2 / (libm::sqrt(s * s + 4.0 * cross * p) + s);
    Ok(log2_1p(p * snr))
}

/// Achieved rate of receiver `k` (0-based, in decoding order) under
/// superposition coding with SIC.
pub fn rate_k(alphas: &[f64], gains_desc: &[f64], p: f64, k: usize) -> Result<f64> {
    check_sorted_gains(gains_desc)?;
    check_power(p)?;
    if alphas.len() != gains_desc.len() {
        return Err(Error::InfeasibleAllocation("one coefficient per receiver is required"));
    }
    if k >= gains_desc.len() {
        return Err(Error::IndexOutOfRange { index: k, count: gains_desc.len() });
    }
    if alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::InfeasibleAllocation("coefficients must lie in [0, 1]"));
    }
    if alphas.iter().sum::<f64>() > 1.0 + 1e-9 {
        return Err(Error::InfeasibleAllocation("coefficients sum above one"));
    }
    Ok(rate_k_unchecked(alphas, gains_desc, p, k))
}

#[inline]
pub(crate) fn rate_k_unchecked(alphas: &[f64], gains: &[f64], p: f64, k: usize) -> f64 {
    let interference: f64 = alphas[..k].iter().sum();
    log2_1p(alphas[k] / (interference + 1.0 / (p * gains[k])))
}

/// Total power fraction needed for every receiver to reach rate `r`:
/// `(2^r - 1) * sum_i 2^((K-i) r) / (p H_i)`. The max-min rate solves
/// `required_power(r) = 1`.
pub fn required_power(r: f64, gains_desc: &[f64], p: f64) -> Result<f64> {
    check_sorted_gains(gains_desc)?;
    check_power(p)?;
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidRate(r));
    }
    Ok(required_power_unchecked(r, gains_desc, p))
}

#[inline]
fn required_power_unchecked(r: f64, gains_desc: &[f64], p: f64) -> f64 {
    let growth = libm::exp2(r);
    let horner = gains_desc.iter().fold(0.0, |acc, &h| acc * growth + 1.0 / (p * h));
    exp2_m1(r) * horner
}

/// Power fractions giving every receiver exactly rate `r`, in decoding order.
pub fn alloc_from_rate(r: f64, gains_desc: &[f64], p: f64) -> Result<Vec<f64>> {
    check_sorted_gains(gains_desc)?;
    check_power(p)?;
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidRate(r));
    }
    Ok(alloc_from_rate_unchecked(r, gains_desc, p))
}

fn alloc_from_rate_unchecked(r: f64, gains_desc: &[f64], p: f64) -> Vec<f64> {
    let excess = exp2_m1(r);
    let growth = libm::exp2(r);
    // weighted = sum_{i<k} 2^((k-1-i) r) / (p H_i)
    let mut weighted = 0.0;
    gains_desc
        .iter()
        .map(|&h| {
            let noise = 1.0 / (p * h);
            let alpha = excess * (noise + excess * weighted);
            weighted = weighted * growth + noise;
            alpha
        })
        .collect()
}

/// Upper bound on bisection steps to shrink `[0, r_ub]` below `eps`.
pub fn bisection_iteration_bound(r_ub: f64, eps: f64) -> u32 {
    if r_ub <= eps {
        0
    } else {
        libm::ceil(libm::log2(r_ub / eps)) as u32
    }
}

/// Max-min rate and allocation for any number of receivers.
///
/// Gains may come in any order; they are sorted internally and the returned
/// allocation maps back to the caller's indices. The bracket `[0, r_ub]`,
/// `r_ub = log2(1 + p * min H)`, is halved until narrower than `eps`. The
/// reported rate is the lower end, and the power left over at that rate goes
/// to the last-decoded receiver, which interferes with nobody.
pub fn solve_max_min_k(gains: &[f64], p: f64, eps: f64) -> Result<SolverResult> {
    if gains.is_empty() {
        return Err(Error::NoReceivers);
    }
    for &h in gains {
        check_gain(h)?;
    }
    check_power(p)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidTolerance(eps));
    }

    let mut order: Vec<usize> = (0..gains.len()).collect();
    order.sort_by(|&a, &b| gains[b].partial_cmp(&gains[a]).unwrap_or(Ordering::Equal));
    let sorted: Vec<f64> = order.iter().map(|&i| gains[i]).collect();

    let r_ub = log2_1p(p * sorted[sorted.len() - 1]);
    let (mut lo, mut hi) = (0.0f64, r_ub);
    let mut iterations = 0;
    while hi - lo > eps {
        if iterations == MAX_BISECTION_ITERATIONS {
            return Err(Error::NoConvergence(iterations));
        }
        let mid = 0.5 * (lo + hi);
        if required_power_unchecked(mid, &sorted, p) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let mut in_order = alloc_from_rate_unchecked(lo, &sorted, p);
    let used: f64 = in_order.iter().sum();
    let last = in_order.len() - 1;
    in_order[last] = (in_order[last] + (1.0 - used)).clamp(0.0, 1.0);

    let mut alphas = alloc::vec![0.0; gains.len()];
    for (&receiver, &alpha) in order.iter().zip(&in_order) {
        alphas[receiver] = alpha;
    }
    Ok(SolverResult {
        r_max: lo,
        allocation: PowerAllocation { alphas, order },
        iterations,
        residual: libm::fabs(required_power_unchecked(lo, &sorted, p) - 1.0),
    })
}

/// Minimum rate when each of `K` receivers gets `1/K` of the time alone.
pub fn tdma_min_rate(gains: &[f64], p: f64) -> f64 {
    let share = 1.0 / gains.len() as f64;
    gains.iter().map(|&h| share * log2_1p(p * h)).fold(f64::INFINITY, f64::min)
}
