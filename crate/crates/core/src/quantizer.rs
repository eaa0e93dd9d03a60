//! Uniform gain quantizers and the feedback codes that carry their indices.
//!
//! The rate-adaptation quantizer rounds a gain down to the left edge of its
//! bin, so rates computed from it never exceed what the channel supports. The
//! outage quantizer rounds up to the right edge and never reports zero. Both
//! saturate after `T` bins.

use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Left-boundary quantizer, levels `0..=T`.
    RateAdaptation,
    /// Right-boundary quantizer, levels `1..=T+1`.
    Outage,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerConfig {
    delta: f64,
    t: u64,
    flavor: Flavor,
}

impl QuantizerConfig {
    pub fn new(delta: f64, t: u64, flavor: Flavor) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidBinSize(delta));
        }
        if t == 0 {
            return Err(Error::InvalidBinCount);
        }
        Ok(Self { delta, t, flavor })
    }

    /// Bin count from [`default_t_rate`] or [`default_t_outage`] depending on
    /// the flavor.
    pub fn with_default_t(delta: f64, lambda1: f64, flavor: Flavor) -> Result<Self> {
        let t = match flavor {
            Flavor::RateAdaptation => default_t_rate(delta, lambda1)?,
            Flavor::Outage => default_t_outage(delta, lambda1)?,
        };
        Self::new(delta, t, flavor)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Quantizes with whichever rule the flavor selects.
    pub fn quantize(&self, x: f64) -> Result<FeedbackWord> {
        match self.flavor {
            Flavor::RateAdaptation => quantize_rate(x, self),
            Flavor::Outage => quantize_outage(x, self),
        }
    }

    /// Level index only, for hot loops. `x` must be in the flavor's domain.
    #[inline]
    pub fn level(&self, x: f64) -> u64 {
        match self.flavor {
            Flavor::RateAdaptation => floor_level(x, self.delta, self.t),
            Flavor::Outage => ceil_level(x, self.delta, self.t),
        }
    }

    #[inline]
    pub fn reconstruct(&self, level: u64) -> f64 {
        level as f64 * self.delta
    }
}

/// A fed-back quantization level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackWord {
    pub level: u64,
    /// Length of the variable-length codeword for `level`.
    pub bit_length: u32,
    /// `level * delta`.
    pub reconstructed: f64,
}

impl FeedbackWord {
    fn new(level: u64, delta: f64) -> Self {
        Self { level, bit_length: vle_len(level), reconstructed: level as f64 * delta }
    }
}

// Bins are defined on the reconstruction grid `n * delta` as computed in
// floating point, so quantizing a reconstruction value is idempotent.
#[inline]
fn floor_level(x: f64, delta: f64, t: u64) -> u64 {
    if x > t as f64 * delta {
        return t;
    }
    let mut n = libm::floor(x / delta) as u64;
    if n > 0 && n as f64 * delta > x {
        n -= 1;
    } else if (n + 1) as f64 * delta <= x {
        n += 1;
    }
    n.min(t)
}

#[inline]
fn ceil_level(x: f64, delta: f64, t: u64) -> u64 {
    if x > t as f64 * delta {
        return t + 1;
    }
    let mut n = (libm::ceil(x / delta) as u64).max(1);
    if n > 1 && (n - 1) as f64 * delta >= x {
        n -= 1;
    } else if (n as f64) * delta < x {
        n += 1;
    }
    n.min(t)
}

/// Left-boundary quantizer: `floor(x / delta) * delta`, saturating at `T * delta`.
pub fn quantize_rate(x: f64, cfg: &QuantizerConfig) -> Result<FeedbackWord> {
    if cfg.flavor != Flavor::RateAdaptation {
        return Err(Error::WrongFlavor);
    }
    if !(x >= 0.0) {
        return Err(Error::InvalidQuantizerInput(x));
    }
    Ok(FeedbackWord::new(floor_level(x, cfg.delta, cfg.t), cfg.delta))
}

/// Right-boundary quantizer: `ceil(x / delta) * delta`, or `(T + 1) * delta`
/// past the last bin. Zero is rejected since it would reconstruct to zero.
pub fn quantize_outage(x: f64, cfg: &QuantizerConfig) -> Result<FeedbackWord> {
    if cfg.flavor != Flavor::Outage {
        return Err(Error::WrongFlavor);
    }
    if !(x > 0.0) {
        return Err(Error::InvalidQuantizerInput(x));
    }
    Ok(FeedbackWord::new(ceil_level(x, cfg.delta, cfg.t), cfg.delta))
}

fn default_t(delta: f64, lambda1: f64, scale: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BinSizeOutOfRange(delta));
    }
    if !(lambda1.is_finite() && lambda1 > 0.0) {
        return Err(Error::InvalidVariance(lambda1));
    }
    let t = libm::ceil(scale * lambda1 / delta * libm::log(1.0 / delta));
    Ok((t as u64).max(1))
}

/// `ceil(lambda1 / delta * ln(1 / delta))`: makes `exp(-T delta / lambda1) <= delta`.
pub fn default_t_rate(delta: f64, lambda1: f64) -> Result<u64> {
    default_t(delta, lambda1, 1.0)
}

/// `ceil(lambda1 / (2 delta) * ln(1 / delta))`: makes `exp(-T delta / lambda1) <= sqrt(delta)`.
pub fn default_t_outage(delta: f64, lambda1: f64) -> Result<u64> {
    default_t(delta, lambda1, 0.5)
}

/// Codeword length `floor(log2(n + 2))` for level `n`.
#[inline]
pub fn vle_len(level: u64) -> u32 {
    127 - (level as u128 + 2).leading_zeros()
}

/// A binary string of 1 to 64 bits, most significant bit first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: u64,
    len: u32,
}

impl BitString {
    pub fn new(bits: u64, len: u32) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidCodeword("empty bit string"));
        }
        if len > 64 {
            return Err(Error::InvalidCodeword("longer than 64 bits"));
        }
        if len < 64 && bits >> len != 0 {
            return Err(Error::InvalidCodeword("value does not fit in length"));
        }
        Ok(Self { bits, len })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.len).rev() {
            f.write_str(if (self.bits >> i) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > 64 {
            return Err(Error::InvalidCodeword("longer than 64 bits"));
        }
        let mut bits = 0u64;
        for c in s.bytes() {
            bits = match c {
                b'0' => bits << 1,
                b'1' => (bits << 1) | 1,
                _ => return Err(Error::InvalidCodeword("only '0' and '1' are allowed")),
            };
        }
        Self::new(bits, s.len() as u32)
    }
}

/// Level `n` maps to the `(n + 1)`-th string of `0, 1, 00, 01, 10, 11, 000, ...`.
///
/// The code is not prefix-free; a receiver of several words needs their
/// lengths, which [`FeedbackWord::bit_length`] carries.
pub fn vle_encode(level: u64) -> BitString {
    let len = vle_len(level);
    let first = (1u128 << len) - 2;
    BitString { bits: (level as u128 - first) as u64, len }
}

pub fn vle_decode(code: &BitString) -> Result<u64> {
    let first = (1u128 << code.len) - 2;
    u64::try_from(first + code.bits as u128)
        .map_err(|_| Error::InvalidCodeword("level exceeds 64 bits"))
}

/// Fixed-length bits per report: `ceil(log2(T + 1))` for the rate quantizer,
/// `ceil(log2(T + 2))` for the outage quantizer.
pub fn fle_bits(t: u64, flavor: Flavor) -> u32 {
    let symbols = match flavor {
        Flavor::RateAdaptation => t as u128 + 1,
        Flavor::Outage => t as u128 + 2,
    };
    128 - (symbols - 1).leading_zeros()
}

/// Upper bound on the expected VLE length for gains with mean `lambda`:
/// `2 / ln 2 + 1 + log2(1 + lambda / delta)`.
pub fn vle_rate_bound(delta: f64, lambda: f64) -> f64 {
    2.0 / core::f64::consts::LN_2 + 1.0 + libm::log2(1.0 + lambda / delta)
}
