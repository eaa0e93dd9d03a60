//! Limited-feedback power allocation for downlink NOMA.
//!
//! This crate holds the numerical core: Rayleigh-fading gain sampling keyed by
//! counter-based streams, the max-min power allocation (closed form for two
//! receivers, bisection for `K`), the left- and right-boundary uniform gain
//! quantizers with their variable-length feedback code, per-realization
//! evaluation of the limited-feedback pipeline, and the small statistics
//! needed to aggregate Monte Carlo runs.
//!
//! It is `#![no_std]` and only needs `alloc`. IO, parallelism and the CLI live
//! in the companion `noma-lf-sim` crate.
//!
//! Rates are in bits/s/Hz and noise power is normalized to one, so `p` is the
//! transmit SNR per unit channel gain.
//!
//! ```
//! use noma_lf_core::power::{max_min_rate_two_user, optimal_alpha_two_user};
//!
//! let alpha = optimal_alpha_two_user(1.0, 1.0, 3.0).unwrap();
//! assert!((alpha - 1.0 / 3.0).abs() < 1e-12);
//! assert!((max_min_rate_two_user(1.0, 1.0, 3.0).unwrap() - 1.0).abs() < 1e-12);
//! ```

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod channel;
pub mod diversity;
mod error;
pub mod evaluator;
pub mod power;
pub mod quantizer;
pub mod stats;

pub use error::{Error, Result};

/// Converts a power in dB to linear scale.
#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}
