//! Monte Carlo experiment harness for limited-feedback two-receiver and
//! `K`-receiver NOMA, with a deterministic parallel engine and CSV output.
//!
//! ```no_run
//! use noma_lf_sim::config::{ExperimentConfig, ExperimentKind};
//! use noma_lf_sim::engine::Engine;
//! use noma_lf_sim::harness;
//!
//! let cfg = ExperimentConfig::defaults(ExperimentKind::MinRate);
//! let stats = harness::run(&cfg, &Engine::new(None)?, &|_| {})?;
//! noma_lf_sim::output::write_csv(&stats, std::io::stdout())?;
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod engine;
mod error;
pub mod harness;
pub mod output;

pub use error::{ConfigError, SimError};
