use std::process::ExitCode;

use clap::Parser;
use noma_lf_sim::cli::{Cli, Invocation};
use noma_lf_sim::engine::Engine;
use noma_lf_sim::harness::{self, Progress};
use noma_lf_sim::{output, SimError};

fn main() -> ExitCode {
    let inv = match Invocation::from_cli(Cli::parse()) {
        Ok(inv) => inv,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&inv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(inv: &Invocation) -> Result<(), SimError> {
    let engine = Engine::new(inv.workers)?;
    let quiet = inv.quiet;
    let report = move |p: Progress| {
        if !quiet {
            let flag = if p.target_reached { "" } else { " (trial cap hit)" };
            eprintln!("{} [{}/{}] {} dB: {} trials{flag}", p.kind, p.point, p.of, p.p_db, p.trials);
        }
    };
    let stats = harness::run(&inv.config, &engine, &report)?;
    if !quiet {
        for w in &stats.warnings {
            eprintln!("warning: {w}");
        }
    }
    output::emit(&stats, inv.out.as_deref(), inv.json)
}
