//! Long-format CSV and JSON emission.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::SimError;
use crate::harness::RunStats;

pub const HEADER: [&str; 8] =
    ["experiment", "sweep_var", "sweep_value", "metric", "value", "std_err", "n", "seed"];

/// One metric at one sweep point. Whole-sweep summaries carry
/// `sweep_var = "summary"` and no sweep value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub experiment: String,
    pub sweep_var: String,
    pub sweep_value: Option<f64>,
    pub metric: String,
    pub value: f64,
    pub std_err: f64,
    pub n: u64,
    pub seed: u64,
}

/// Rows in sweep order, metric names ascending within a point, summaries last.
pub fn rows(stats: &RunStats) -> Vec<CsvRow> {
    let row = |sweep_var: &str, sweep_value, m: &crate::harness::Metric| CsvRow {
        experiment: stats.kind.name().to_string(),
        sweep_var: sweep_var.to_string(),
        sweep_value,
        metric: m.name.clone(),
        value: m.mean,
        std_err: m.std_err,
        n: m.count,
        seed: stats.seed,
    };
    let mut out = Vec::new();
    for point in &stats.points {
        out.extend(point.metrics.iter().map(|m| row(stats.axis, Some(point.value), m)));
    }
    out.extend(stats.summaries.iter().map(|m| row("summary", None, m)));
    out
}

pub fn write_csv<W: Write>(stats: &RunStats, out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    for r in rows(stats) {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(stats: &RunStats, mut out: W) -> Result<(), SimError> {
    serde_json::to_writer_pretty(&mut out, &rows(stats))?;
    writeln!(out).map_err(|source| SimError::Io { path: "<json>".into(), source })?;
    Ok(())
}

/// Writes CSV (or JSON) to `path`, or to standard output when `path` is `None`.
pub fn emit(stats: &RunStats, path: Option<&Path>, json: bool) -> Result<(), SimError> {
    let label = path.map_or("<stdout>".to_string(), |p| p.display().to_string());
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|source| SimError::Io { path: label.clone(), source })?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };
    if json {
        write_json(stats, sink).map_err(|e| match e {
            SimError::Io { source, .. } => SimError::Io { path: label, source },
            other => other,
        })
    } else {
        write_csv(stats, sink).map_err(|source| SimError::Csv { path: label, source })
    }
}
