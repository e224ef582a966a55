//! Command-line front end for the `meshroof` model.
//!
//! [`run`] executes a parsed command and writes its report to the given sink, so the
//! binary and the tests share one code path.

#![forbid(unsafe_code)]

pub mod args;
mod commands;
pub mod docs;
pub mod error;
mod params;
mod sweep;

use std::io::Write;

use meshroof::mesh::MeshConfig;
use meshroof::model::{estimate, CalibrationParams};
use meshroof::report::{ReportRow, REPORT_COLUMNS};
use meshroof::simref::simulate_step;
use meshroof::traffic::{compute_link_loads, heaviest_link};
use meshroof::workload::{derive_op_counts_mapped, CoreMap, WorkloadSpec};

use args::{Cli, Command, Format};
pub use error::{CliError, Result};

/// Environment variable capping the worker threads of `sweep`.
pub const THREADS_ENV: &str = "MESHROOF_THREADS";

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Estimate(a) => commands::estimate(&a, out),
        Command::Sweep(a) => sweep::run(&a, out),
        Command::Traffic(a) => commands::traffic(&a, out),
        Command::Analytic(a) => commands::analytic(&a, out),
        Command::ScalingTable(a) => commands::scaling_table(&a, out),
        Command::Calibrate(a) => commands::calibrate(&a, out),
        Command::Generate(g) => commands::generate(g, out),
    }
}

/// Estimate (and optionally the oracle time) of a workload under a core map.
pub(crate) fn evaluate(
    w: &WorkloadSpec,
    map: &CoreMap,
    mesh: &MeshConfig,
    cal: &CalibrationParams,
    oracle: bool,
    workload_id: &str,
    placement_id: &str,
) -> meshroof::Result<ReportRow> {
    let ops = derive_op_counts_mapped(w, map, &cal.packing())?;
    let hl = heaviest_link(&compute_link_loads(w, map, mesh)?);
    let est = estimate(&ops, &hl, cal);
    let sim = oracle.then(|| simulate_step(&ops, &hl, cal));
    Ok(ReportRow::new(workload_id, placement_id, &est, sim.as_ref()))
}

pub(crate) fn write_csv<I>(out: &mut dyn Write, header: &[&str], records: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header).map_err(std::io::Error::from)?;
    for r in records {
        w.write_record(&r).map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn write_report(out: &mut dyn Write, rows: Vec<ReportRow>, format: Format) -> Result<()> {
    match format {
        Format::Csv => write_csv(out, &REPORT_COLUMNS, rows.iter().map(ReportRow::record)),
        Format::Json => {
            let doc = docs::ReportDoc {
                schema_version: docs::SCHEMA_VERSION,
                rows,
            };
            out.write_all(docs::to_json(&doc).as_bytes())?;
            Ok(())
        }
    }
}
