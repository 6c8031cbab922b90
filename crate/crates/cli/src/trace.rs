//! Residual trace records and their CSV form.

use std::fmt::Write as _;

use crate::CliError;

pub const TRACE_HEADER: &str = "run,solver,sketch,schedule,iter,rel_residual,seconds";

/// One point of one run's convergence curve.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub run: usize,
    pub solver: String,
    pub sketch: String,
    pub schedule: String,
    pub iter: usize,
    pub rel_residual: f64,
    pub seconds: f64,
}

/// Serializes records with the fixed header. Floats use the shortest
/// round-trip representation, so emit/parse is lossless.
pub fn emit_trace_csv(records: &[TraceRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 48 + TRACE_HEADER.len() + 1);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.run, r.solver, r.sketch, r.schedule, r.iter, r.rel_residual, r.seconds
        )
        .expect("writing to a string cannot fail");
    }
    out
}

pub fn parse_trace_csv(content: &str) -> Result<Vec<TraceRecord>, CliError> {
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == TRACE_HEADER => {}
        _ => {
            return Err(CliError::Parse {
                line: 1,
                message: format!("expected header '{TRACE_HEADER}'"),
            })
        }
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 7 {
            return Err(CliError::Parse {
                line: line_no,
                message: format!("expected 7 fields, found {}", parts.len()),
            });
        }
        let field_err = |what: &str| CliError::Parse {
            line: line_no,
            message: format!("bad {what} field"),
        };
        records.push(TraceRecord {
            run: parts[0].parse().map_err(|_| field_err("run"))?,
            solver: parts[1].to_string(),
            sketch: parts[2].to_string(),
            schedule: parts[3].to_string(),
            iter: parts[4].parse().map_err(|_| field_err("iter"))?,
            rel_residual: parts[5].parse().map_err(|_| field_err("rel_residual"))?,
            seconds: parts[6].parse().map_err(|_| field_err("seconds"))?,
        });
    }
    Ok(records)
}
