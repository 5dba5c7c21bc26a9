//! File formats: CSV time series and pretty-printed JSON documents.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use clustersync::analysis::BoundValues;
use clustersync::engine::Trace;
use clustersync::experiments::SweepResult;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Header of a trace CSV for `r` clusters, optionally with bound columns.
pub fn trace_header(r: usize, with_bounds: bool) -> Vec<String> {
    let per = |prefix: &'static str| (1..=r).map(move |a| format!("{prefix}_{a}"));
    let mut h = vec!["k".to_string()];
    h.extend(per("follower_dis"));
    h.push("leader_dis".into());
    h.extend(per("gap"));
    h.push("global_err".into());
    if with_bounds {
        h.extend(per("L1"));
        h.push("L2".into());
        h.extend(per("L3"));
        h.extend(per("T1"));
    }
    h
}

// 17 significant digits, enough for an exact f64 round-trip
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Writes one row per record. `bounds`, when given, must hold the bound
/// values for every record in order; inapplicable bounds are left empty.
pub fn write_trace(trace: &Trace, bounds: Option<&[BoundValues]>, path: &Path) -> Result<()> {
    let r = trace
        .records
        .first()
        .map_or(0, |rec| rec.follower_disagreement.len());
    if let Some(b) = bounds {
        if b.len() != trace.records.len() {
            return Err(CliError::Usage(
                "bound values do not cover the trace".into(),
            ));
        }
    }
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(trace_header(r, bounds.is_some()))
        .map_err(|e| csv_err(path, e))?;
    for (i, rec) in trace.records.iter().enumerate() {
        let mut row = vec![rec.k.to_string()];
        row.extend(rec.follower_disagreement.iter().map(|&v| fmt(v)));
        row.push(fmt(rec.leader_disagreement));
        row.extend(rec.leader_follower_gap.iter().map(|&v| fmt(v)));
        row.push(fmt(rec.global_error));
        if let Some(b) = bounds.map(|b| &b[i]) {
            let per = |v: &Option<Vec<f64>>| {
                (0..r)
                    .map(|a| fmt_opt(v.as_ref().map(|v| v[a])))
                    .collect::<Vec<_>>()
            };
            row.extend(per(&b.l1));
            row.push(fmt_opt(b.l2));
            row.extend(per(&b.l3));
            row.extend(per(&b.t1));
        }
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// One parsed trace CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub follower_disagreement: Vec<f64>,
    pub leader_disagreement: f64,
    pub leader_follower_gap: Vec<f64>,
    pub global_error: f64,
    pub bounds: Option<TraceBounds>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceBounds {
    pub l1: Vec<Option<f64>>,
    pub l2: Option<f64>,
    pub l3: Vec<Option<f64>>,
    pub t1: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub clusters: usize,
    pub rows: Vec<TraceRow>,
}

/// Reads a file produced by [`write_trace`].
pub fn read_trace(path: &Path) -> Result<TraceTable> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header: Vec<String> = rd
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(String::from)
        .collect();
    let r = header
        .iter()
        .filter(|h| h.starts_with("follower_dis_"))
        .count();
    let with_bounds = match header.len() {
        n if n == 2 * r + 3 => false,
        n if n == 5 * r + 4 => true,
        n => return Err(bad(path, format!("unexpected column count {n}"))),
    };
    if header != trace_header(r, with_bounds) {
        return Err(bad(path, "unexpected header".into()));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let cell = |i: usize| -> Result<Option<f64>> {
            let s = &rec[i];
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| bad(path, format!("bad number {s:?}")))
        };
        let req = |i: usize| cell(i)?.ok_or_else(|| bad(path, format!("empty cell in column {i}")));
        let span = |from: usize| (from..from + r).map(req).collect::<Result<Vec<_>>>();
        let ospan = |from: usize| (from..from + r).map(cell).collect::<Result<Vec<_>>>();
        let k = rec[0]
            .parse()
            .map_err(|_| bad(path, format!("bad iteration {:?}", &rec[0])))?;
        let bounds = if with_bounds {
            let o = 2 * r + 3;
            Some(TraceBounds {
                l1: ospan(o)?,
                l2: cell(o + r)?,
                l3: ospan(o + r + 1)?,
                t1: ospan(o + 2 * r + 1)?,
            })
        } else {
            None
        };
        rows.push(TraceRow {
            k,
            follower_disagreement: span(1)?,
            leader_disagreement: req(r + 1)?,
            leader_follower_gap: span(r + 2)?,
            global_error: req(2 * r + 2)?,
            bounds,
        });
    }
    Ok(TraceTable { clusters: r, rows })
}

fn bad(path: &Path, message: String) -> CliError {
    CliError::Csv {
        path: path.to_path_buf(),
        message,
    }
}

/// One CSV row per sweep value.
pub fn write_sweep_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for row in &result.rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(path, e.into()))?;
    w.write_all(b"\n")
        .and_then(|()| w.flush())
        .map_err(|e| CliError::io(path, e))
}

/// Writes a bound report (or any other report document) as pretty JSON.
pub fn write_report<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    write_json(report, path)
}
