//! Trace series along the efficient path, the linear-vs-np comparison, and
//! the files they are written to.

mod compare;
mod pairs;
mod svg;

pub use compare::{compare_models, ComparisonReport, FittedModel, ModelSummary, Winner};
pub use pairs::{pairs_csv_string, pairs_data, write_pairs_csv, PairBlock};
pub use svg::{emit_trace_svg, render_trace_svg, TraceKind, PALETTE, SVG_HEIGHT, SVG_WIDTH};

use std::fs::File;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grrcore::{
    beta_from_delta, delta_at, relative_risk_from_delta, CanonicalModel, ShrinkagePath,
};

/// Uniform points in the default trace grid (before the knot is inserted).
pub const DEFAULT_STEPS: usize = 101;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub m: f64,
    pub delta: Vec<f64>,
    pub beta: Vec<f64>,
    pub risk: Vec<f64>,
}

/// Coefficient and relative-risk traces over an ascending grid of extents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSeries {
    pub names: Vec<String>,
    pub p: usize,
    pub m_star: f64,
    pub rows: Vec<TraceRow>,
}

impl TraceSeries {
    pub fn m_grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.m).collect()
    }

    pub fn coef_trace(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.beta.clone()).collect()
    }

    pub fn risk_trace(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.risk.clone()).collect()
    }

    /// Row whose extent equals the knot.
    pub fn knot_row(&self) -> Option<&TraceRow> {
        self.rows.iter().find(|r| r.m == self.m_star)
    }
}

/// `steps` uniform extents on `[0, p]` with the knot inserted; strictly ascending.
pub fn trace_grid(p: usize, m_star: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "trace grid needs at least 2 steps, got {steps}"
        )));
    }
    let top = p as f64;
    let mut grid: Vec<f64> = (0..steps)
        .map(|i| {
            if i == steps - 1 {
                top
            } else {
                top * i as f64 / (steps - 1) as f64
            }
        })
        .collect();
    if !grid.contains(&m_star) {
        let at = grid.partition_point(|&m| m < m_star);
        grid.insert(at, m_star);
    }
    Ok(grid)
}

/// Evaluates the path on the trace grid. Rows are computed in parallel and
/// collected in grid order.
pub fn build_traces(
    cm: &CanonicalModel,
    path: &ShrinkagePath,
    names: &[String],
    steps: usize,
) -> Result<TraceSeries> {
    if names.len() != cm.p || path.p != cm.p {
        return Err(Error::Dimension(format!(
            "{} names, model p = {}, path p = {}",
            names.len(),
            cm.p,
            path.p
        )));
    }
    let grid = trace_grid(cm.p, path.m_star, steps)?;
    let rows = grid
        .par_iter()
        .map(|&m| {
            let delta = delta_at(path, m)?;
            let beta = beta_from_delta(cm, &delta);
            let risk = relative_risk_from_delta(cm, &delta)?;
            Ok(TraceRow {
                m,
                delta,
                beta,
                risk,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TraceSeries {
        names: names.to_vec(),
        p: cm.p,
        m_star: path.m_star,
        rows,
    })
}

pub fn trace_header(p: usize) -> Vec<String> {
    let mut h = vec!["m".to_string()];
    for prefix in ["delta", "beta", "risk"] {
        h.extend((1..=p).map(|j| format!("{prefix}_{j}")));
    }
    h
}

/// Renders the trace CSV. Floats use shortest round-trip formatting.
pub fn trace_csv_string(t: &TraceSeries) -> String {
    let mut out = trace_header(t.p).join(",");
    out.push('\n');
    for row in &t.rows {
        let mut fields = vec![format!("{}", row.m)];
        for v in row.delta.iter().chain(&row.beta).chain(&row.risk) {
            fields.push(format!("{v}"));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn emit_trace_csv(t: &TraceSeries, path: impl AsRef<Path>) -> Result<()> {
    write_string(path, &trace_csv_string(t))
}

/// Reads the rows of a trace CSV written by [`emit_trace_csv`].
pub fn read_trace_csv(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let width = reader.headers()?.len();
    if width < 4 || (width - 1) % 3 != 0 {
        return Err(Error::Dimension(format!(
            "trace CSV has {width} columns, expected 1 + 3p"
        )));
    }
    let p = (width - 1) / 3;
    if reader.headers()?.iter().collect::<Vec<_>>() != trace_header(p) {
        return Err(Error::InvalidArgument("unexpected trace CSV header".into()));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let values: Vec<f64> = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>().map_err(|_| Error::NonNumeric {
                    column: "trace".into(),
                    row: line + 1,
                    value: cell.to_string(),
                })
            })
            .collect::<Result<_>>()?;
        rows.push(TraceRow {
            m: values[0],
            delta: values[1..=p].to_vec(),
            beta: values[p + 1..=2 * p].to_vec(),
            risk: values[2 * p + 1..].to_vec(),
        });
    }
    Ok(rows)
}

pub(crate) fn write_string(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path, e))
}
