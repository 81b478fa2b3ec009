use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{write_string, TraceSeries};
use crate::error::{Error, Result};

pub const SVG_WIDTH: f64 = 720.0;
pub const SVG_HEIGHT: f64 = 480.0;

pub const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 110.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Coef,
    Risk,
}

impl TraceKind {
    fn title(self) -> &'static str {
        match self {
            TraceKind::Coef => "coef TRACE",
            TraceKind::Risk => "rmse TRACE (relative MSE risk)",
        }
    }
}

impl std::str::FromStr for TraceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coef" => Ok(TraceKind::Coef),
            "risk" | "rmse" => Ok(TraceKind::Risk),
            other => Err(Error::InvalidArgument(format!(
                "unknown trace kind `{other}`"
            ))),
        }
    }
}

fn tick_label(v: f64, span: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if span < 0.01 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// Renders one trace as a standalone SVG document.
pub fn render_trace_svg(t: &TraceSeries, kind: TraceKind) -> Result<String> {
    if t.rows.is_empty() {
        return Err(Error::InvalidArgument("empty trace series".into()));
    }
    let series: Vec<Vec<f64>> = (0..t.p)
        .map(|j| {
            t.rows
                .iter()
                .map(|r| match kind {
                    TraceKind::Coef => r.beta[j],
                    TraceKind::Risk => r.risk[j],
                })
                .collect()
        })
        .collect();

    let mut lo = series
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let mut hi = series
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if kind == TraceKind::Coef {
        lo = lo.min(0.0);
        hi = hi.max(0.0);
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        lo -= pad;
        hi += pad;
    }
    let m_max = t.p as f64;

    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |m: f64| MARGIN_LEFT + plot_w * m / m_max;
    let sy = |v: f64| MARGIN_TOP + plot_h * (hi - v) / (hi - lo);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        kind.title()
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT:.2}" y="{MARGIN_TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    );

    for i in 0..TICKS {
        let frac = i as f64 / (TICKS - 1) as f64;
        let m = m_max * frac;
        let x = sx(m);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            MARGIN_TOP + plot_h + 18.0,
            tick_label(m, m_max)
        );
        let v = lo + (hi - lo) * frac;
        let y = sy(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT:.2}" y2="{y:.2}" stroke="black"/>"#,
            MARGIN_LEFT - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            MARGIN_LEFT - 8.0,
            y + 4.0,
            tick_label(v, hi - lo)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13">m</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        SVG_HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {:.2})">value</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );
    if kind == TraceKind::Coef && lo < 0.0 && hi > 0.0 {
        let y0 = sy(0.0);
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN_LEFT:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y0:.2}" stroke="#bbbbbb"/>"##,
            MARGIN_LEFT + plot_w
        );
    }

    let xk = sx(t.m_star);
    let _ = writeln!(
        s,
        r#"<line class="knot" x1="{xk:.2}" y1="{MARGIN_TOP:.2}" x2="{xk:.2}" y2="{:.2}" stroke="black" stroke-dasharray="4 3"/>"#,
        MARGIN_TOP + plot_h
    );

    for (j, values) in series.iter().enumerate() {
        let color = PALETTE[j % PALETTE.len()];
        let points: Vec<String> = t
            .rows
            .iter()
            .zip(values)
            .map(|(r, &v)| format!("{:.3},{:.3}", sx(r.m), sy(v)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = MARGIN_TOP + 14.0 + 18.0 * j as f64;
        let lx = MARGIN_LEFT + plot_w + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 18.0
        );
        let name = t.names.get(j).map(String::as_str).unwrap_or("?");
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
            lx + 24.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn emit_trace_svg(t: &TraceSeries, kind: TraceKind, path: impl AsRef<Path>) -> Result<()> {
    write_string(path, &render_trace_svg(t, kind)?)
}
