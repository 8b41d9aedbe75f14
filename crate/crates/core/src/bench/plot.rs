//! Minimal SVG line charts of median error with quartile bars.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::SummaryRow;
use crate::error::{Result, SdrError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotAxis {
    N,
    P,
    Eps,
}

impl PlotAxis {
    pub fn name(self) -> &'static str {
        match self {
            PlotAxis::N => "n",
            PlotAxis::P => "p",
            PlotAxis::Eps => "eps",
        }
    }

    fn value(self, row: &SummaryRow) -> f64 {
        match self {
            PlotAxis::N => row.n as f64,
            PlotAxis::P => row.p as f64,
            PlotAxis::Eps => row.eps,
        }
    }

    fn log_scale(self) -> bool {
        !matches!(self, PlotAxis::Eps)
    }

    /// Label of the two coordinates held fixed along this axis.
    fn others(self, row: &SummaryRow) -> String {
        match self {
            PlotAxis::N => format!("p={} eps={}", row.p, row.eps),
            PlotAxis::P => format!("n={} eps={}", row.n, row.eps),
            PlotAxis::Eps => format!("n={} p={}", row.n, row.p),
        }
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 230.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn plottable(summary: &[SummaryRow]) -> Vec<&SummaryRow> {
    summary
        .iter()
        .filter(|r| r.error.median.is_finite() && r.error.median > 0.0)
        .collect()
}

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Scale {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Scale {
        let (mut lo, mut hi) = values
            .map(|v| if log { v.log10() } else { v })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        } else {
            let pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        Scale { lo, hi, log }
    }

    fn unit(&self, v: f64) -> f64 {
        let t = if self.log { v.log10() } else { v };
        (t - self.lo) / (self.hi - self.lo)
    }

    /// Powers of ten on a log axis spanning at least two of them, otherwise
    /// five evenly spaced values.
    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let decades: Vec<f64> = (self.lo.ceil() as i32..=self.hi.floor() as i32)
                .map(|k| 10f64.powi(k))
                .collect();
            if decades.len() >= 2 {
                return decades;
            }
        }
        (0..=4)
            .map(|i| {
                let t = self.lo + i as f64 / 4.0 * (self.hi - self.lo);
                if self.log {
                    10f64.powf(t)
                } else {
                    t
                }
            })
            .collect()
    }
}

/// Renders the chart of median error against `axis`, one polyline per
/// `(estimator, scheme, fixed coordinates)` series.
pub fn render_svg(summary: &[SummaryRow], axis: PlotAxis) -> Result<String> {
    let rows = plottable(summary);
    if rows.is_empty() {
        return Err(SdrError::invalid("summary", "no finite positive median errors to plot"));
    }
    let mut series: BTreeMap<(String, String, String), Vec<&SummaryRow>> = BTreeMap::new();
    for row in &rows {
        series
            .entry((row.estimator.clone(), row.scheme.clone(), axis.others(row)))
            .or_default()
            .push(row);
    }
    for points in series.values_mut() {
        points.sort_by(|a, b| axis.value(a).total_cmp(&axis.value(b)));
    }

    let xs = Scale::new(rows.iter().map(|r| axis.value(r)), axis.log_scale());
    let ys = Scale::new(
        rows.iter().flat_map(|r| {
            [r.error.q1, r.error.median, r.error.q3]
                .into_iter()
                .filter(|v| v.is_finite() && *v > 0.0)
        }),
        true,
    );
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + xs.unit(v) * plot_w;
    let py = |v: f64| TOP + (1.0 - ys.unit(v)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">median l2 error vs {}</text>"#,
        LEFT + plot_w / 2.0,
        axis.name()
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    );
    for v in xs.ticks() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(v),
            TOP + plot_h + 18.0,
            tick_label(v)
        );
    }
    for v in ys.ticks() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            py(v) + 4.0,
            tick_label(v)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 16.0,
        axis.name(),
        if axis.log_scale() { " (log)" } else { "" }
    );

    for (idx, ((estimator, scheme, fixed), points)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let coords: Vec<String> = points
            .iter()
            .map(|r| format!("{:.2},{:.2}", px(axis.value(r)), py(r.error.median)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        for r in points {
            let x = px(axis.value(r));
            if r.error.q1 > 0.0 && r.error.q3.is_finite() {
                let _ = writeln!(
                    svg,
                    r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/>"#,
                    py(r.error.q1),
                    py(r.error.q3)
                );
            }
            let _ = writeln!(
                svg,
                r#"<circle cx="{x:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                py(r.error.median)
            );
        }
        let ly = TOP + 14.0 + 16.0 * idx as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
            ly - 4.0,
            lx + 18.0,
            ly - 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{ly:.2}">{} {} {}</text>"#,
            lx + 24.0,
            escape(estimator),
            escape(scheme),
            escape(fixed)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        // shortest of the fixed-point forms, trailing zeros dropped
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `error_vs_<axis>.svg` into `dir` for every axis that varies in the
/// summary (the `n` axis when none does). Nothing is written on error.
pub fn emit_plots(summary: &[SummaryRow], dir: &Path) -> Result<Vec<PathBuf>> {
    let rows = plottable(summary);
    if rows.is_empty() {
        return Err(SdrError::invalid("summary", "no finite positive median errors to plot"));
    }
    let varies = |axis: PlotAxis| {
        rows.iter()
            .map(|r| axis.value(r).to_bits())
            .collect::<BTreeSet<_>>()
            .len()
            > 1
    };
    let mut axes: Vec<PlotAxis> = [PlotAxis::N, PlotAxis::P, PlotAxis::Eps]
        .into_iter()
        .filter(|&a| varies(a))
        .collect();
    if axes.is_empty() {
        axes.push(PlotAxis::N);
    }
    let rendered = axes
        .iter()
        .map(|&axis| Ok((axis, render_svg(summary, axis)?)))
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(rendered.len());
    for (axis, svg) in rendered {
        let path = dir.join(format!("error_vs_{}.svg", axis.name()));
        fs::write(&path, svg)?;
        paths.push(path);
    }
    Ok(paths)
}
