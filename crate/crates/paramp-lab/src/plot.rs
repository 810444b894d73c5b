//! Minimal standalone SVG line plots.
//!
//! Quick-look figures for CLI `--plot` output and the examples: axes, tick
//! labels, one polyline per series, a small legend. Output is plain SVG 1.1
//! text with no external references, rendered identically by any viewer,
//! and deterministic for identical input (fixed canvas, fixed-precision
//! coordinates).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::write_atomic;

/// One named curve.
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: &str, points: Vec<(f64, f64)>) -> Self {
        Series {
            label: label.to_string(),
            points,
        }
    }
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 78.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 46.0;
const MARGIN_B: f64 = 58.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Format an axis-tick value compactly and deterministically.
fn fmt_tick(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{x:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{x:.3e}")
    }
}

fn range_of(series: &[Series], pick: fn(&(f64, f64)) -> f64) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for p in &s.points {
            let v = pick(p);
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidArgument(
            "plot needs at least one finite point".into(),
        ));
    }
    if lo == hi {
        // Degenerate (flat) axis: open a symmetric window around the value.
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return Ok((lo - pad, hi + pad));
    }
    Ok((lo, hi))
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render series as a standalone SVG line plot.
pub fn line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> Result<String> {
    if series.is_empty() {
        return Err(Error::InvalidArgument("no series to plot".into()));
    }
    let (x_lo, x_hi) = range_of(series, |p| p.0)?;
    let (mut y_lo, mut y_hi) = range_of(series, |p| p.1)?;
    let pad = (y_hi - y_lo) * 0.05;
    y_lo -= pad;
    y_hi += pad;

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w,
            MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h,
        )
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        svg,
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"26\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">{}</text>",
        WIDTH / 2.0,
        xml_escape(title)
    );

    // Frame.
    let _ = writeln!(
        svg,
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>"
    );

    // Ticks: 6 evenly spaced per axis, with light grid lines.
    for i in 0..=5 {
        let fx = x_lo + (x_hi - x_lo) * i as f64 / 5.0;
        let (px, _) = to_px(fx, y_lo);
        let _ = writeln!(
            svg,
            "<line x1=\"{px:.2}\" y1=\"{MARGIN_T}\" x2=\"{px:.2}\" y2=\"{:.2}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>",
            MARGIN_T + plot_h
        );
        let _ = writeln!(
            svg,
            "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\" \
             font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            MARGIN_T + plot_h + 18.0,
            fmt_tick(fx)
        );
        let fy = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
        let (_, py) = to_px(x_lo, fy);
        let _ = writeln!(
            svg,
            "<line x1=\"{MARGIN_L}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>",
            MARGIN_L + plot_w
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" \
             font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            MARGIN_L - 8.0,
            py + 4.0,
            fmt_tick(fy)
        );
    }

    // Axis labels.
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\">{}</text>",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 14.0,
        xml_escape(x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"13\" transform=\"rotate(-90 18 {:.1})\">{}</text>",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        xml_escape(y_label)
    );

    // Curves.
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts = String::new();
        for &(x, y) in &s.points {
            if !(x.is_finite() && y.is_finite()) {
                continue;
            }
            let (px, py) = to_px(x, y);
            let _ = write!(pts, "{px:.2},{py:.2} ");
        }
        let _ = writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            pts.trim_end()
        );
    }

    // Legend (only when labels are present).
    let labelled: Vec<(usize, &Series)> = series
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.label.is_empty())
        .collect();
    for (slot, (i, s)) in labelled.iter().enumerate() {
        let y = MARGIN_T + 16.0 + 18.0 * slot as f64;
        let x = WIDTH - MARGIN_R - 170.0;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" \
             stroke=\"{color}\" stroke-width=\"2\"/>",
            x + 22.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            x + 28.0,
            y + 4.0,
            xml_escape(&s.label)
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Render and write a plot atomically.
pub fn write_line_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> Result<()> {
    write_atomic(path, &line_plot(title, x_label, y_label, series)?)
}
