//! Minimal SVG emitters: a scatter plot for reuse-distance time series and
//! a labeled multi-polyline chart for miss-ratio curves. Output is plain
//! text built deterministically, so identical inputs give identical bytes.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;

const SERIES_COLORS: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

fn axis_bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        hi = lo + 1.0;
    }
    (lo, hi)
}

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y_lo) / (self.y_hi - self.y_lo) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn svg_header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN;
    let x1 = WIDTH - MARGIN;
    let y0 = HEIGHT - MARGIN;
    let y1 = MARGIN;
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{x_label}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - MARGIN / 3.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 {} {})">{y_label}</text>"#,
        MARGIN / 3.0,
        (y0 + y1) / 2.0,
        MARGIN / 3.0,
        (y0 + y1) / 2.0
    );
    // corner tick labels are enough for orientation
    for (vx, vy, text) in [
        (x0, y0 + 16.0, format!("{:.6}", frame.x_lo)),
        (x1, y0 + 16.0, format!("{:.6}", frame.x_hi)),
    ] {
        let _ = writeln!(
            out,
            r#"<text x="{vx}" y="{vy}" font-size="11" text-anchor="middle">{text}</text>"#
        );
    }
    for (vy, text) in [(y0, format!("{:.6}", frame.y_lo)), (y1, format!("{:.6}", frame.y_hi))] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{text}</text>"#,
            x0 - 6.0,
            vy + 4.0
        );
    }
}

/// Scatter with one circle marker per point.
pub fn scatter_svg(points: &[(f64, f64)], title: &str, x_label: &str, y_label: &str) -> String {
    let mut out = String::new();
    svg_header(&mut out);
    let (x_lo, x_hi) = axis_bounds(points.iter().map(|p| p.0));
    let (y_lo, y_hi) = axis_bounds(points.iter().map(|p| p.1));
    let frame = Frame { x_lo, x_hi, y_lo, y_hi };
    axes(&mut out, &frame, x_label, y_label);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="16" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0,
        MARGIN / 2.0
    );
    for &(x, y) in points {
        let _ = writeln!(
            out,
            r##"<circle cx="{:.3}" cy="{:.3}" r="1.5" fill="#1f77b4"/>"##,
            frame.x(x),
            frame.y(y)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// One labeled polyline per named series, linear axes, with a legend.
pub fn line_chart_svg(
    series: &[(String, Vec<(f64, f64)>)],
    title: &str,
    x_label: &str,
    y_label: &str,
) -> String {
    let mut out = String::new();
    svg_header(&mut out);
    let (x_lo, x_hi) = axis_bounds(series.iter().flat_map(|s| s.1.iter().map(|p| p.0)));
    let (y_lo, y_hi) = axis_bounds(series.iter().flat_map(|s| s.1.iter().map(|p| p.1)));
    let frame = Frame { x_lo, x_hi, y_lo, y_hi };
    axes(&mut out, &frame, x_label, y_label);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="16" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0,
        MARGIN / 2.0
    );
    for (i, (name, points)) in series.iter().enumerate() {
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.3},{:.3}", frame.x(x), frame.y(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        // legend entry
        let ly = MARGIN + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/>"#,
            WIDTH - MARGIN - 110.0,
            WIDTH - MARGIN - 85.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12">{name}</text>"#,
            WIDTH - MARGIN - 78.0,
            ly + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}
