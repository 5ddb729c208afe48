//! Minimal SVG scatter of (log n, log value) with the fitted slope line.
//! No styling knobs; this is a quick-look artifact, not a plotting library.

use super::experiment::ExperimentResult;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;

/// Render the experiment rows and fitted line on log-log axes.
pub fn slope_svg(result: &ExperimentResult) -> String {
    use std::fmt::Write;

    let points: Vec<(f64, f64)> =
        result.rows.iter().map(|r| ((r.n as f64).ln(), r.value.max(f64::MIN_POSITIVE).ln())).collect();
    let (x_lo, x_hi) = span(points.iter().map(|p| p.0));
    let (y_lo, y_hi) = span(points.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y_lo) / (y_hi - y_lo) * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" font-family="monospace" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    // Axes.
    let _ = writeln!(
        svg,
        r#"<path d="M {m} {m} L {m} {ybot} L {xr} {ybot}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        ybot = H - MARGIN,
        xr = W - MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">log n</text>"#,
        W / 2.0,
        H - MARGIN / 3.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="{y}" transform="rotate(-90 {x} {y})" text-anchor="middle">log error</text>"#,
        x = MARGIN / 3.0,
        y = H / 2.0
    );
    // Fitted line over the x-range: ln v = intercept + slope ln n, recovered
    // from the fitted slope through the first point.
    if let (Some(first), Some(last)) = (points.first(), points.last()) {
        let slope = result.fitted_slope;
        let intercept = first.1 - slope * first.0;
        let y1 = intercept + slope * first.0;
        let y2 = intercept + slope * last.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="6 3"/>"##,
            sx(first.0),
            sy(y1),
            sx(last.0),
            sy(y2)
        );
    }
    for (x, y) in &points {
        let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="steelblue"/>"#, sx(*x), sy(*y));
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}">slope {:.4} (target {})</text>"#,
        MARGIN + 8.0,
        MARGIN - 8.0,
        result.fitted_slope,
        result
            .theoretical_exponent
            .map(|e| format!("{:.4}", -e))
            .unwrap_or_else(|| "n/a".into())
    );
    svg.push_str("</svg>\n");
    svg
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi > lo) {
        // Degenerate span (single point or constant values).
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}
