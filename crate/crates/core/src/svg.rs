//! Minimal static SVG plots: a bar histogram and a body/tail box summary.

use std::fmt::Write;

use crate::stats::{HistogramData, LocationSummary};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn frame(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(18,{}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + (HEIGHT - TOP - BOTTOM) / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        HEIGHT - BOTTOM,
        WIDTH - RIGHT,
        HEIGHT - BOTTOM
    );
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"#,
        HEIGHT - BOTTOM
    );
}

fn tick(out: &mut String, x: f64, label: f64) {
    let y = HEIGHT - BOTTOM;
    let _ = writeln!(
        out,
        r#"<line x1="{x:.2}" y1="{y}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
        y + 5.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{x:.2}" y="{}" text-anchor="middle">{label:.3}</text>"#,
        y + 18.0
    );
}

pub fn histogram_svg(title: &str, x_label: &str, hist: &HistogramData) -> String {
    let mut out = String::new();
    frame(&mut out, title, x_label, "count");
    let lo = hist.edges[0];
    let hi = hist.edges[hist.edges.len() - 1];
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |v: f64| LEFT + (v - lo) / (hi - lo) * plot_w;
    let peak = hist.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    for (i, &c) in hist.counts.iter().enumerate() {
        let x0 = sx(hist.edges[i]);
        let x1 = sx(hist.edges[i + 1]);
        let h = c as f64 / peak * plot_h;
        let _ = writeln!(
            out,
            r##"<rect x="{x0:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="#4a78b5" stroke="white" stroke-width="0.5"/>"##,
            HEIGHT - BOTTOM - h,
            (x1 - x0).max(0.0)
        );
    }
    tick(&mut out, sx(lo), lo);
    tick(&mut out, sx((lo + hi) / 2.0), (lo + hi) / 2.0);
    tick(&mut out, sx(hi), hi);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
        LEFT - 5.0,
        TOP + 4.0,
        peak as u64
    );
    out.push_str("</svg>\n");
    out
}

/// Side-by-side boxes (quartiles, median, whiskers at min/max, mean marker)
/// for the body and tail `λ̂`, with a dashed reference line at `reference`.
pub fn box_summary_svg(
    title: &str,
    body: Option<&LocationSummary>,
    tail: Option<&LocationSummary>,
    reference: f64,
) -> String {
    let mut out = String::new();
    frame(&mut out, title, "part", "selected lambda");
    let mut lo = reference;
    let mut hi = reference;
    for s in [body, tail].into_iter().flatten() {
        lo = lo.min(s.min);
        hi = hi.max(s.max);
    }
    if hi <= lo {
        lo -= 1.0;
        hi += 1.0;
    }
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sy = |v: f64| HEIGHT - BOTTOM - (v - lo) / (hi - lo) * plot_h;
    let plot_w = WIDTH - LEFT - RIGHT;
    for (slot, (name, summary, color)) in [("body", body, "#4a78b5"), ("tail", tail, "#c0504d")]
        .into_iter()
        .enumerate()
    {
        let cx = LEFT + plot_w * (0.25 + 0.5 * slot as f64);
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{}" text-anchor="middle">{name}</text>"#,
            HEIGHT - BOTTOM + 18.0
        );
        let Some(s) = summary else { continue };
        let half = 40.0;
        let _ = writeln!(
            out,
            r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
            sy(s.min),
            sy(s.max)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.6" stroke="black"/>"#,
            cx - half,
            sy(s.q3),
            2.0 * half,
            (sy(s.q1) - sy(s.q3)).max(0.5)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"#,
            cx - half,
            sy(s.median),
            cx + half,
            sy(s.median)
        );
        let _ = writeln!(
            out,
            r#"<circle cx="{cx:.2}" cy="{:.2}" r="4" fill="black"/>"#,
            sy(s.mean)
        );
    }
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="gray" stroke-dasharray="4,3"/>"#,
        WIDTH - RIGHT,
        y = sy(reference)
    );
    for v in [lo, reference, hi] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            LEFT - 5.0,
            sy(v) + 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{histogram, location_summary};

    #[test]
    fn histogram_plot_has_labels_and_bars() {
        let h = histogram(&[0.0, 1.0, 1.5, 2.0, 2.0], 4).unwrap();
        let svg = histogram_svg("weights", "importance weight", &h);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("importance weight"));
        assert!(svg.contains(">count<"));
        assert_eq!(svg.matches("<rect").count(), 1 + 4);
    }

    #[test]
    fn box_plot_handles_missing_part() {
        let b = location_summary(&[0.1, 0.5, 0.9]).unwrap();
        let svg = box_summary_svg("n = 2 <body & tail>", Some(&b), None, 0.28);
        assert!(svg.contains("&lt;body &amp; tail&gt;"));
        assert!(svg.contains("selected lambda"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
