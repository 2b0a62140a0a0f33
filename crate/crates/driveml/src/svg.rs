//! Minimal inline SVG charts.

use std::fmt::Write;

const W: f64 = 480.0;
const H: f64 = 320.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 28.0;
const BOTTOM: f64 = 44.0;

const PALETTE: [&str; 6] = ["#1b6ca8", "#d1495b", "#edae49", "#00798c", "#66a182", "#8d6a9f"];

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

/// Coordinate text; non-finite values render as 0.
fn num(v: f64) -> String {
    let v = if v.is_finite() { v } else { 0.0 };
    let s = format!("{v:.2}");
    if s == "-0.00" {
        String::from("0.00")
    } else {
        s
    }
}

fn tick(v: f64) -> String {
    if v.abs() >= 1000.0 || (v != 0.0 && v.abs() < 0.01) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub struct Axes {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Axes {
    /// Ranges covering every point, padded when flat.
    pub fn fit(series: &[Series]) -> Axes {
        let pts = series
            .iter()
            .flat_map(|s| s.points.iter())
            .filter(|(x, y)| x.is_finite() && y.is_finite());
        let mut x = (f64::INFINITY, f64::NEG_INFINITY);
        let mut y = (f64::INFINITY, f64::NEG_INFINITY);
        for &(a, b) in pts {
            x = (x.0.min(a), x.1.max(a));
            y = (y.0.min(b), y.1.max(b));
        }
        let pad = |r: (f64, f64)| {
            if !r.0.is_finite() {
                (0.0, 1.0)
            } else if r.1 - r.0 < 1e-9 {
                (r.0 - 0.5, r.1 + 0.5)
            } else {
                r
            }
        };
        Axes { x: pad(x), y: pad(y) }
    }
}

fn open(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" role="img"><title>{t}</title><rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/><text x="{cx}" y="18" text-anchor="middle" font-size="13" font-family="sans-serif">{t}</text>"##,
        w = W,
        h = H,
        cx = num(W / 2.0),
        t = escape(title)
    );
}

fn frame(out: &mut String, axes: Axes, x_label: &str, y_label: &str) {
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let _ = write!(
        out,
        r##"<rect x="{l}" y="{t}" width="{pw}" height="{ph}" fill="none" stroke="#999999"/>"##,
        l = num(LEFT),
        t = num(TOP),
        pw = num(pw),
        ph = num(ph)
    );
    for k in 0..=4 {
        let f = f64::from(k) / 4.0;
        let xv = axes.x.0 + f * (axes.x.1 - axes.x.0);
        let yv = axes.y.0 + f * (axes.y.1 - axes.y.0);
        let _ = write!(
            out,
            r#"<text x="{x}" y="{y}" text-anchor="middle" font-size="10" font-family="sans-serif">{v}</text>"#,
            x = num(LEFT + f * pw),
            y = num(TOP + ph + 14.0),
            v = escape(&tick(xv))
        );
        let _ = write!(
            out,
            r#"<text x="{x}" y="{y}" text-anchor="end" font-size="10" font-family="sans-serif">{v}</text>"#,
            x = num(LEFT - 4.0),
            y = num(TOP + ph - f * ph + 3.0),
            v = escape(&tick(yv))
        );
    }
    let _ = write!(
        out,
        r#"<text x="{x}" y="{y}" text-anchor="middle" font-size="11" font-family="sans-serif">{xl}</text><text x="12" y="{ym}" text-anchor="middle" font-size="11" font-family="sans-serif" transform="rotate(-90 12 {ym})">{yl}</text>"#,
        x = num(LEFT + pw / 2.0),
        y = num(H - 8.0),
        xl = escape(x_label),
        ym = num(TOP + ph / 2.0),
        yl = escape(y_label)
    );
}

fn project(axes: Axes, (x, y): (f64, f64)) -> (f64, f64) {
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let fx = (x - axes.x.0) / (axes.x.1 - axes.x.0);
    let fy = (y - axes.y.0) / (axes.y.1 - axes.y.0);
    (LEFT + fx * pw, TOP + ph - fy * ph)
}

/// Line chart with a legend. `reference` draws a dashed segment between two
/// data-space points (the chance diagonal of an ROC plot, the unit line of
/// a lift plot).
pub fn line_chart(
    title: &str,
    series: &[Series],
    axes: Axes,
    x_label: &str,
    y_label: &str,
    reference: Option<((f64, f64), (f64, f64))>,
) -> String {
    let mut out = String::new();
    open(&mut out, title);
    frame(&mut out, axes, x_label, y_label);
    if let Some((a, b)) = reference {
        let (a, b) = (project(axes, a), project(axes, b));
        let _ = write!(
            out,
            r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#bbbbbb" stroke-dasharray="4 3"/>"##,
            num(a.0),
            num(a.1),
            num(b.0),
            num(b.1)
        );
    }
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&p| {
                let (x, y) = project(axes, p);
                format!("{},{}", num(x), num(y))
            })
            .collect();
        let _ = write!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.6" points="{}"/>"#,
            pts.join(" ")
        );
        if s.points.len() <= 25 {
            for &p in &s.points {
                let (x, y) = project(axes, p);
                let _ = write!(
                    out,
                    r#"<circle cx="{}" cy="{}" r="2.2" fill="{color}"/>"#,
                    num(x),
                    num(y)
                );
            }
        }
        let ly = TOP + 12.0 + 14.0 * k as f64;
        let lx = W - RIGHT - 130.0;
        let _ = write!(
            out,
            r#"<rect x="{}" y="{}" width="10" height="3" fill="{color}"/><text x="{}" y="{}" font-size="10" font-family="sans-serif">{}</text>"#,
            num(lx),
            num(ly - 3.0),
            num(lx + 14.0),
            num(ly + 1.0),
            escape(s.name)
        );
    }
    out.push_str("</svg>");
    out
}

/// Horizontal bars, one per item, scaled to the largest value.
pub fn bar_chart(title: &str, items: &[(String, f64)], x_label: &str) -> String {
    let mut out = String::new();
    open(&mut out, title);
    let label_w = 150.0;
    let pw = W - label_w - RIGHT - 40.0;
    let rows = items.len().max(1) as f64;
    let bar_h = ((H - TOP - BOTTOM) / rows).min(24.0);
    let max = items.iter().map(|(_, v)| *v).fold(0.0_f64, f64::max);
    for (k, (name, v)) in items.iter().enumerate() {
        let y = TOP + k as f64 * bar_h;
        let w = if max > 0.0 { pw * v.max(0.0) / max } else { 0.0 };
        let _ = write!(
            out,
            r##"<text x="{}" y="{}" text-anchor="end" font-size="10" font-family="sans-serif">{}</text><rect x="{}" y="{}" width="{}" height="{}" fill="#1b6ca8"/><text x="{}" y="{}" font-size="10" font-family="sans-serif">{:.3}</text>"##,
            num(label_w - 4.0),
            num(y + bar_h * 0.65),
            escape(name),
            num(label_w),
            num(y + bar_h * 0.15),
            num(w),
            num(bar_h * 0.7),
            num(label_w + w + 4.0),
            num(y + bar_h * 0.65),
            v
        );
    }
    let _ = write!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="11" font-family="sans-serif">{}</text>"#,
        num(label_w + pw / 2.0),
        num(H - 8.0),
        escape(x_label)
    );
    out.push_str("</svg>");
    out
}
