//! Report assembly and the CSV / JSON / SVG writers.

use std::fmt::Write as _;
use std::io::Write;

use serde_json::{Value, json};

use crate::config::Format;

/// Fixed 17-significant-digit rendering, so identical runs give identical bytes.
pub fn num(x: f64) -> String {
    if x.is_finite() { format!("{x:.16e}") } else { format!("{x}") }
}

/// One plotted curve: label and `(x, y)` points.
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Default)]
pub struct Report {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// JSON rendering of the rows (plus anything command-specific).
    pub json: Value,
    pub curves: Vec<Curve>,
    /// Machine-readable summary, printed to stderr.
    pub summary: Option<Value>,
    /// Offending rows or checks; non-empty means exit status 1.
    pub failures: Vec<String>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let doc = match &self.summary {
                    Some(s) => json!({ "rows": self.json, "summary": s }),
                    None => json!({ "rows": self.json }),
                };
                let mut s = serde_json::to_string_pretty(&doc).expect("json values always serialize");
                s.push('\n');
                s
            }
            Format::Svg => svg(&self.curves),
        }
    }

    pub fn emit(&self, format: Format, path: Option<&std::path::Path>) -> std::io::Result<()> {
        let text = self.render(format);
        match path {
            Some(p) => std::fs::write(p, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}

const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Polyline plot, one line per curve, with a plain legend.
pub fn svg(curves: &[Curve]) -> String {
    let (w, h, m) = (800.0, 500.0, 50.0);
    let pts = curves.iter().flat_map(|c| c.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#, w - 2.0 * m, h - 2.0 * m);
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(s, r#"<line x1="{m}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="grey" stroke-dasharray="4 4"/>"#, sy(0.0), w - m);
    }
    let _ = writeln!(s, r#"<text x="{m}" y="{}" font-size="12">r from {} to {}</text>"#, h - 15.0, x0, x1);
    let _ = writeln!(s, r#"<text x="5" y="{}" font-size="12">{:.3e}</text><text x="5" y="{}" font-size="12">{:.3e}</text>"#, m, y1, h - m, y0);
    for (i, c) in curves.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let line: Vec<String> = c
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, line.join(" "));
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" fill="{colour}">{}</text>"#, w - m - 220.0, m + 16.0 * (i as f64 + 1.0), escape(&c.label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
