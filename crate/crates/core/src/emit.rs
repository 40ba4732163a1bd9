//! CSV and SVG writers. All output is UTF-8 with LF line endings; reals are
//! written with 17 significant digits so they round-trip exactly.

use crate::atlas::{AtlasTable, DerivationGraph};
use crate::sieve::CompositeMark;
use crate::xray::Numbering;
use crate::zeta::{ArgandPath, PhaseTrace, ZeroList};
use std::fmt::Write as _;

/// A real with 17 significant digits, e.g. `1.4134725141734693e1`.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Header line plus one line per row, each terminated by `\n`.
pub fn csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(|c| field(&c)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn primes_csv(primes: &[u64]) -> String {
    csv(&["p"], primes.iter().map(|p| [p.to_string()]))
}

pub fn marks_csv(marks: &[CompositeMark]) -> String {
    csv(
        &["value", "x", "cofactor", "branch", "seq"],
        marks.iter().map(|m| {
            [
                m.value.to_string(),
                m.x.to_string(),
                m.cofactor.to_string(),
                m.branch.number().to_string(),
                m.seq().to_string(),
            ]
        }),
    )
}

pub fn table_csv(table: &AtlasTable) -> String {
    csv(
        &["value", "host", "path", "label", "class"],
        table.rows.iter().map(|r| {
            let path = r.path.iter().map(u64::to_string).collect::<Vec<_>>().join("*");
            [r.value.to_string(), r.host.to_string(), path, r.label.clone(), r.role.as_str().to_string()]
        }),
    )
}

pub fn graph_csv(graph: &DerivationGraph) -> String {
    csv(
        &["parent", "child", "class", "origin_value"],
        graph.edges.iter().map(|e| {
            [e.parent.to_string(), e.child.to_string(), e.class.as_str().to_string(), e.origin_value.to_string()]
        }),
    )
}

pub fn argand_csv(path: &ArgandPath) -> String {
    csv(&["t", "re", "im"], path.points.iter().map(|p| [real(p.t), real(p.value.re), real(p.value.im)]))
}

pub fn phase_csv(trace: &PhaseTrace) -> String {
    csv(
        &["t", "theta", "jump_flag"],
        trace.samples.iter().map(|s| [real(s.t), real(s.theta), (s.jump as u8).to_string()]),
    )
}

pub fn zeros_csv(zeros: &ZeroList) -> String {
    csv(&["t_zero", "bracket_lo", "bracket_hi"], zeros.zeros.iter().map(|z| [real(z.t), real(z.lo), real(z.hi)]))
}

pub fn lines_csv(numbering: &Numbering) -> String {
    csv(
        &["label", "parity", "escapes", "asym_index", "sq_class", "t_at_reference"],
        numbering.lines.iter().map(|l| {
            [
                l.label.to_string(),
                l.parity.to_string(),
                l.escapes_right.to_string(),
                l.asym_index.map(|m| m.to_string()).unwrap_or_default(),
                l.sq_class.map(|s| s.to_string()).unwrap_or_default(),
                real(l.t_at_reference),
            ]
        }),
    )
}

/// Minimal SVG document builder; coordinates are in user units.
#[derive(Debug, Clone)]
pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Svg { width, height, body: String::new() }
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, stroke_width: f64) {
        if points.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (k, (x, y)) in points.iter().enumerate() {
            let _ = write!(d, "{}{:.3},{:.3}", if k == 0 { "M" } else { " L" }, x, y);
        }
        let _ = writeln!(self.body, r#"<path d="{d}" fill="none" stroke="{stroke}" stroke-width="{stroke_width}"/>"#);
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r}" fill="{fill}"/>"#);
    }

    pub fn line(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str, stroke_width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{stroke}" stroke-width="{stroke_width}"/>"#,
            a.0, a.1, b.0, b.1
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, content: &str) {
        let escaped = content.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.3}" y="{y:.3}" font-size="{size}" font-family="sans-serif">{escaped}</text>"#
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n",
            w = self.width,
            h = self.height,
            body = self.body
        )
    }
}

/// Argand diagram: the curve, the axes, and a marker at each origin approach.
pub fn argand_svg(path: &ArgandPath) -> String {
    let size = 600.0;
    let extent = path.points.iter().map(|p| p.value.re.abs().max(p.value.im.abs())).fold(1.0f64, f64::max) * 1.05;
    let map = |re: f64, im: f64| (size / 2.0 + re / extent * size / 2.0, size / 2.0 - im / extent * size / 2.0);
    let mut svg = Svg::new(size, size);
    svg.line((0.0, size / 2.0), (size, size / 2.0), "#999", 0.5);
    svg.line((size / 2.0, 0.0), (size / 2.0, size), "#999", 0.5);
    let pts: Vec<(f64, f64)> = path.points.iter().map(|p| map(p.value.re, p.value.im)).collect();
    svg.polyline(&pts, "#1f4e9c", 0.8);
    svg.circle(size / 2.0, size / 2.0, 3.0, "#c00");
    svg.text(8.0, 16.0, 12.0, &format!("σ = {}, {} origin approaches", path.sigma, path.approaches.len()));
    svg.finish()
}

/// Unwrapped phase against t, jumps marked.
pub fn phase_svg(trace: &PhaseTrace) -> String {
    let (w, h) = (800.0, 400.0);
    let (t0, t1) = (trace.samples[0].t, trace.samples[trace.samples.len() - 1].t);
    let (lo, hi) =
        trace.samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.theta), hi.max(s.theta)));
    let span = (hi - lo).max(1e-9);
    let map =
        |t: f64, y: f64| (20.0 + (t - t0) / (t1 - t0).max(1e-12) * (w - 40.0), h - 20.0 - (y - lo) / span * (h - 40.0));
    let mut svg = Svg::new(w, h);
    let pts: Vec<(f64, f64)> = trace.samples.iter().map(|s| map(s.t, s.theta)).collect();
    svg.polyline(&pts, "#1f4e9c", 0.8);
    for s in trace.samples.iter().filter(|s| s.jump) {
        let (x, y) = map(s.t, s.theta);
        svg.circle(x, y, 2.5, "#c00");
    }
    svg.text(8.0, 16.0, 12.0, &format!("σ = {}, {} jumps", trace.sigma, trace.jumps.len()));
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 14.134_725_141_734_693, -1e-300, 6.02e23] {
            let s = real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(real(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_shape() {
        let s = csv(&["a", "b"], vec![vec!["1".to_string(), "x,y".to_string()]]);
        assert_eq!(s, "a,b\n1,\"x,y\"\n");
        assert_eq!(primes_csv(&[2, 3]), "p\n2\n3\n");
    }

    #[test]
    fn svg_document() {
        let mut svg = Svg::new(10.0, 10.0);
        svg.polyline(&[(0.0, 0.0), (1.0, 1.0)], "black", 1.0);
        svg.text(1.0, 1.0, 5.0, "a<b");
        let doc = svg.finish();
        assert!(doc.starts_with("<svg") && doc.ends_with("</svg>\n"));
        assert!(doc.contains("M0.000,0.000 L1.000,1.000") && doc.contains("a&lt;b"));
        assert!(!doc.contains('\r'));
    }
}
