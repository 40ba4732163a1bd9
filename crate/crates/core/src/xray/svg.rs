//! Strip rendering of the level curves: 40 units of t per strip, side by side.

use super::march::Parity;
use super::report::XrayReport;
use crate::emit::Svg;

const STRIP_T: f64 = 40.0;
const SCALE: f64 = 14.0;
const GAP: f64 = 36.0;
const MARGIN: f64 = 24.0;

/// SVG of the curves in `σ ∈ [sigma_lo, sigma_hi]`, zeros as dots, line numbers at the left edge.
pub fn render_strips(report: &XrayReport, sigma_lo: f64, sigma_hi: f64) -> String {
    let t_max = report.options.t_max;
    let strips = (t_max / STRIP_T).ceil().max(1.0) as usize;
    let width_one = (sigma_hi - sigma_lo) * SCALE * 4.0;
    let height = STRIP_T * SCALE + 2.0 * MARGIN;
    let width = strips as f64 * (width_one + GAP) + 2.0 * MARGIN;
    let mut svg = Svg::new(width.round(), height.round());
    for k in 0..strips {
        let t0 = k as f64 * STRIP_T;
        let t1 = t0 + STRIP_T;
        let x0 = MARGIN + k as f64 * (width_one + GAP);
        let map = |s: f64, t: f64| (x0 + (s - sigma_lo) * SCALE * 4.0, MARGIN + (t1 - t) * SCALE);
        let inside = |p: &(f64, f64)| p.0 >= sigma_lo && p.0 <= sigma_hi && p.1 >= t0 && p.1 <= t1.min(t_max);
        // frame and the critical line
        let (l, top) = map(sigma_lo, t1);
        let (r, bottom) = map(sigma_hi, t0);
        for (a, b) in
            [((l, top), (r, top)), ((r, top), (r, bottom)), ((r, bottom), (l, bottom)), ((l, bottom), (l, top))]
        {
            svg.line(a, b, "#666", 0.6);
        }
        for s in [0.0, 0.5, 1.0] {
            if s > sigma_lo && s < sigma_hi {
                svg.line(map(s, t0), map(s, t1), "#ccc", 0.4);
            }
        }
        svg.text(l, bottom + 14.0, 10.0, &format!("t = {t0}..{t1}"));
        for c in &report.curves {
            let (stroke, w) = match c.parity {
                Parity::Thick => ("#000", 1.4),
                Parity::Thin => ("#3a6ea5", 0.6),
            };
            let mut run: Vec<(f64, f64)> = Vec::new();
            for p in &c.points {
                if inside(p) {
                    run.push(map(p.0, p.1));
                } else if !run.is_empty() {
                    svg.polyline(&run, stroke, w);
                    run.clear();
                }
            }
            svg.polyline(&run, stroke, w);
        }
        for &z in report.zeros.iter().filter(|&&z| z >= t0 && z < t1) {
            let (x, y) = map(0.5, z);
            svg.circle(x, y, 2.2, "#c00");
        }
        for line in report.numbering.lines.iter().filter(|l| l.t_at_reference >= t0 && l.t_at_reference < t1) {
            let (x, y) = map(sigma_lo, line.t_at_reference);
            let label = if line.escapes_right { format!("{}*", line.label) } else { line.label.to_string() };
            svg.text(x - 20.0, y + 3.0, 7.0, &label);
        }
    }
    svg.finish()
}
