//! Escape classification and reference-line numbering.

use super::grid::GridSpec;
use super::march::{Boundary, LevelCurve, Parity};
use crate::error::{domain, Result};
use crate::wheel::SeqId;
use crate::zeta::{zeta, DEFAULT_TOL};
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};

/// Abscissa at which escaping thick lines are compared with `mπ / ln 2`.
pub const FAR_SIGMA: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EscapeClass {
    pub escapes_right: bool,
    /// `round(t_end · ln 2 / π)` for escaping thick curves.
    pub asym_index: Option<i64>,
    /// The curve hit the top or bottom of the grid before escape was decided.
    pub indeterminate: bool,
}

/// Decides whether `curve` runs off to the right past `sigma_right`.
///
/// Escaping means: the curve ends on the right edge of the grid, and beyond
/// its last visit left of `sigma_right` it moves monotonically rightward with
/// a t-variation below `π / (2 ln 2)`.
pub fn classify_escape(curve: &LevelCurve, spec: &GridSpec, sigma_right: f64) -> Result<EscapeClass> {
    if !(sigma_right.is_finite() && spec.sigma_hi >= sigma_right + 1.0 - 1e-12) {
        return Err(domain(format!(
            "escape test at σ = {sigma_right} needs the grid to reach σ = {}",
            sigma_right + 1.0
        )));
    }
    let none = EscapeClass { escapes_right: false, asym_index: None, indeterminate: false };
    if curve.closed {
        return Ok(none);
    }
    let mut pts: Vec<(f64, f64)> = curve.points.clone();
    let right_end = if curve.ends[1] == Boundary::Right {
        true
    } else if curve.ends[0] == Boundary::Right {
        pts.reverse();
        true
    } else {
        false
    };
    if !right_end {
        let cut = curve.ends.iter().any(|e| matches!(e, Boundary::Top | Boundary::Bottom));
        return Ok(EscapeClass { indeterminate: cut, ..none });
    }
    let start = pts.iter().rposition(|p| p.0 < sigma_right).map_or(0, |k| k + 1);
    let tail = &pts[start..];
    if tail.is_empty() {
        return Ok(none);
    }
    let monotone = tail.windows(2).all(|w| w[1].0 >= w[0].0 - 1e-9);
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    if !(monotone && hi - lo < PI / (2.0 * LN_2)) {
        return Ok(none);
    }
    let t_end = tail[tail.len() - 1].1;
    let asym_index = (curve.parity == Parity::Thick).then(|| (t_end * LN_2 / PI).round() as i64);
    Ok(EscapeClass { escapes_right: true, asym_index, indeterminate: false })
}

/// Height of the `m`-th horizontal thick line at σ = [`FAR_SIGMA`], by bisection
/// of `Im ζ` between `(m ∓ 1/2) π / ln 2`, where the `2^{-s}` term fixes the sign.
pub fn far_height(m: i64) -> Result<f64> {
    if m < 1 {
        return Err(domain(format!("horizontal family index must be >= 1, got {m}")));
    }
    let f = |t: f64| -> Result<f64> { Ok(zeta(Complex64::new(FAR_SIGMA, t), DEFAULT_TOL)?.im) };
    let step = PI / LN_2;
    let mut a = (m as f64 - 0.5) * step;
    let mut b = (m as f64 + 0.5) * step;
    let mut fa = f(a)?;
    if fa * f(b)? > 0.0 {
        return Err(domain(format!("no sign change of Im ζ around the m = {m} horizontal")));
    }
    while b - a > 1e-12 * b {
        let c = 0.5 * (a + b);
        let fc = f(c)?;
        if (fc >= 0.0) == (fa >= 0.0) {
            a = c;
            fa = fc;
        } else {
            b = c;
        }
    }
    Ok(0.5 * (a + b))
}

/// One crossing of the reference line, i.e. one numbered line.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledLine {
    pub label: u32,
    pub parity: Parity,
    pub t_at_reference: f64,
    /// Index into the curve list.
    pub curve: usize,
    pub escapes_right: bool,
    pub indeterminate: bool,
    pub asym_index: Option<i64>,
    /// Residue sequence of an odd label.
    pub sq_class: Option<SeqId>,
    /// The other crossing of the same curve, when the curve is a loop through the reference line.
    pub partner: Option<u32>,
    /// Thick lines carry odd labels and thin lines even ones.
    pub alternation_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Numbering {
    pub reference_sigma: f64,
    pub lines: Vec<LabeledLine>,
    /// Labels whose parity breaks the thick-odd / thin-even alternation.
    pub parity_violations: Vec<u32>,
    /// Crossings above this height were left unnumbered because of a tracing gap.
    pub refused_above: Option<f64>,
}

impl Numbering {
    pub fn line(&self, label: u32) -> Option<&LabeledLine> {
        self.lines.get((label as usize).wrapping_sub(1)).filter(|l| l.label == label)
    }

    pub fn escaping_labels(&self) -> Vec<u32> {
        self.lines.iter().filter(|l| l.escapes_right).map(|l| l.label).collect()
    }
}

/// Crossing heights of `curve` with `σ = sigma`, polished on the vertical line.
fn crossings(curve: &LevelCurve, sigma: f64) -> Result<Vec<f64>> {
    let pts = &curve.points;
    let level = |t: f64| -> Result<f64> { Ok(curve.parity.level(zeta(Complex64::new(sigma, t), DEFAULT_TOL)?)) };
    let mut out = Vec::new();
    for (k, p) in pts.iter().enumerate() {
        if p.0 == sigma {
            out.push(p.1);
            continue;
        }
        if let Some(q) = pts.get(k + 1) {
            if q.0 != sigma && (p.0 - sigma) * (q.0 - sigma) < 0.0 {
                let w = (sigma - p.0) / (q.0 - p.0);
                let guess = p.1 + w * (q.1 - p.1);
                let h = (q.1 - p.1).abs().max(1e-6);
                let (mut a, mut b) = (guess - h, guess + h);
                let (mut fa, fb) = (level(a)?, level(b)?);
                if fa * fb > 0.0 {
                    out.push(guess);
                    continue;
                }
                while b - a > 1e-13 * b.abs().max(1.0) {
                    let c = 0.5 * (a + b);
                    let fc = level(c)?;
                    if (fc >= 0.0) == (fa >= 0.0) {
                        a = c;
                        fa = fc;
                    } else {
                        b = c;
                    }
                }
                out.push(0.5 * (a + b));
            }
        }
    }
    if curve.closed && pts.len() > 1 {
        let (p, q) = (pts[pts.len() - 1], pts[0]);
        if p.0 != sigma && q.0 != sigma && (p.0 - sigma) * (q.0 - sigma) < 0.0 {
            let w = (sigma - p.0) / (q.0 - p.0);
            out.push(p.1 + w * (q.1 - p.1));
        }
    }
    Ok(out)
}

/// Numbers the crossings of `σ = reference_sigma` by increasing t, starting at 1.
///
/// Parity alternation is checked, not enforced. Crossings above `gap_floor`
/// (the lowest tracing gap) are left unnumbered. Each curve's `labels` are filled in.
pub fn assign_numbers(curves: &mut [LevelCurve], reference_sigma: f64, gap_floor: Option<f64>) -> Result<Numbering> {
    if !reference_sigma.is_finite() {
        return Err(domain("non-finite reference line"));
    }
    let mut found: Vec<(f64, Parity, usize)> = Vec::new();
    for (k, c) in curves.iter().enumerate() {
        for t in crossings(c, reference_sigma)? {
            if t > 0.0 {
                found.push((t, c.parity, k));
            }
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    if let Some(g) = gap_floor {
        found.retain(|f| f.0 <= g);
    }
    for c in curves.iter_mut() {
        c.labels.clear();
    }
    let mut lines = Vec::with_capacity(found.len());
    for (n, &(t, parity, k)) in found.iter().enumerate() {
        let label = n as u32 + 1;
        let c = &mut curves[k];
        c.labels.push(label);
        let odd = label % 2 == 1;
        lines.push(LabeledLine {
            label,
            parity,
            t_at_reference: t,
            curve: k,
            escapes_right: c.escapes_right,
            indeterminate: c.indeterminate,
            asym_index: c.asym_index,
            sq_class: sq_membership(label).ok(),
            partner: None,
            alternation_ok: (parity == Parity::Thick) == odd,
        });
    }
    for line in lines.iter_mut() {
        let labels = &curves[line.curve].labels;
        if labels.len() == 2 {
            line.partner = labels.iter().copied().find(|&l| l != line.label);
        }
    }
    let parity_violations = lines.iter().filter(|l| !l.alternation_ok).map(|l| l.label).collect();
    Ok(Numbering { reference_sigma, lines, parity_violations, refused_above: gap_floor })
}

/// Residue sequence of an odd line number.
pub fn sq_membership(label: u32) -> Result<SeqId> {
    if label == 0 || label.is_multiple_of(2) {
        return Err(domain(format!("line {label} is not an odd positive number")));
    }
    Ok(SeqId::from_residue(label as u64 % 6).expect("odd residues are 1, 3 or 5"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership() {
        assert_eq!(sq_membership(17).unwrap(), SeqId::Sq1);
        assert_eq!(sq_membership(9).unwrap(), SeqId::Sq3);
        assert_eq!(sq_membership(25).unwrap(), SeqId::Sq2);
        assert_eq!(sq_membership(1).unwrap(), SeqId::Sq2);
        assert!(sq_membership(4).is_err());
        assert!(sq_membership(0).is_err());
    }

    #[test]
    fn far_heights_stay_within_the_third_term() {
        // |Σ_{n>=3} n^{-6}| / (2^{-6} ln 2) bounds the offset from mπ/ln 2
        let bound = (1.017_343_061_984_449 - 1.0 - 2f64.powi(-6)) / (2f64.powi(-6) * LN_2);
        for m in 1..=10 {
            let t = far_height(m).unwrap();
            assert!((t - m as f64 * PI / LN_2).abs() < bound, "m={m}: {t}");
        }
        assert!(far_height(0).is_err());
    }

    fn curve(points: Vec<(f64, f64)>, ends: [Boundary; 2], parity: Parity) -> LevelCurve {
        LevelCurve {
            parity,
            points,
            closed: false,
            ends,
            escapes_right: false,
            asym_index: None,
            indeterminate: false,
            labels: vec![],
        }
    }

    #[test]
    fn escape_rules() {
        let spec = GridSpec::new(-1.0, 3.0, 0.0, 10.0, 8, 8).unwrap();
        let flat = curve(
            vec![(-1.0, 4.0), (1.0, 4.2), (2.5, 4.4), (3.0, 4.45)],
            [Boundary::Left, Boundary::Right],
            Parity::Thick,
        );
        let e = classify_escape(&flat, &spec, 2.0).unwrap();
        assert!(e.escapes_right && e.asym_index == Some(1) && !e.indeterminate);
        let wavy = curve(
            vec![(-1.0, 4.0), (2.5, 4.4), (2.2, 7.5), (3.0, 7.6)],
            [Boundary::Left, Boundary::Right],
            Parity::Thick,
        );
        assert!(!classify_escape(&wavy, &spec, 2.0).unwrap().escapes_right);
        let cut = curve(vec![(-1.0, 9.0), (0.5, 10.0)], [Boundary::Left, Boundary::Top], Parity::Thick);
        assert!(classify_escape(&cut, &spec, 2.0).unwrap().indeterminate);
        let loop_ = curve(vec![(-1.0, 5.0), (0.5, 5.5), (-1.0, 6.0)], [Boundary::Left, Boundary::Left], Parity::Thin);
        assert!(!classify_escape(&loop_, &spec, 2.0).unwrap().escapes_right);
        assert!(classify_escape(&flat, &spec, 2.5).is_err());
    }
}
