//! Sampled traces of ζ along vertical lines: Argand curves and unwrapped phase.

use super::{hardy_z, zeta, DEFAULT_TOL};
use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// A step whose wrapped phase change is within this of ±π is a jump candidate.
pub const PHASE_WINDOW: f64 = 0.3;

/// `|ζ|` below this at a refined local minimum counts as an origin approach.
pub const ORIGIN_THRESHOLD: f64 = 1e-2;

/// Bisection depth when checking whether a large phase step is a discontinuity.
const JUMP_DEPTH: u32 = 40;

/// Relative interval width at which bisection stops. Much closer to a zero
/// the computed ζ is mostly roundoff and its argument is meaningless.
const JUMP_FLOOR: f64 = 1e-9;

fn sample_heights(t_lo: f64, t_hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(domain(format!("step must be positive, got {step}")));
    }
    if !(t_lo.is_finite() && t_hi.is_finite() && t_lo < t_hi) {
        return Err(domain(format!("empty height range ({t_lo}, {t_hi})")));
    }
    let n = ((t_hi - t_lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| t_lo + k as f64 * step).collect())
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSample {
    pub t: f64,
    pub theta: f64,
    /// A π-jump occurred between the previous sample and this one.
    pub jump: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrace {
    pub sigma: f64,
    pub samples: Vec<PhaseSample>,
    /// Heights of the detected π-jumps.
    pub jumps: Vec<f64>,
}

enum Step {
    Smooth(f64),
    Jump { t: f64, delta: f64 },
}

/// Resolves one sample step by bisection: either the phase change is
/// continuous at a fine enough scale, or a discontinuity of about π survives
/// down to the bisection floor.
fn resolve(sigma: f64, a: f64, b: f64, pa: f64, pb: f64, depth: u32) -> Result<Step> {
    let delta = wrap(pb - pa);
    if delta.abs() <= PI - PHASE_WINDOW {
        return Ok(Step::Smooth(delta));
    }
    if depth == 0 || b - a <= JUMP_FLOOR * a.abs().max(1.0) {
        return if (delta.abs() - PI).abs() < PHASE_WINDOW {
            Ok(Step::Jump { t: 0.5 * (a + b), delta })
        } else {
            Err(Error::Resolution(format!("phase step unresolved near t = {a}")))
        };
    }
    let m = 0.5 * (a + b);
    let pm = zeta(Complex64::new(sigma, m), DEFAULT_TOL)?.arg();
    let left = resolve(sigma, a, m, pa, pm, depth - 1)?;
    let right = resolve(sigma, m, b, pm, pb, depth - 1)?;
    Ok(match (left, right) {
        (Step::Smooth(x), Step::Smooth(y)) => Step::Smooth(x + y),
        (Step::Jump { t, delta }, Step::Smooth(y)) | (Step::Smooth(y), Step::Jump { t, delta }) => {
            Step::Jump { t, delta: delta + y }
        }
        (Step::Jump { .. }, Step::Jump { .. }) => {
            return Err(Error::Resolution(format!("two phase jumps within one step near t = {a}")))
        }
    })
}

/// Unwrapped `arg ζ(σ + it)` on `t_lo, t_lo + step, ..`.
///
/// Steps whose wrapped change exceeds `π − 0.3` are bisected; a change that
/// stays within 0.3 of ±π down to the bisection floor is a π-jump (ζ passes
/// through zero on the line). On `σ = 1/2` each jump must coincide with a sign
/// change of Hardy's Z. More than a quarter of the steps needing bisection
/// means the step is too coarse and is a resolution error.
pub fn phase_trace(sigma: f64, t_lo: f64, t_hi: f64, step: f64) -> Result<PhaseTrace> {
    if !sigma.is_finite() {
        return Err(domain("non-finite sigma"));
    }
    let ts = sample_heights(t_lo, t_hi, step)?;
    let mut phases = Vec::with_capacity(ts.len());
    for &t in &ts {
        phases.push(zeta(Complex64::new(sigma, t), DEFAULT_TOL)?.arg());
    }
    let on_critical_line = sigma == 0.5;
    let mut samples = Vec::with_capacity(ts.len());
    let mut jumps = Vec::new();
    let mut theta = phases[0];
    let mut bisected = 0usize;
    samples.push(PhaseSample { t: ts[0], theta, jump: false });
    for k in 1..ts.len() {
        let delta = wrap(phases[k] - phases[k - 1]);
        let mut jump = false;
        if delta.abs() <= PI - PHASE_WINDOW {
            theta += delta;
        } else {
            bisected += 1;
            match resolve(sigma, ts[k - 1], ts[k], phases[k - 1], phases[k], JUMP_DEPTH)? {
                Step::Smooth(d) => theta += d,
                Step::Jump { t, delta } => {
                    if on_critical_line && hardy_z(ts[k - 1]) * hardy_z(ts[k]) > 0.0 {
                        return Err(Error::Resolution(format!("phase jump near t = {t} without a sign change of Z")));
                    }
                    theta += delta;
                    jump = true;
                    jumps.push(t);
                }
            }
        }
        samples.push(PhaseSample { t: ts[k], theta, jump });
    }
    let steps = ts.len() - 1;
    if bisected > 4 && bisected * 4 > steps {
        return Err(Error::Resolution(format!(
            "step {step} too coarse: {bisected} of {steps} steps exceed the unwrap threshold"
        )));
    }
    Ok(PhaseTrace { sigma, samples, jumps })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgandPoint {
    pub t: f64,
    pub value: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginApproach {
    pub t: f64,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArgandPath {
    pub sigma: f64,
    pub points: Vec<ArgandPoint>,
    /// Refined local minima of `|ζ|` below [`ORIGIN_THRESHOLD`].
    pub approaches: Vec<OriginApproach>,
}

/// Golden-section minimum of `|ζ(σ + it)|` on `[a, b]`.
fn refine_minimum(sigma: f64, mut a: f64, mut b: f64) -> Result<OriginApproach> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |t: f64| zeta(Complex64::new(sigma, t), DEFAULT_TOL).map(|z| z.norm());
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let t = 0.5 * (a + b);
    Ok(OriginApproach { t, modulus: f(t)? })
}

/// The curve `t ↦ ζ(σ + it)` sampled on `t_lo, t_lo + step, ..` with its
/// close passes by the origin.
pub fn argand_path(sigma: f64, t_lo: f64, t_hi: f64, step: f64) -> Result<ArgandPath> {
    if !sigma.is_finite() {
        return Err(domain("non-finite sigma"));
    }
    let ts = sample_heights(t_lo, t_hi, step)?;
    let mut points = Vec::with_capacity(ts.len());
    for &t in &ts {
        points.push(ArgandPoint { t, value: zeta(Complex64::new(sigma, t), DEFAULT_TOL)? });
    }
    let mut approaches = Vec::new();
    for k in 1..points.len().saturating_sub(1) {
        let m = points[k].value.norm();
        if m < points[k - 1].value.norm() && m <= points[k + 1].value.norm() {
            let a = refine_minimum(sigma, points[k - 1].t, points[k + 1].t)?;
            if a.modulus < ORIGIN_THRESHOLD {
                approaches.push(a);
            }
        }
    }
    Ok(ArgandPath { sigma, points, approaches })
}
