//! Riemann–Siegel θ, Hardy's Z and critical-line zeros.

use super::{ln_gamma, zeta_unchecked};
use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Width below which a sign-change bracket counts as a located zero.
pub const ZERO_BRACKET: f64 = 1e-6;

const INITIAL_STEP: f64 = 0.05;
const MAX_REFINEMENTS: u32 = 6;
const T_LIMIT: f64 = 520.0;

/// θ(t) = arg Γ(1/4 + it/2) − (t/2) ln π, continuous in t and odd.
pub fn riemann_siegel_theta(t: f64) -> f64 {
    ln_gamma(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln()
}

/// Z(t) = e^{iθ(t)} ζ(1/2 + it); real, even, and `|Z(t)| = |ζ(1/2 + it)|`.
pub fn hardy_z(t: f64) -> f64 {
    let rot = Complex64::from_polar(1.0, riemann_siegel_theta(t));
    (rot * zeta_unchecked(Complex64::new(0.5, t))).re
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    /// Bracket midpoint.
    pub t: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroList {
    pub t_lo: f64,
    pub t_hi: f64,
    pub zeros: Vec<Zero>,
    /// Grid step of the scan that was accepted.
    pub step: f64,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn heights(&self) -> Vec<f64> {
        self.zeros.iter().map(|z| z.t).collect()
    }
}

/// Zeros expected in `(a, b)` from the growth of θ; the true count differs by `S(b) - S(a)`.
fn theta_count(a: f64, b: f64) -> f64 {
    (riemann_siegel_theta(b) - riemann_siegel_theta(a)) / PI
}

fn bisect(mut lo: f64, mut hi: f64, mut z_lo: f64) -> Zero {
    while hi - lo > ZERO_BRACKET {
        let mid = 0.5 * (lo + hi);
        let z_mid = hardy_z(mid);
        if z_mid == 0.0 {
            return Zero { t: mid, lo: mid, hi: mid };
        }
        if (z_mid > 0.0) == (z_lo > 0.0) {
            lo = mid;
            z_lo = z_mid;
        } else {
            hi = mid;
        }
    }
    Zero { t: 0.5 * (lo + hi), lo, hi }
}

fn scan(t_lo: f64, t_hi: f64, step: f64) -> Vec<Zero> {
    let n = ((t_hi - t_lo) / step).ceil() as usize;
    let mut zeros = Vec::new();
    let mut a = t_lo;
    let mut za = hardy_z(a);
    for k in 1..=n {
        let b = if k == n { t_hi } else { t_lo + k as f64 * step };
        let zb = hardy_z(b);
        if za != 0.0 && zb != 0.0 && (za > 0.0) != (zb > 0.0) {
            zeros.push(bisect(a, b, za));
        } else if zb == 0.0 && k < n {
            zeros.push(Zero { t: b, lo: b, hi: b });
        }
        a = b;
        za = zb;
    }
    zeros
}

/// All sign changes of Z in `(t_lo, t_hi)`, bracketed to [`ZERO_BRACKET`].
///
/// The count is checked against the θ estimate; a mismatch of two or more
/// halves the step, and one that survives every refinement is an
/// [`Error::IncompleteScan`] carrying the partial list.
pub fn find_zeros(t_lo: f64, t_hi: f64) -> Result<ZeroList> {
    if !(t_lo.is_finite() && t_hi.is_finite() && 0.0 <= t_lo && t_lo < t_hi && t_hi <= T_LIMIT) {
        return Err(domain(format!("zero scan needs 0 <= t_lo < t_hi <= {T_LIMIT}, got ({t_lo}, {t_hi})")));
    }
    let expected = theta_count(t_lo, t_hi);
    let mut step = INITIAL_STEP;
    let mut zeros = scan(t_lo, t_hi, step);
    for _ in 0..MAX_REFINEMENTS {
        if (zeros.len() as f64 - expected).abs() < 2.0 {
            return Ok(ZeroList { t_lo, t_hi, zeros, step });
        }
        step *= 0.5;
        zeros = scan(t_lo, t_hi, step);
    }
    if (zeros.len() as f64 - expected).abs() < 2.0 {
        return Ok(ZeroList { t_lo, t_hi, zeros, step });
    }
    Err(Error::IncompleteScan {
        found: zeros.len(),
        expected: expected.round().max(0.0) as usize,
        partial: zeros.iter().map(|z| z.t).collect(),
    })
}
