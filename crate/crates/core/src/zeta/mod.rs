//! The Riemann zeta function near the critical strip.
//!
//! [`zeta`] uses Euler–Maclaurin summation with a term count adapted to `|s|`
//! and the requested tolerance, switching to the functional equation left of
//! `Re s = -2`. [`zeta_eta`] is an independent evaluation through the
//! alternating series, kept for cross-checks. On top sit the Riemann–Siegel θ,
//! Hardy's Z, the zero finder and the Argand / phase traces.

mod eta;
mod gamma;
mod hardy;
mod trace;

pub use eta::zeta_eta;
pub use gamma::ln_gamma;
pub use hardy::{find_zeros, hardy_z, riemann_siegel_theta, Zero, ZeroList, ZERO_BRACKET};
pub use trace::{
    argand_path, phase_trace, ArgandPath, ArgandPoint, OriginApproach, PhaseSample, PhaseTrace, ORIGIN_THRESHOLD,
    PHASE_WINDOW,
};

use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default accuracy of [`zeta`], relative to `max(1, |ζ(s)|)`.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Left edge of the directly summed region; further left the functional equation is used.
pub const FUNCTIONAL_EQUATION_EDGE: f64 = -2.0;

/// Bernoulli correction terms used by the summation.
pub const BERNOULLI_TERMS: usize = 12;

/// `B_{2k} / (2k)!` for k = 1..=13; the last entry only feeds the error bound.
const B_OVER_FACT: [f64; 13] = [
    8.333_333_333_333_333e-2,
    -1.388_888_888_888_889e-3,
    3.306_878_306_878_307e-5,
    -8.267_195_767_195_768e-7,
    2.087_675_698_786_81e-8,
    -5.284_190_138_687_493e-10,
    1.338_253_653_068_468e-11,
    -3.389_680_296_322_583e-13,
    8.586_062_056_277_845e-15,
    -2.174_868_698_558_062e-16,
    5.509_002_828_360_23e-18,
    -1.395_446_468_581_252e-19,
    3.534_707_039_629_467e-21,
];

const MIN_TERMS: usize = 20;
const MAX_TERMS: usize = 1 << 22;

fn check_finite(s: Complex64) -> Result<()> {
    if s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("non-finite argument {s}")))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("tolerance must be positive, got {tol}")))
    }
}

/// Upper bound for the Euler–Maclaurin remainder after [`BERNOULLI_TERMS`] corrections.
fn remainder_bound(s: Complex64, n: usize) -> f64 {
    let m = BERNOULLI_TERMS;
    let ln_n = (n as f64).ln();
    let mut ln_poch = 0.0;
    for j in 0..=(2 * m) {
        ln_poch += (s + j as f64).norm().ln();
    }
    let tail = (s + (2 * m + 1) as f64).norm() / (s.re + (2 * m + 1) as f64).max(1.0);
    (B_OVER_FACT[m].abs().ln() + ln_poch - (s.re + (2 * m + 1) as f64) * ln_n).exp() * tail
}

/// Number of leading terms so that the remainder is below `tol`.
pub(crate) fn terms_for(s: Complex64, tol: f64) -> usize {
    let mut n = MIN_TERMS.max((1.3 * s.im.abs()).ceil() as usize);
    n = n.max((1.3 * s.norm()).ceil() as usize);
    while n < MAX_TERMS && remainder_bound(s, n) > tol {
        n += n / 4 + 1;
    }
    n
}

/// Euler–Maclaurin sum with `n` leading terms. Returns `(value, Σ |k^{-s}|)`.
fn euler_maclaurin(s: Complex64, n: usize) -> (Complex64, f64) {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for k in 1..n {
        let term = (-s * (k as f64).ln()).exp();
        magnitude += term.re.hypot(term.im);
        sum += term;
    }
    (sum + em_tail(s, n), magnitude)
}

/// Integral, midpoint and Bernoulli terms at the cut `n`.
fn em_tail(s: Complex64, n: usize) -> Complex64 {
    let nf = n as f64;
    let n_s = (-s * nf.ln()).exp();
    let mut acc = n_s * nf / (s - 1.0) + 0.5 * n_s;
    let mut poch = s;
    let mut pow = n_s / nf;
    let inv_n2 = 1.0 / (nf * nf);
    for (k, c) in B_OVER_FACT.iter().take(BERNOULLI_TERMS).enumerate() {
        acc += *c * poch * pow;
        let j = (2 * k + 1) as f64;
        poch *= (s + j) * (s + j + 1.0);
        pow *= inv_n2;
    }
    acc
}

/// d/ds of the Euler–Maclaurin sum.
fn euler_maclaurin_derivative(s: Complex64, n: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 2..n {
        let l = (k as f64).ln();
        sum -= l * (-s * l).exp();
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_s = (-s * ln_n).exp();
    let sm1 = s - 1.0;
    let mut acc = -ln_n * n_s * nf / sm1 - n_s * nf / (sm1 * sm1) - 0.5 * ln_n * n_s;
    // d/ds [P(s) N^{-s-2k+1}] with P the rising factorial s (s+1) ... (s+2k-2)
    let mut p = s;
    let mut dp = Complex64::new(1.0, 0.0);
    let mut pow = n_s / nf;
    let inv_n2 = 1.0 / (nf * nf);
    for (k, c) in B_OVER_FACT.iter().take(BERNOULLI_TERMS).enumerate() {
        acc += *c * (dp - ln_n * p) * pow;
        let j = (2 * k + 1) as f64;
        let a = s + j;
        let b = s + j + 1.0;
        dp = dp * a * b + p * (a + b);
        p *= a * b;
        pow *= inv_n2;
    }
    sum + acc
}

/// ζ(s) with error at most `tol · max(1, |ζ(s)|)`.
///
/// Guaranteed region: `-2 <= Re s <= 10`, `|Im s| <= 520`; further left the
/// functional equation maps the argument into it.
pub fn zeta(s: Complex64, tol: f64) -> Result<Complex64> {
    check_finite(s)?;
    check_tol(tol)?;
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    if s.re < FUNCTIONAL_EQUATION_EDGE {
        return reflected(s, tol);
    }
    let n = terms_for(s, tol * 0.1);
    let (value, magnitude) = euler_maclaurin(s, n);
    let achievable = 8.0 * f64::EPSILON * (magnitude + 1.0) / value.norm().max(1.0);
    if tol < achievable {
        return Err(Error::Tolerance { requested: tol, achievable });
    }
    Ok(value)
}

/// ζ(s) = 2^s π^{s-1} sin(πs/2) Γ(1-s) ζ(1-s), evaluated in logs for `Im s >= 0`.
fn reflected(s: Complex64, tol: f64) -> Result<Complex64> {
    if s.im < 0.0 {
        return reflected(s.conj(), tol).map(|z| z.conj());
    }
    let mirror = zeta(1.0 - s, tol * 0.1)?;
    let i = Complex64::i();
    let w = 0.5 * PI * s;
    // sin w = e^{-iw} (e^{2iw} - 1) / (2i); the exponential factor is folded into the log
    let ln_factor = s * 2f64.ln() + (s - 1.0) * PI.ln() - i * w + ln_gamma(1.0 - s);
    let value = ln_factor.exp() * ((2.0 * i * w).exp() - 1.0) / (2.0 * i) * mirror;
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow("ζ(s) exceeds the double range"))
    }
}

/// ζ(s) and ζ'(s) at default accuracy; used to polish level-curve vertices.
pub fn zeta_and_derivative(s: Complex64) -> Result<(Complex64, Complex64)> {
    check_finite(s)?;
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    if s.re < FUNCTIONAL_EQUATION_EDGE {
        let h = 1e-5 * s.norm().max(1.0);
        let v = zeta(s, DEFAULT_TOL)?;
        let d = (zeta(s + h, DEFAULT_TOL)? - zeta(s - h, DEFAULT_TOL)?) / (2.0 * h);
        return Ok((v, d));
    }
    let n = terms_for(s, DEFAULT_TOL * 0.01);
    Ok((euler_maclaurin(s, n).0, euler_maclaurin_derivative(s, n)))
}

/// Infallible evaluation for internal callers that never touch the pole.
pub(crate) fn zeta_unchecked(s: Complex64) -> Complex64 {
    match zeta(s, DEFAULT_TOL) {
        Ok(z) => z,
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    }
}

/// Evaluates ζ across one row of fixed `σ` columns for many heights `t`.
///
/// The powers `k^{-σ}` are tabulated once per column, so a row costs one
/// `sin`/`cos` per summation term plus a real-by-complex product per cell.
#[derive(Debug, Clone)]
pub struct RowEvaluator {
    sigmas: Vec<f64>,
    sigma_min: f64,
    sigma_abs_max: f64,
    width: usize,
    ln_k: Vec<f64>,
    /// `k^{-σ_j}` at `[j * width + k]`.
    powers: Vec<f64>,
}

impl RowEvaluator {
    /// Columns must lie in the directly summed region `σ >= -2`.
    pub fn new(sigmas: &[f64], t_max: f64) -> Result<Self> {
        if sigmas.is_empty() {
            return Err(domain("row evaluator needs at least one column"));
        }
        if sigmas.iter().any(|s| !s.is_finite() || *s < FUNCTIONAL_EQUATION_EDGE) {
            return Err(domain(format!("row evaluator columns must be finite and >= {FUNCTIONAL_EQUATION_EDGE}")));
        }
        if !t_max.is_finite() {
            return Err(domain("non-finite height"));
        }
        let sigma_min = sigmas.iter().copied().fold(f64::INFINITY, f64::min);
        let sigma_abs_max = sigmas.iter().map(|s| s.abs()).fold(0.0, f64::max);
        let width = terms_for(Complex64::new(sigma_min, t_max.abs().max(sigma_abs_max)), DEFAULT_TOL * 0.01);
        let ln_k: Vec<f64> = (0..width).map(|k| (k.max(1) as f64).ln()).collect();
        let mut powers = vec![0.0; sigmas.len() * width];
        for (j, &sigma) in sigmas.iter().enumerate() {
            for k in 1..width {
                powers[j * width + k] = (-sigma * ln_k[k]).exp();
            }
        }
        Ok(RowEvaluator { sigmas: sigmas.to_vec(), sigma_min, sigma_abs_max, width, ln_k, powers })
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    /// ζ(σ_j + it) for every column; the pole cell (σ = 1, t = 0) is NaN.
    pub fn row(&self, t: f64) -> Vec<Complex64> {
        let worst = Complex64::new(self.sigma_min, t.abs().max(self.sigma_abs_max));
        let n = terms_for(worst, DEFAULT_TOL * 0.01).min(self.width);
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for k in 1..n {
            let (s, c) = (t * self.ln_k[k]).sin_cos();
            cos[k] = c;
            sin[k] = s;
        }
        self.sigmas
            .iter()
            .enumerate()
            .map(|(j, &sigma)| {
                let s = Complex64::new(sigma, t);
                if s == Complex64::new(1.0, 0.0) {
                    return Complex64::new(f64::NAN, f64::NAN);
                }
                let p = &self.powers[j * self.width..j * self.width + n];
                let mut re = 0.0;
                let mut im = 0.0;
                for k in 1..n {
                    re += p[k] * cos[k];
                    im -= p[k] * sin[k];
                }
                Complex64::new(re, im) + em_tail(s, n)
            })
            .collect()
    }
}
