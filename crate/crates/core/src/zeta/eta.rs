//! ζ through the alternating (eta) series with repeated averaging of partial sums.
//!
//! Independent of the Euler–Maclaurin path; used as a cross-check oracle.

use crate::error::{domain, Error, Result};
use num_complex::Complex64;

const DEPTH: usize = 32;

/// ζ(s) = η(s) / (1 - 2^{1-s}) for `Re s > 0`.
///
/// Fails where `1 - 2^{1-s}` is too small to divide by (near `Re s = 1`,
/// `t = 2πk / ln 2`).
pub fn zeta_eta(s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) || s.re <= 0.0 {
        return Err(domain(format!("eta series needs finite s with Re s > 0, got {s}")));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    let denom = 1.0 - (Complex64::new(2f64.ln(), 0.0) * (1.0 - s)).exp();
    if denom.norm() < 1e-3 {
        return Err(domain(format!("1 - 2^(1-s) vanishes near {s}")));
    }
    let m = (2.0 * (s.norm() + DEPTH as f64)).ceil() as usize;
    let mut partial = Complex64::new(0.0, 0.0);
    let mut sums = Vec::with_capacity(DEPTH + 1);
    for n in 1..=(m + DEPTH) {
        let term = (-s * (n as f64).ln()).exp();
        if n % 2 == 1 {
            partial += term;
        } else {
            partial -= term;
        }
        if n >= m {
            sums.push(partial);
        }
    }
    // binomial average of S_m .. S_{m+DEPTH}
    let mut weight = 0.5f64.powi(DEPTH as i32);
    let mut eta = Complex64::new(0.0, 0.0);
    for (j, sj) in sums.iter().enumerate() {
        eta += weight * sj;
        weight *= (DEPTH - j) as f64 / (j + 1) as f64;
    }
    Ok(eta / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn known_values() {
        let z = zeta_eta(Complex64::new(2.0, 0.0)).unwrap();
        assert!((z.re - PI * PI / 6.0).abs() < 1e-12);
        let z = zeta_eta(Complex64::new(0.5, 0.0)).unwrap();
        assert!((z.re + 1.460_354_508_809_586_8).abs() < 1e-11);
        let z = zeta_eta(Complex64::new(0.5, 14.134_725_141_734_693)).unwrap();
        assert!(z.norm() < 1e-9);
    }

    #[test]
    fn refuses_outside_half_plane() {
        assert!(zeta_eta(Complex64::new(-1.0, 2.0)).is_err());
        assert!(zeta_eta(Complex64::new(1.0, 0.0)).is_err());
        assert!(zeta_eta(Complex64::new(1.0, 2.0 * PI / 2f64.ln())).is_err());
    }
}
