//! Complex log-Gamma by the Stirling series after an upward recurrence shift.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `B_{2k} / (2k (2k-1))` for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

const SHIFT_RADIUS: f64 = 14.0;

/// `ln Γ(z)`. For `Re z > 0` the imaginary part is the continuous branch
/// (the sum of principal logs along the shift), so `arg Γ` is smooth in `Im z`.
///
/// Non-positive integers are poles and return a real part of `+inf`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        // Γ(z) Γ(1-z) = π / sin(πz)
        if z.im == 0.0 && z.re == z.re.floor() {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(1.0 - z);
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < SHIFT_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    stirling(w) - shift
}

fn stirling(z: Complex64) -> Complex64 {
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let mut acc = (z - 0.5) * z.ln() - z + half_ln_2pi;
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut p = inv;
    for c in STIRLING {
        acc += c * p;
        p *= inv2;
    }
    acc
}

/// `ln sin(πz)` without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = PI * z;
    let i = Complex64::i();
    if w.im >= 0.0 {
        // sin w = e^{-iw} (e^{2iw} - 1) / (2i)
        -i * w + (((2.0 * i * w).exp() - 1.0) / (2.0 * i)).ln()
    } else {
        ln_sin_pi(z.conj()).conj()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn factorials() {
        let mut f = 1.0f64;
        for n in 1..20 {
            let g = ln_gamma(Complex64::new(n as f64, 0.0));
            assert_relative_eq!(g.re, f.ln(), epsilon = 1e-12, max_relative = 1e-14);
            assert!(g.im.abs() < 1e-14);
            f *= n as f64;
        }
    }

    #[test]
    fn half_integer_and_reflection() {
        let g = ln_gamma(Complex64::new(0.5, 0.0));
        assert_relative_eq!(g.re, 0.5 * PI.ln(), epsilon = 1e-14);
        // Γ(-1/2) = -2√π
        let g = ln_gamma(Complex64::new(-0.5, 0.0)).exp();
        assert_relative_eq!(g.re, -2.0 * PI.sqrt(), epsilon = 1e-12);
        assert!(ln_gamma(Complex64::new(-3.0, 0.0)).re.is_infinite());
    }

    #[test]
    fn recurrence_off_axis() {
        for &(x, y) in &[(0.25, 3.0), (0.25, 250.0), (2.5, -7.0), (-1.3, 0.4), (0.7, 0.0001)] {
            let z = Complex64::new(x, y);
            let d = ln_gamma(z + 1.0) - ln_gamma(z) - z.ln();
            let turns = d.im / (2.0 * PI);
            assert!(d.re.abs() < 1e-12, "{z}: {d}");
            assert!((turns - turns.round()).abs() < 1e-12, "{z}: {d}");
        }
    }

    #[test]
    fn modulus_on_imaginary_line() {
        // |Γ(iy)|² = π / (y sinh πy)
        for y in [0.3, 1.0, 4.0, 20.0] {
            let g = ln_gamma(Complex64::new(0.0, y)).re;
            let want = 0.5 * (PI / (y * (PI * y).sinh())).ln();
            assert_relative_eq!(g, want, epsilon = 1e-11);
        }
    }
}
