//! Complex log-Gamma.
//!
//! Stirling's series after upward recurrence to `Re z >= 10`, and the
//! reflection formula for `Re z < 1/2`. On the right half-plane the result is
//! the analytic continuation of `ln Γ` from the positive real axis (the same
//! branch as the usual `loggamma` of scientific libraries); in the reflection
//! region it is a logarithm of `Γ(z)` defined modulo `2πi`, which is all the
//! payoff transforms need since they only ever exponentiate it.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{PricingError, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k-1)), k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const SHIFT_TARGET: f64 = 10.0;

/// `ln Γ(z)` for complex `z`.
///
/// Fails with [`PricingError::Pole`] at the non-positive integers.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(PricingError::Numerical(format!("log_gamma of non-finite {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(PricingError::Pole(z.re));
    }
    if z.re < 0.5 {
        // Γ(z) Γ(1-z) = π / sin(πz)
        let reflected = log_gamma_right(Complex64::new(1.0, 0.0) - z);
        Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - reflected)
    } else {
        Ok(log_gamma_right(z))
    }
}

fn log_gamma_right(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < SHIFT_TARGET {
        shift += z.ln();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING {
        series += power * c;
        power *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series - shift
}

/// `ln sin(πz)` without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let w = z * PI;
    let ln_2i = Complex64::new(2f64.ln(), PI / 2.0);
    let i = Complex64::i();
    if z.im > 20.0 {
        // sin w = e^{-iw} (e^{2iw} - 1) / (2i)
        -i * w + ((i * w * 2.0).exp() - 1.0).ln() - ln_2i
    } else if z.im < -20.0 {
        // sin w = e^{iw} (1 - e^{-2iw}) / (2i)
        i * w + (1.0 - (-i * w * 2.0).exp()).ln() - ln_2i
    } else {
        w.sin().ln()
    }
}
