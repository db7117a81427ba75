//! Small special-function helpers shared by the Fock and Hermite routines.

use statrs::function::factorial;
use std::f64::consts::FRAC_PI_2;

/// Gudermannian function `gd(z) = 2 atan(eᶻ) - π/2`.
pub fn gudermannian(z: f64) -> f64 {
    2.0 * z.exp().atan() - FRAC_PI_2
}

/// `ln C(n, k)`; `-∞` when `k > n`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        f64::NEG_INFINITY
    } else {
        factorial::ln_binomial(n as u64, k as u64)
    }
}

pub fn ln_factorial(n: usize) -> f64 {
    factorial::ln_factorial(n as u64)
}

/// `n · ln x` with the convention `0⁰ = 1`, so a zero base with zero exponent
/// contributes nothing instead of `0 · (-∞) = NaN`.
pub(crate) fn ln_pow(x: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        n as f64 * x.ln()
    }
}

/// `ln Σ exp(l)`; `-∞` for an empty or all-zero sum.
pub(crate) fn ln_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let scaled: f64 = logs.iter().map(|&l| (l - max).exp()).sum();
    max + scaled.ln()
}
