//! Standard test objectives with known minima.

use core::f64::consts::PI;

/// `Σ x²`, minimum 0 at the origin.
pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `10·n + Σ (x² − 10·cos(2πx))`, minimum 0 at the origin; usually searched on
/// `[-5.12, 5.12]ⁿ`.
pub fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|&v| v * v - 10.0 * libm::cos(2.0 * PI * v))
            .sum::<f64>()
}

/// `Σ (x − shift)²`, minimum 0 at `shift` in every coordinate.
pub fn shifted_sphere(shift: f64) -> impl Fn(&[f64]) -> f64 {
    move |x| x.iter().map(|v| (v - shift) * (v - shift)).sum()
}
