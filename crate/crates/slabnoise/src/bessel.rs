//! Cylindrical Bessel functions J0, J1 and helpers for Hankel-type
//! quadrature. Evaluation is delegated to libm's implementations; the small
//! additions here are the numerically safe J1(x)/x and approximate zeros
//! used to split oscillatory integrals into sign-alternating panels.

pub fn j0(x: f64) -> f64 {
    libm::j0(x)
}

pub fn j1(x: f64) -> f64 {
    libm::j1(x)
}

/// J1(x)/x, finite at the origin (→ 1/2).
pub fn j1_over_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        // J1(x)/x = 1/2 − x²/16 + x⁴/384 − ...
        let x2 = x * x;
        0.5 - x2 / 16.0 + x2 * x2 / 384.0
    } else {
        libm::j1(x) / x
    }
}

/// J1'(x) = J0(x) − J1(x)/x.
pub fn j1_prime(x: f64) -> f64 {
    j0(x) - j1_over_x(x)
}

/// k-th positive zero of J_m (m ∈ {0, 1}), by McMahon's expansion. Accurate
/// to a small fraction of the oscillation period, which is all that panel
/// splitting needs.
pub fn j_zero(m: u32, k: usize) -> f64 {
    debug_assert!(m <= 1);
    let beta = (k as f64 + 0.5 * m as f64 - 0.25) * std::f64::consts::PI;
    let mu = 4.0 * (m as f64) * (m as f64);
    beta - (mu - 1.0) / (8.0 * beta)
}
