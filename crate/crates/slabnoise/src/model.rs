//! Material, geometry, and spin types shared by every other module.

use crate::constants::{HBAR, K_B, MU_0};
use crate::error::{Error, Result};
use crate::linalg::Vec3;
use num_complex::Complex64;
use serde::Serialize;

/// Conductive/permeable slab material.
///
/// The complex conductivity is stored as magnitude and phase with the
/// convention `σ = |σ| e^{-iφ}`, `φ ∈ [0, π/2]`. An ideal superconductor in
/// the London regime has a purely imaginary conductivity, `φ = π/2`.
/// Permeability is complex; a positive imaginary part is magnetically lossy
/// under the `e^{iωt}` time convention used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Material {
    sigma_mag: f64,
    phi: f64,
    mu_re: f64,
    mu_im: f64,
}

impl Material {
    /// Ordinary conductor with real conductivity (φ = 0) and vacuum
    /// permeability.
    pub fn conductor(sigma: f64) -> Result<Self> {
        Self::new(sigma, 0.0, Complex64::new(MU_0, 0.0))
    }

    pub fn new(sigma_mag: f64, phi: f64, mu: Complex64) -> Result<Self> {
        if !(sigma_mag >= 0.0) || !sigma_mag.is_finite() {
            return Err(Error::Domain(format!(
                "conductivity magnitude must be finite and non-negative, got {sigma_mag}"
            )));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&phi) {
            return Err(Error::Domain(format!(
                "conductivity phase must lie in [0, pi/2], got {phi}"
            )));
        }
        if mu.norm() == 0.0 || !mu.re.is_finite() || !mu.im.is_finite() {
            return Err(Error::Domain(format!("invalid permeability {mu}")));
        }
        if mu.im < 0.0 {
            return Err(Error::Domain(format!(
                "Im(mu) must be non-negative for a passive material, got {}",
                mu.im
            )));
        }
        Ok(Self {
            sigma_mag,
            phi,
            mu_re: mu.re,
            mu_im: mu.im,
        })
    }

    /// Ideal superconductor at angular frequency `omega`, parameterized by
    /// its London penetration depth. The conductivity is wholly imaginary,
    /// `σ = -i / (μ0 ω λ_L²)`, so the skin depth equals `λ_L` at every
    /// frequency and no power is dissipated.
    pub fn ideal_superconductor(lambda_london: f64, omega: f64) -> Result<Self> {
        if !(lambda_london > 0.0) || !(omega > 0.0) {
            return Err(Error::Domain(
                "London depth and frequency must be positive".into(),
            ));
        }
        let mag = 1.0 / (MU_0 * omega * lambda_london * lambda_london);
        Self::new(mag, std::f64::consts::FRAC_PI_2, Complex64::new(MU_0, 0.0))
    }

    pub fn sigma(&self) -> Complex64 {
        Complex64::from_polar(self.sigma_mag, -self.phi)
    }

    pub fn sigma_mag(&self) -> f64 {
        self.sigma_mag
    }

    pub fn sigma_re(&self) -> f64 {
        // exact zero at phi = pi/2 so ideal superconductors dissipate nothing
        if self.phi == std::f64::consts::FRAC_PI_2 {
            0.0
        } else {
            self.sigma_mag * self.phi.cos()
        }
    }

    /// Conductivity phase φ, recoverable without branch ambiguity.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn mu(&self) -> Complex64 {
        Complex64::new(self.mu_re, self.mu_im)
    }

    /// Relative permeability K = μ/μ0.
    pub fn k_rel(&self) -> Complex64 {
        self.mu() / MU_0
    }
}

/// Where the slab sits relative to the field point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlabConfig {
    /// Single slab at distance `d` from the field point.
    OneSlab,
    /// Two identical slabs; the field point is the midpoint, each surface a
    /// distance `d` away (separation `2d`).
    TwoSlabMidpoint,
}

/// Source-to-surface distance, slab thickness, and surface normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlabSystem {
    pub d: f64,
    pub t: f64,
    pub n_hat: Vec3,
    pub config: SlabConfig,
}

impl SlabSystem {
    pub fn new(d: f64, t: f64, n_hat: Vec3, config: SlabConfig) -> Result<Self> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Domain(format!(
                "distance d must be positive, got {d}"
            )));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "thickness t must be positive, got {t}"
            )));
        }
        if !n_hat.is_unit(1e-9) {
            return Err(Error::Domain("slab normal must be a unit vector".into()));
        }
        Ok(Self {
            d,
            t,
            n_hat,
            config,
        })
    }

    pub fn one_slab(d: f64, t: f64) -> Result<Self> {
        Self::new(d, t, Vec3::Z, SlabConfig::OneSlab)
    }

    pub fn two_slab_midpoint(d: f64, t: f64) -> Result<Self> {
        Self::new(d, t, Vec3::Z, SlabConfig::TwoSlabMidpoint)
    }
}

/// Optional spin-locking RF field, expressed in the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RfField {
    pub b1: f64,
    pub b1_hat: Vec3,
}

/// A spin-1/2 in a polarizing field near the slab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinContext {
    /// Gyromagnetic ratio, rad/(s T), positive by convention.
    pub gamma: f64,
    /// Polarizing field magnitude, T.
    pub b0: f64,
    /// Polarization axis (unit).
    pub b_hat: Vec3,
    /// Temperature, K.
    pub temperature: f64,
    pub rf: Option<RfField>,
}

impl SpinContext {
    pub fn new(gamma: f64, b0: f64, b_hat: Vec3, temperature: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::Domain(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if !(b0 >= 0.0) {
            return Err(Error::Domain(format!("B0 must be non-negative, got {b0}")));
        }
        if !(temperature >= 0.0) {
            return Err(Error::Domain(format!(
                "temperature must be non-negative, got {temperature}"
            )));
        }
        if !b_hat.is_unit(1e-9) {
            return Err(Error::Domain(
                "polarization axis must be a unit vector".into(),
            ));
        }
        Ok(Self {
            gamma,
            b0,
            b_hat,
            temperature,
            rf: None,
        })
    }

    pub fn with_rf(mut self, b1: f64, b1_hat: Vec3) -> Result<Self> {
        if !(b1 >= 0.0) || !b1_hat.is_unit(1e-9) {
            return Err(Error::Domain("invalid RF field".into()));
        }
        self.rf = Some(RfField { b1, b1_hat });
        Ok(self)
    }

    /// Precession frequency ω0 = γ B0, rad/s.
    pub fn omega0(&self) -> f64 {
        self.gamma * self.b0
    }

    /// RF precession frequency ω1 = γ B1, rad/s.
    pub fn omega1(&self) -> Option<f64> {
        self.rf.map(|rf| self.gamma * rf.b1)
    }

    /// cos θ between the polarization axis and the slab normal.
    pub fn cos_theta(&self, n_hat: Vec3) -> f64 {
        self.b_hat.dot(n_hat).clamp(-1.0, 1.0)
    }

    /// cos β between the polarization axis and the RF axis.
    pub fn cos_beta(&self) -> Option<f64> {
        self.rf.map(|rf| self.b_hat.dot(rf.b1_hat).clamp(-1.0, 1.0))
    }
}

/// Skin depth λ = |ω μ σ|^{-1/2}. Returns +∞ at ω = 0 (the static field
/// penetrates fully); regime selection downstream consumes that sentinel.
pub fn skin_depth(material: &Material, omega: f64) -> f64 {
    if omega == 0.0 {
        return f64::INFINITY;
    }
    let w = omega.abs() * material.mu().norm() * material.sigma_mag();
    if w == 0.0 {
        f64::INFINITY
    } else {
        1.0 / w.sqrt()
    }
}

/// Thermal occupation kernel ħω coth(ħω / 2k_B T), J.
///
/// Even in ω. Limits are taken analytically: `2 k_B T` at ω = 0 and `ħ|ω|`
/// at T = 0. Below |x| = 1e-6 with x = ħω/2k_BT the two-term series
/// `2k_BT (1 + x²/3)` replaces the direct coth evaluation.
pub fn thermal_occupation_kernel(omega: f64, temperature: f64) -> f64 {
    assert!(temperature >= 0.0, "temperature must be non-negative");
    let w = omega.abs();
    if temperature == 0.0 {
        return HBAR * w;
    }
    let two_kt = 2.0 * K_B * temperature;
    let x = HBAR * w / two_kt;
    if x < 1e-6 {
        two_kt * (1.0 + x * x / 3.0)
    } else {
        HBAR * w / x.tanh()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn copper_skin_depth_at_100_hz() {
        let cu = Material::conductor(5.9e7).unwrap();
        let omega = 2.0 * std::f64::consts::PI * 100.0;
        // hand evaluation of |omega mu0 sigma|^{-1/2}
        let expected = 1.0 / (omega * MU_0 * 5.9e7).sqrt();
        let lambda = skin_depth(&cu, omega);
        assert_relative_eq!(lambda, expected, max_relative = 1e-14);
        assert_relative_eq!(lambda, 4.633e-3, max_relative = 1e-3);
    }

    #[test]
    fn london_constructor_pins_skin_depth() {
        for omega in [1.0, 1e3, 1e9] {
            let sc = Material::ideal_superconductor(100e-9, omega).unwrap();
            assert_relative_eq!(skin_depth(&sc, omega), 100e-9, max_relative = 1e-12);
            assert_relative_eq!(sc.phi(), std::f64::consts::FRAC_PI_2);
            assert!(sc.sigma_re().abs() < sc.sigma_mag() * 1e-15);
        }
    }

    #[test]
    fn doubling_sigma_shrinks_lambda_by_sqrt2() {
        let m1 = Material::conductor(1e7).unwrap();
        let m2 = Material::conductor(2e7).unwrap();
        let omega = 500.0;
        assert_relative_eq!(
            skin_depth(&m2, omega),
            skin_depth(&m1, omega) / 2.0_f64.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn zero_frequency_reports_infinite_skin_depth() {
        let cu = Material::conductor(5.9e7).unwrap();
        assert!(skin_depth(&cu, 0.0).is_infinite());
    }

    #[test]
    fn kernel_static_limit() {
        let v = thermal_occupation_kernel(0.0, 300.0);
        assert_relative_eq!(v, 8.28389e-21, max_relative = 1e-5);
        assert_relative_eq!(v, 2.0 * K_B * 300.0, max_relative = 1e-15);
    }

    #[test]
    fn kernel_zero_temperature_limit() {
        let v = thermal_occupation_kernel(1e10, 0.0);
        assert_relative_eq!(v, HBAR * 1e10, max_relative = 1e-15);
        assert_relative_eq!(v, 1.055e-24, max_relative = 1e-3);
    }

    #[test]
    fn kernel_coth_value() {
        // x = hbar*omega/(2 kB T) = 0.0966 -> kernel/(hbar*omega) = coth(0.0966)
        let t = 300.0;
        let x = 0.0966;
        let omega = x * 2.0 * K_B * t / HBAR;
        let ratio = thermal_occupation_kernel(omega, t) / (HBAR * omega);
        let coth = 1.0 / x.tanh();
        assert_relative_eq!(ratio, coth, max_relative = 1e-12);
        assert_relative_eq!(ratio, 10.38, max_relative = 1e-3);
    }

    #[test]
    fn kernel_even_in_omega() {
        for &omega in &[1e-3, 1.0, 1e7, 1e12] {
            assert_eq!(
                thermal_occupation_kernel(omega, 77.0),
                thermal_occupation_kernel(-omega, 77.0)
            );
        }
    }

    #[test]
    fn kernel_series_matches_coth_at_crossover() {
        let t = 10.0;
        let two_kt = 2.0 * K_B * t;
        let x = 1e-6;
        let omega = x * two_kt / HBAR;
        let series = two_kt * (1.0 + x * x / 3.0);
        let direct = HBAR * omega / x.tanh();
        assert_relative_eq!(series, direct, max_relative = 1e-12);
    }

    #[test]
    fn negative_sigma_rejected_at_construction() {
        assert!(Material::new(-1.0, 0.0, Complex64::new(MU_0, 0.0)).is_err());
        assert!(Material::new(1.0, 2.0, Complex64::new(MU_0, 0.0)).is_err());
        assert!(Material::new(1.0, 0.0, Complex64::new(MU_0, -1e-9)).is_err());
    }

    #[test]
    fn slab_validation() {
        assert!(SlabSystem::one_slab(0.0, 1.0).is_err());
        assert!(SlabSystem::one_slab(1.0, -1.0).is_err());
        assert!(SlabSystem::new(1.0, 1.0, Vec3::new(0.0, 0.0, 2.0), SlabConfig::OneSlab).is_err());
    }
}
