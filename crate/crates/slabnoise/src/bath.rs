//! Exact discrete independent-oscillator bath.
//!
//! Every quadrature-based result in this crate has a closed-form twin on a
//! finite oscillator bath: spectra become delta combs, memory kernels become
//! cosine sums, and entanglement and renormalization reduce to rational
//! sums over the oscillators. That makes the bath the brute-force oracle
//! for the continuum machinery, and [`sample_from_gamma`] bridges the two
//! by discretizing a continuous kernel onto a frequency grid.
//!
//! Unit bookkeeping for couplings, in one place: an oscillator coupled to a
//! spin enters the Hamiltonian through (q_j − β_j n̂_j·s)² with q_j² in J·s,
//! so β_j² carries 1/(J·s) — it is "dimensionless" only in ħ = 1 units. For
//! the oscillator-bath formulas (frequency renormalization, ohmic
//! entanglement) β_j is genuinely dimensionless. The stored field is β².

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::quadrature;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Oscillator {
    /// Resonant frequency ω_j, rad/s, strictly positive.
    pub omega: f64,
    /// Squared coupling β_j².
    pub beta_sq: f64,
    /// Coupling direction n̂_j (unit).
    pub n_hat: Vec3,
}

/// Finite list of independent oscillators. Immutable once built.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteBath {
    oscillators: Vec<Oscillator>,
}

impl DiscreteBath {
    pub fn new(oscillators: Vec<Oscillator>) -> Result<Self> {
        for (i, o) in oscillators.iter().enumerate() {
            if !(o.omega > 0.0) || !o.omega.is_finite() {
                return Err(Error::Domain(format!(
                    "oscillator {i}: frequency must be positive and finite, got {}",
                    o.omega
                )));
            }
            if !(o.beta_sq >= 0.0) || !o.beta_sq.is_finite() {
                return Err(Error::Domain(format!(
                    "oscillator {i}: squared coupling must be non-negative, got {}",
                    o.beta_sq
                )));
            }
            if !o.n_hat.is_unit(1e-9) {
                return Err(Error::Domain(format!(
                    "oscillator {i}: direction must be a unit vector"
                )));
            }
        }
        Ok(Self { oscillators })
    }

    pub fn oscillators(&self) -> &[Oscillator] {
        &self.oscillators
    }

    pub fn len(&self) -> usize {
        self.oscillators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oscillators.is_empty()
    }

    /// Concatenate two baths; every sum over oscillators is additive.
    pub fn concat(&self, other: &DiscreteBath) -> DiscreteBath {
        let mut oscillators = self.oscillators.clone();
        oscillators.extend_from_slice(&other.oscillators);
        DiscreteBath { oscillators }
    }

    /// Causal memory kernel G(τ) = Σ ω_j β_j² cos(ω_j τ) n̂_j⊗n̂_j for
    /// τ ≥ 0, identically zero for τ < 0.
    pub fn memory_kernel(&self, tau: f64) -> Mat3 {
        if tau < 0.0 {
            return Mat3::ZERO;
        }
        let mut g = Mat3::ZERO;
        for o in &self.oscillators {
            g = g + o.n_hat.outer(o.n_hat) * (o.omega * o.beta_sq * (o.omega * tau).cos());
        }
        g
    }

    /// Anisotropy tensor C = Σ ω_j β_j² n̂_j⊗n̂_j = G(0⁺).
    pub fn anisotropy(&self) -> Mat3 {
        self.memory_kernel(0.0)
    }

    /// Delta-comb weights of Re G̃(ω): pairs (ω_j, (π/2) ω_j β_j² n̂_j⊗n̂_j).
    pub fn re_g_weights(&self) -> Vec<(f64, Mat3)> {
        self.oscillators
            .iter()
            .map(|o| {
                (
                    o.omega,
                    o.n_hat.outer(o.n_hat) * (0.5 * std::f64::consts::PI * o.omega * o.beta_sq),
                )
            })
            .collect()
    }

    /// Delta-comb weights of the magnetic noise density S_B(ω): pairs
    /// (ω_j, (π ω_j β_j² / 2γ²) n̂_j⊗n̂_j ħω_j coth(ħω_j/2k_BT)).
    pub fn spectral_weights(&self, gamma_spin: f64, temperature: f64) -> Vec<(f64, Mat3)> {
        self.oscillators
            .iter()
            .map(|o| {
                let occ = crate::model::thermal_occupation_kernel(o.omega, temperature);
                let w = 0.5 * std::f64::consts::PI * o.omega * o.beta_sq
                    / (gamma_spin * gamma_spin)
                    * occ;
                (o.omega, o.n_hat.outer(o.n_hat) * w)
            })
            .collect()
    }

    /// Exact first-order spin entanglement
    /// E = Σ ħ ω_j² β_j² / (8 (ω0 + ω_j)²) tr[(I − p̂⊗p̂)·n̂_j⊗n̂_j].
    pub fn exact_spin_entanglement(&self, p_hat: Vec3, omega0: f64) -> f64 {
        self.oscillators
            .iter()
            .map(|o| {
                let proj = 1.0 - p_hat.dot(o.n_hat).powi(2);
                HBAR * o.omega * o.omega * o.beta_sq / (8.0 * (omega0 + o.omega).powi(2)) * proj
            })
            .sum()
    }

    /// Exact oscillator-bath entanglement Σ ω_j² β_j² / (4 (ω0 + ω_j)²).
    pub fn exact_oscillator_entanglement(&self, omega0: f64) -> f64 {
        self.oscillators
            .iter()
            .map(|o| o.omega * o.omega * o.beta_sq / (4.0 * (omega0 + o.omega).powi(2)))
            .sum()
    }

    /// Bare-to-dressed frequency ratio squared, 1 + Σ ω_j β_j² / ω0.
    pub fn frequency_ratio_squared(&self, omega0: f64) -> f64 {
        1.0 + self
            .oscillators
            .iter()
            .map(|o| o.omega * o.beta_sq)
            .sum::<f64>()
            / omega0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bath serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DiscreteBath = serde_json::from_str(text)
            .map_err(|e| Error::Domain(format!("bath JSON parse: {e}")))?;
        DiscreteBath::new(raw.oscillators)
    }
}

/// Discretize a continuous scalar kernel Γ(ω) ≥ 0 with the slab tensor
/// structure (I + n̂⊗n̂)Γ onto bins given by `grid` edges.
///
/// Each bin contributes oscillators at the bin's Γ-weighted centroid
/// frequency, with squared couplings chosen so the bath's Re G̃
/// bin-integrates to γ²(I + n̂⊗n̂)Γ: a transverse pair at β²_base =
/// 2γ²∫Γ/(πω_j) and a normal oscillator at twice that. Bins where Γ
/// vanishes identically are skipped, so Γ ≡ 0 yields an empty bath.
pub fn sample_from_gamma(
    gamma: &dyn Fn(f64) -> f64,
    grid: &[f64],
    gamma_spin: f64,
    n_hat: Vec3,
) -> Result<DiscreteBath> {
    if grid.len() < 2 {
        return Err(Error::Domain("need at least two grid edges".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid[0] < 0.0 {
        return Err(Error::Domain(
            "grid edges must be non-negative and strictly increasing".into(),
        ));
    }
    // orthonormal frame with w_hat = n_hat
    let helper = if n_hat.dot(Vec3::X).abs() < 0.9 {
        Vec3::X
    } else {
        Vec3::Y
    };
    let u_hat = {
        let u = helper - n_hat * helper.dot(n_hat);
        u.normalized()
    };
    let v_hat = n_hat.cross(u_hat);

    let mut oscillators = Vec::new();
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mass = quadrature::integrate(&gamma, a, b, 1e-10, 0.0, 400)?.value;
        if mass < 0.0 {
            return Err(Error::NegativeInput(format!(
                "Γ integrates negative over [{a}, {b}]"
            )));
        }
        if mass == 0.0 {
            continue;
        }
        let g1 = |x: f64| x * gamma(x);
        let first_moment = quadrature::integrate(&g1, a, b, 1e-10, 0.0, 400)?.value;
        let omega_j = first_moment / mass;
        let beta_base = 2.0 * gamma_spin * gamma_spin * mass / (std::f64::consts::PI * omega_j);
        oscillators.push(Oscillator {
            omega: omega_j,
            beta_sq: beta_base,
            n_hat: u_hat,
        });
        oscillators.push(Oscillator {
            omega: omega_j,
            beta_sq: beta_base,
            n_hat: v_hat,
        });
        oscillators.push(Oscillator {
            omega: omega_j,
            beta_sq: 2.0 * beta_base,
            n_hat,
        });
    }
    DiscreteBath::new(oscillators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::thermal_occupation_kernel;
    use approx::assert_relative_eq;

    fn single(omega: f64, beta_sq: f64, n_hat: Vec3) -> DiscreteBath {
        DiscreteBath::new(vec![Oscillator {
            omega,
            beta_sq,
            n_hat,
        }])
        .unwrap()
    }

    #[test]
    fn memory_kernel_at_zero_is_anisotropy() {
        let bath = DiscreteBath::new(vec![
            Oscillator {
                omega: 3.0,
                beta_sq: 0.5,
                n_hat: Vec3::X,
            },
            Oscillator {
                omega: 7.0,
                beta_sq: 0.1,
                n_hat: Vec3::Z,
            },
        ])
        .unwrap();
        let c = bath.memory_kernel(0.0);
        assert_relative_eq!(c.m[0][0], 1.5, max_relative = 1e-15);
        assert_relative_eq!(c.m[2][2], 0.7, max_relative = 1e-15);
        assert_eq!(c, bath.anisotropy());
    }

    #[test]
    fn memory_kernel_half_period_flips_sign() {
        let bath = single(2.0, 1.3, Vec3::X);
        let g = bath.memory_kernel(std::f64::consts::PI / 2.0);
        assert_relative_eq!(g.m[0][0], -2.0 * 1.3, max_relative = 1e-14);
    }

    #[test]
    fn memory_kernel_causal() {
        let bath = single(2.0, 1.3, Vec3::X);
        assert_eq!(bath.memory_kernel(-1e-12), Mat3::ZERO);
        assert_eq!(bath.memory_kernel(-5.0), Mat3::ZERO);
    }

    #[test]
    fn spectral_weights_thermal_factors() {
        let omega = 4e9;
        let bath = single(omega, 2.0, Vec3::Z);
        // T -> 0: weight carries hbar*omega exactly
        let w0 = bath.spectral_weights(1e8, 0.0);
        let expected = 0.5 * std::f64::consts::PI * omega * 2.0 / 1e16 * (HBAR * omega);
        assert_relative_eq!(w0[0].1.m[2][2], expected, max_relative = 1e-14);

        // two identical oscillators add linearly
        let double = bath.concat(&bath);
        let wd = double.spectral_weights(1e8, 0.0);
        assert_eq!(wd.len(), 2);
        assert_relative_eq!(
            wd[0].1.m[2][2] + wd[1].1.m[2][2],
            2.0 * expected,
            max_relative = 1e-14
        );

        // FDT identity: weight / occupation = γ^{-2} (π/2) ω β² n̂⊗n̂
        let temp = 0.3;
        let wt = bath.spectral_weights(1e8, temp);
        let re_g = bath.re_g_weights();
        let occ = thermal_occupation_kernel(omega, temp);
        assert_relative_eq!(
            wt[0].1.m[2][2] / occ,
            re_g[0].1.m[2][2] / 1e16,
            max_relative = 1e-14
        );
    }

    #[test]
    fn entanglement_sums() {
        let empty = DiscreteBath::new(vec![]).unwrap();
        assert_eq!(empty.exact_spin_entanglement(Vec3::Z, 1.0), 0.0);
        assert_eq!(empty.exact_oscillator_entanglement(1.0), 0.0);

        // parallel direction is projected out
        let par = single(5.0, 0.8, Vec3::Z);
        assert_eq!(par.exact_spin_entanglement(Vec3::Z, 1.0), 0.0);

        // perpendicular, omega1 = omega0, beta² = 0.01, hbar = 1 units:
        // E = ω0²·0.01/(8·(2ω0)²) = 0.01/32 = 3.125e-4
        let omega0 = 2.0;
        let perp = single(omega0, 0.01 / HBAR, Vec3::X);
        assert_relative_eq!(
            perp.exact_spin_entanglement(Vec3::Z, omega0),
            3.125e-4,
            max_relative = 1e-12
        );
    }

    #[test]
    fn sums_linear_under_concat() {
        let a = single(3.0, 0.2, Vec3::X);
        let b = single(11.0, 0.4, Vec3::Y);
        let ab = a.concat(&b);
        let p = Vec3::Z;
        assert_relative_eq!(
            ab.exact_spin_entanglement(p, 1.5),
            a.exact_spin_entanglement(p, 1.5) + b.exact_spin_entanglement(p, 1.5),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            ab.frequency_ratio_squared(2.0) - 1.0,
            (a.frequency_ratio_squared(2.0) - 1.0) + (b.frequency_ratio_squared(2.0) - 1.0),
            max_relative = 1e-15
        );
    }

    #[test]
    fn flat_gamma_single_bin_inversion() {
        // flat Γ on one bin -> oscillator triplet at the midpoint with
        // β²_base = 2 γ² Γ Δω/(π ω_j)
        let gamma0 = 2.5e-7;
        let g = move |_: f64| gamma0;
        let gamma_spin = 3e7;
        let bath = sample_from_gamma(&g, &[1e5, 3e5], gamma_spin, Vec3::Z).unwrap();
        assert_eq!(bath.len(), 3);
        let omega_j = 2e5;
        let expected =
            2.0 * gamma_spin * gamma_spin * gamma0 * 2e5 / (std::f64::consts::PI * omega_j);
        let base: Vec<&Oscillator> = bath
            .oscillators()
            .iter()
            .filter(|o| o.n_hat.dot(Vec3::Z).abs() < 1e-12)
            .collect();
        assert_eq!(base.len(), 2);
        for o in base {
            assert_relative_eq!(o.omega, omega_j, max_relative = 1e-12);
            assert_relative_eq!(o.beta_sq, expected, max_relative = 1e-10);
        }
        let normal: Vec<&Oscillator> = bath
            .oscillators()
            .iter()
            .filter(|o| o.n_hat.dot(Vec3::Z).abs() > 0.5)
            .collect();
        assert_relative_eq!(normal[0].beta_sq, 2.0 * expected, max_relative = 1e-10);

        // round trip: the bath's Re G̃ bin integral equals γ²(I+nn)Γ·Δω
        let re_g = bath.re_g_weights();
        let total_zz: f64 = re_g.iter().map(|(_, m)| m.m[2][2]).sum();
        assert_relative_eq!(
            total_zz,
            gamma_spin * gamma_spin * 2.0 * gamma0 * 2e5,
            max_relative = 1e-10
        );
    }

    #[test]
    fn zero_gamma_gives_empty_bath() {
        let g = |_: f64| 0.0;
        let bath = sample_from_gamma(&g, &[1.0, 2.0, 4.0], 1e8, Vec3::Z).unwrap();
        assert!(bath.is_empty());
    }

    #[test]
    fn negative_gamma_rejected() {
        let g = |_: f64| -1.0;
        assert!(sample_from_gamma(&g, &[1.0, 2.0], 1e8, Vec3::Z).is_err());
    }

    #[test]
    fn anisotropy_from_sampled_bath_matches_integral_route() {
        // C from G(0⁺) equals (2γ²/π)(I+nn)∫Γ on the discretized kernel
        let gamma0 = 1e-6;
        let g = move |w: f64| gamma0 / (1.0 + w * w);
        let gamma_spin = 1e4;
        let edges: Vec<f64> = (0..201).map(|i| 0.05 * i as f64).collect();
        let bath = sample_from_gamma(&g, &edges, gamma_spin, Vec3::Z).unwrap();
        let c = bath.anisotropy();
        // each bin: Σ ω β² over the triplet reproduces (2γ²/π)∫Γ per channel
        let integral: f64 = edges
            .windows(2)
            .map(|w| {
                crate::quadrature::integrate(&g, w[0], w[1], 1e-12, 0.0, 400)
                    .unwrap()
                    .value
            })
            .sum();
        let expected = 2.0 * gamma_spin * gamma_spin / std::f64::consts::PI * integral;
        assert_relative_eq!(c.m[0][0], expected, max_relative = 1e-10);
        assert_relative_eq!(c.m[2][2], 2.0 * expected, max_relative = 1e-10);
    }

    #[test]
    fn refinement_improves_entanglement_error() {
        // flat Γ with a hard cutoff: bath sums converge to the continuum
        // transform as the grid refines; errors must shrink by at least
        // half per doubling (centroid placement is second order on the
        // smooth part).
        let gamma0 = 1e-9;
        let omega_c = 1e6;
        let omega0 = 1.3e4;
        let gamma_spin = 1e7;
        let g = move |w: f64| if w <= omega_c { gamma0 } else { 0.0 };
        let exact = {
            // closed form of (γ²ħ/4π)·2·∫ ω Γ/(ω+ω0)² over (0, ωc)
            let c = gamma_spin * gamma_spin * HBAR / (4.0 * std::f64::consts::PI) * 2.0 * gamma0;
            c * (((omega0 + omega_c) / omega0).ln() - omega_c / (omega0 + omega_c))
        };
        let mut errs = Vec::new();
        for bins in [128usize, 256, 512] {
            let edges: Vec<f64> = (0..=bins)
                .map(|i| omega_c * i as f64 / bins as f64)
                .collect();
            let bath = sample_from_gamma(&g, &edges, gamma_spin, Vec3::Z).unwrap();
            let e = bath.exact_spin_entanglement(Vec3::Z, omega0);
            errs.push((e - exact).abs() / exact);
        }
        assert!(errs[1] <= 0.6 * errs[0], "{errs:?}");
        assert!(errs[2] <= 0.6 * errs[1], "{errs:?}");
    }

    #[test]
    fn json_round_trip_and_validation() {
        let bath = DiscreteBath::new(vec![Oscillator {
            omega: 2.5,
            beta_sq: 0.1,
            n_hat: Vec3::Y,
        }])
        .unwrap();
        let text = bath.to_json();
        let back = DiscreteBath::from_json(&text).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back.oscillators()[0].omega, 2.5);

        let bad =
            r#"{"oscillators":[{"omega":-1.0,"beta_sq":0.1,"n_hat":{"x":0.0,"y":1.0,"z":0.0}}]}"#;
        assert!(DiscreteBath::from_json(bad).is_err());
    }
}
