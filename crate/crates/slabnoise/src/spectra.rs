//! Noise spectral densities assembled from the dissipation kernel.
//!
//! The lab-frame density is `S_B(ω) = (I + n̂⊗n̂) Γ(ω) ħω coth(ħω/2k_BT)`,
//! a symmetric positive-semidefinite 3×3 matrix in T²/Hz, two-sided by
//! default. The rotating-frame density splits it into a longitudinal block
//! evaluated at a caller-chosen frequency and a transverse block pinned at
//! the precession frequency ω0.

use crate::gamma::DissipationKernel;
use crate::linalg::{trace_prod, Mat3, Vec3};
use crate::model::thermal_occupation_kernel;
use serde::Serialize;

/// One- vs two-sided bandwidth bookkeeping. Internal results are two-sided;
/// engineering pT/√Hz figures quote one-sided values (twice the two-sided
/// density over positive frequencies only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Convention {
    TwoSided,
    OneSided,
}

/// Matrix-valued magnetic noise density with its convention tag.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectralDensity {
    pub matrix: Mat3,
    pub convention: Convention,
}

impl SpectralDensity {
    /// Scalar density along a unit direction, `û · S_B · û`.
    pub fn along(&self, u_hat: Vec3) -> f64 {
        u_hat.dot(self.matrix.apply(u_hat))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectral density serialization")
    }
}

/// Two-sided lab-frame density `(I + n̂⊗n̂) Γ ħω coth(ħω/2k_BT)`. The ω = 0
/// thermal factor is the analytic limit 2k_BT, and at T = 0 it is ħ|ω|.
pub fn lab_spectral_density(
    kernel: &DissipationKernel,
    n_hat: Vec3,
    omega: f64,
    temperature: f64,
) -> SpectralDensity {
    let occ = thermal_occupation_kernel(omega, temperature);
    SpectralDensity {
        matrix: kernel.tensor(n_hat) * occ,
        convention: Convention::TwoSided,
    }
}

/// Rotating-frame density built from two lab-frame evaluations:
/// the longitudinal block projects `S_B` at `s_longitudinal`'s frequency
/// onto b̂⊗b̂, the transverse block takes ½ tr[(I − b̂⊗b̂)·S_B(ω0)] on the
/// complement. Which longitudinal frequency is appropriate (0 for the T2
/// secular term, ω1 for spin-locking) is the caller's choice, so both
/// spectra are passed explicitly.
pub fn rotating_frame_density(
    s_longitudinal: &SpectralDensity,
    s_at_omega0: &SpectralDensity,
    b_hat: Vec3,
) -> SpectralDensity {
    assert_eq!(s_longitudinal.convention, s_at_omega0.convention);
    let bb = b_hat.outer(b_hat);
    let perp = Mat3::IDENTITY - bb;
    let longitudinal = trace_prod(bb, s_longitudinal.matrix);
    let transverse = 0.5 * trace_prod(perp, s_at_omega0.matrix);
    SpectralDensity {
        matrix: bb * longitudinal + perp * transverse,
        convention: s_longitudinal.convention,
    }
}

/// Convert between one- and two-sided conventions (factor of two). Applying
/// it twice with opposite targets is the identity.
pub fn convention_convert(s: &SpectralDensity, target: Convention) -> SpectralDensity {
    if s.convention == target {
        return *s;
    }
    let factor = match target {
        Convention::OneSided => 2.0,
        Convention::TwoSided => 0.5,
    };
    SpectralDensity {
        matrix: s.matrix * factor,
        convention: target,
    }
}
