//! Spin relaxation times, equilibrium polarization, Bloch dynamics, and the
//! hyperfine coupling amplification for donor-spin qubits.

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::linalg::{trace_prod, Mat3, Vec3};
use crate::model::{thermal_occupation_kernel, SpinContext};
use crate::spectra::{rotating_frame_density, SpectralDensity};
use serde::Serialize;

/// Longitudinal, transverse, and spin-locked relaxation times with their
/// rates. For any nonzero dissipation all three are positive and
/// `1/T2 ≥ 1/(2 T1)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RelaxationTimes {
    pub t1: f64,
    pub t2: f64,
    pub t1_rho: Option<f64>,
    pub rate1: f64,
    pub rate2: f64,
    pub rate1_rho: Option<f64>,
}

/// Relaxation rates from lab-frame spectra sampled at the three relevant
/// frequencies. This is the covariant trace form; it works for any
/// symmetric spectral matrices, including hyperfine-amplified effective
/// densities that are not of the slab (I + n̂⊗n̂) shape.
///
/// `s_zero`, `s_omega1`, `s_omega0` are the two-sided lab densities at
/// ω = 0, ω1, ω0. `s_omega1` may be `None` when no RF field is present.
pub fn relaxation_from_spectra(
    ctx: &SpinContext,
    s_zero: &SpectralDensity,
    s_omega1: Option<&SpectralDensity>,
    s_omega0: &SpectralDensity,
) -> Result<RelaxationTimes> {
    let b = ctx.b_hat;
    let bb = b.outer(b);
    let perp = Mat3::IDENTITY - bb;
    let g2 = ctx.gamma * ctx.gamma;

    // rotating-frame density with the longitudinal block at omega = 0
    let rot0 = rotating_frame_density(s_zero, s_omega0, b);
    let rate1 = 0.5 * g2 * trace_prod(perp, rot0.matrix);
    let rate2 = 0.5 * rate1 + 0.5 * g2 * trace_prod(bb, rot0.matrix);

    let (rate1_rho, t1_rho) = match (ctx.rf, s_omega1) {
        (Some(rf), Some(s1)) => {
            let b1 = rf.b1_hat;
            let b1b1 = b1.outer(b1);
            let perp1 = Mat3::IDENTITY - b1b1;
            // longitudinal block at omega1 for the doubly rotating frame
            let rot1 = rotating_frame_density(s1, s_omega0, b);
            let r = 0.5 * g2 * trace_prod(perp1, rot1.matrix);
            (Some(r), Some(1.0 / r))
        }
        (None, _) => (None, None),
        (Some(_), None) => {
            return Err(Error::MissingRf);
        }
    };

    Ok(RelaxationTimes {
        t1: 1.0 / rate1,
        t2: 1.0 / rate2,
        t1_rho,
        rate1,
        rate2,
        rate1_rho,
    })
}

/// Relaxation rates for the slab geometry, expressed directly in terms of
/// the scalar damping coefficient at the three frequencies:
///
/// 1/T1  = ½ γ² (3 − cos²θ) Γ(ω0) ħω0 coth(ħω0/2k_BT)
/// 1/T2  = 1/(2T1) + ½ γ² (1 + cos²θ) Γ(0) 2k_BT
/// 1/T1ρ = (1 + cos²β)/(2T1) + ½ γ² sin²β (1 + cos²θ) Γ(ω1) ħω1 coth(…)
///
/// The covariant trace route is evaluated alongside and the two must agree
/// to near machine precision; a mismatch reports a numerical error.
pub fn relaxation_times(
    ctx: &SpinContext,
    n_hat: Vec3,
    gamma_at_zero: f64,
    gamma_at_omega1: Option<f64>,
    gamma_at_omega0: f64,
) -> Result<RelaxationTimes> {
    if ctx.rf.is_some() && gamma_at_omega1.is_none() {
        return Err(Error::MissingRf);
    }
    let temperature = ctx.temperature;
    let omega0 = ctx.omega0();
    let g2 = ctx.gamma * ctx.gamma;
    let cos_t = ctx.cos_theta(n_hat);
    let cos2t = cos_t * cos_t;

    let occ0 = thermal_occupation_kernel(omega0, temperature);
    let rate1 = 0.5 * g2 * (3.0 - cos2t) * gamma_at_omega0 * occ0;
    let rate2 = 0.5 * rate1 + 0.5 * g2 * (1.0 + cos2t) * gamma_at_zero * (2.0 * K_B * temperature);

    let (rate1_rho, t1_rho) = if let Some(rf) = ctx.rf {
        let g_w1 = gamma_at_omega1.expect("checked above");
        let omega1 = ctx.gamma * rf.b1;
        let cos_b = ctx.cos_beta().expect("rf present");
        let sin2b = 1.0 - cos_b * cos_b;
        let occ1 = thermal_occupation_kernel(omega1, temperature);
        let r =
            (1.0 + cos_b * cos_b) * 0.5 * rate1 + 0.5 * g2 * sin2b * (1.0 + cos2t) * g_w1 * occ1;
        (Some(r), Some(1.0 / r))
    } else {
        (None, None)
    };

    let expanded = RelaxationTimes {
        t1: 1.0 / rate1,
        t2: 1.0 / rate2,
        t1_rho,
        rate1,
        rate2,
        rate1_rho,
    };

    // cross-check against the covariant trace algebra
    let tensor = |g: f64| (Mat3::IDENTITY + n_hat.outer(n_hat)) * g;
    let s = |g: f64, w: f64| SpectralDensity {
        matrix: tensor(g) * thermal_occupation_kernel(w, temperature),
        convention: crate::spectra::Convention::TwoSided,
    };
    let s_zero = s(gamma_at_zero, 0.0);
    let s_omega0 = s(gamma_at_omega0, omega0);
    let s_omega1 = ctx
        .rf
        .map(|rf| s(gamma_at_omega1.unwrap(), ctx.gamma * rf.b1));
    let covariant = relaxation_from_spectra(ctx, &s_zero, s_omega1.as_ref(), &s_omega0)?;

    let check =
        |a: f64, b: f64| (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    if !check(covariant.rate1, expanded.rate1)
        || !check(covariant.rate2, expanded.rate2)
        || !check(
            covariant.rate1_rho.unwrap_or(0.0),
            expanded.rate1_rho.unwrap_or(0.0),
        )
    {
        return Err(Error::Domain(format!(
            "covariant and expanded relaxation forms disagree: {covariant:?} vs {expanded:?}"
        )));
    }
    Ok(expanded)
}

/// Thermal equilibrium polarization (ħ/2) tanh(ħγB0/2k_BT) b̂, in units of ħ.
pub fn equilibrium_polarization(ctx: &SpinContext) -> Vec3 {
    let arg = if ctx.temperature == 0.0 {
        f64::INFINITY
    } else {
        HBAR * ctx.gamma * ctx.b0 / (2.0 * K_B * ctx.temperature)
    };
    ctx.b_hat * (0.5 * HBAR * arg.tanh())
}

/// Spin polarization snapshot along a Bloch trajectory.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlochState {
    pub time: f64,
    /// ⟨s⟩ in J·s (ħ units of angular momentum).
    pub spin: Vec3,
}

/// Step-size control for [`bloch_integrate`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Cap on the step size, which also sets the output sampling density.
    pub max_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-30,
            max_step: f64::INFINITY,
        }
    }
}

/// Integrate the rotating-frame Bloch equation
/// `d⟨s⟩/dt = −(1/T1) b̂⊗b̂·(⟨s⟩−⟨s0⟩) − (1/T2)(I−b̂⊗b̂)·⟨s⟩`
/// with an adaptive embedded Dormand–Prince 5(4) pair.
///
/// Returns the accepted states including both endpoints.
pub fn bloch_integrate(
    state0: &BlochState,
    ctx: &SpinContext,
    times: &RelaxationTimes,
    duration: f64,
    control: &StepControl,
) -> Result<Vec<BlochState>> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::Domain(format!(
            "duration must be positive and finite, got {duration}"
        )));
    }
    if !(times.rate1.is_finite() && times.rate2.is_finite()) {
        return Err(Error::Domain("relaxation rates must be finite".into()));
    }
    let b = ctx.b_hat;
    let bb = b.outer(b);
    let perp = Mat3::IDENTITY - bb;
    let s_eq = equilibrium_polarization(ctx);
    let rhs = |s: Vec3| -> Vec3 {
        (bb.apply(s - s_eq)) * (-times.rate1) + (perp.apply(s)) * (-times.rate2)
    };

    // Dormand–Prince 5(4) coefficients
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let t_end = state0.time + duration;
    let mut t = state0.time;
    let mut s = state0.spin;
    let rate = times.rate1.max(times.rate2).max(1.0 / duration);
    let mut dt = (0.1 / rate).min(duration).min(control.max_step);
    let mut out = vec![*state0];
    let scale_ref = s.norm().max(s_eq.norm());

    while t < t_end {
        dt = dt.min(t_end - t).min(control.max_step);
        if dt <= f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, dt });
        }
        let mut k = [Vec3::ZERO; 7];
        k[0] = rhs(s);
        for i in 0..6 {
            let mut y = s;
            for (j, &aij) in A[i].iter().enumerate().take(i + 1) {
                y = y + k[j] * (aij * dt);
            }
            k[i + 1] = rhs(y);
        }
        let mut s5 = s;
        let mut s4 = s;
        for j in 0..7 {
            s5 = s5 + k[j] * (B5[j] * dt);
            s4 = s4 + k[j] * (B4[j] * dt);
        }
        let err_vec = s5 - s4;
        let scale = control.abs_tol + control.rel_tol * s.norm().max(s5.norm()).max(scale_ref);
        let err = err_vec.norm() / scale;
        if err <= 1.0 {
            t += dt;
            s = s5;
            out.push(BlochState { time: t, spin: s });
        }
        let grow = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        dt *= grow;
    }
    Ok(out)
}

/// Electron-nuclear hyperfine system for donor-spin quantum registers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HyperfineSystem {
    /// Electron gyromagnetic ratio, rad/(s T), positive.
    pub gamma_e: f64,
    /// Nuclear gyromagnetic ratio, rad/(s T), positive.
    pub gamma_n: f64,
    /// Hyperfine coupling, rad/s.
    pub a: f64,
    /// Polarizing field, T.
    pub b0: f64,
}

impl HyperfineSystem {
    pub fn new(gamma_e: f64, gamma_n: f64, a: f64, b0: f64) -> Result<Self> {
        if !(gamma_e > 0.0) || !(gamma_n > 0.0) {
            return Err(Error::Domain(
                "both gyromagnetic ratios must be positive in this convention".into(),
            ));
        }
        Ok(Self {
            gamma_e,
            gamma_n,
            a,
            b0,
        })
    }

    /// Transverse coupling enhancement 1 + 2A/(γ_n B0).
    pub fn coupling_factor(&self) -> f64 {
        1.0 + 2.0 * self.a / (self.gamma_n * self.b0)
    }

    /// Splitting of the two computational levels, ω0 = γ_n B0 + 2A, rad/s.
    pub fn omega0(&self) -> f64 {
        self.gamma_n * self.b0 + 2.0 * self.a
    }
}

/// Result of amplifying a lab spectral density by the hyperfine coupling.
#[derive(Debug, Clone, Serialize)]
pub struct EffectiveDensity {
    pub s_eff: SpectralDensity,
    /// K = b̂⊗b̂ + (1 + 2A/(γ_n B0)) (I − b̂⊗b̂).
    pub k_matrix: Mat3,
    /// Transverse noise power amplification (1 + 2A/(γ_n B0))².
    pub amplification: f64,
}

/// Effective spectral density S_eff = K · S_B · K seen by the two lowest
/// levels of the hyperfine system. K acts as the identity along b̂, so the
/// longitudinal noise is untouched while transverse noise power grows by
/// the squared coupling factor.
pub fn kane_effective_density(
    hf: &HyperfineSystem,
    s_lab: &SpectralDensity,
    b_hat: Vec3,
) -> Result<EffectiveDensity> {
    if !(hf.gamma_n * hf.b0 > 0.0) {
        return Err(Error::Domain(
            "hyperfine amplification needs γ_n B0 > 0".into(),
        ));
    }
    let bb = b_hat.outer(b_hat);
    let factor = hf.coupling_factor();
    let k = bb + (Mat3::IDENTITY - bb) * factor;
    let s_eff = SpectralDensity {
        matrix: k * s_lab.matrix * k,
        convention: s_lab.convention,
    };
    Ok(EffectiveDensity {
        s_eff,
        k_matrix: k,
        amplification: factor * factor,
    })
}
