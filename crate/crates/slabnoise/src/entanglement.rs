//! Zero-temperature entanglement with a thermal reservoir, computed from
//! the dissipative kernel via Stieltjes transforms, together with the
//! renormalization integrals and a Kramers-Kronig evaluator.
//!
//! The central object is `𝔊_ρ{f; y} = ∫₀^∞ f(x)(x+y)^{-ρ} dx`. The ground
//! state of a weakly coupled spin-plus-reservoir system leaves its
//! uncoupled subspace with probability
//! `E = (γ²ħ/4π) 𝔊₂{ω tr[(I−p̂⊗p̂)·𝚪(ω)]; ω0}`, and an analogous order-2
//! transform gives the oscillator result. Discrete (delta-comb) kernels
//! bypass quadrature and use the exact sums from [`crate::bath`].

use crate::bath::DiscreteBath;
use crate::constants::HBAR;
use crate::error::{Error, Result, Warning};
use crate::linalg::{Mat3, Vec3};
use crate::quadrature;
use serde::Serialize;

/// How a spectral-kernel integrand behaves at large frequency. Convergence
/// of every improper integral is decided from this metadata before any
/// quadrature runs.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum TailBound {
    /// `|f(x)| ≲ |f(X)| (x/X)^{-p}` beyond any probed `X`.
    PowerLaw { exponent: f64 },
    /// `f` vanishes identically above the cutoff.
    HardCutoff { omega_c: f64 },
}

/// Integrand for a Stieltjes transform of order `rho` with shift `y`.
/// `breakpoints` mark known sharp features (band edges, narrow lines) so
/// the panel decomposition never steps over them.
pub struct StieltjesSpec<'a> {
    pub f: &'a dyn Fn(f64) -> f64,
    pub order: f64,
    pub shift: f64,
    pub tail: TailBound,
    pub rel_tol: f64,
    pub breakpoints: &'a [f64],
}

impl<'a> StieltjesSpec<'a> {
    pub fn order2(f: &'a dyn Fn(f64) -> f64, shift: f64, tail: TailBound) -> Self {
        Self {
            f,
            order: 2.0,
            shift,
            tail,
            rel_tol: 1e-8,
            breakpoints: &[],
        }
    }
}

/// Evaluate `𝔊_ρ{f; y}` by panel quadrature: log-spaced panels split at the
/// shift `y`, geometric doubling beyond it, and a power-law tail bound (or
/// hard cutoff) deciding where to stop.
pub fn stieltjes_transform(spec: &StieltjesSpec<'_>) -> Result<f64> {
    let y = spec.shift;
    let rho = spec.order;
    if !(y > 0.0) || rho < 1.0 {
        return Err(Error::Domain(format!(
            "Stieltjes transform needs shift > 0 and order >= 1, got y={y}, rho={rho}"
        )));
    }
    if let TailBound::PowerLaw { exponent } = spec.tail {
        if exponent + rho <= 1.0 + 1e-12 {
            return Err(Error::DivergentTail(format!(
                "f/x^{} against (x+y)^-{rho} is not integrable at infinity",
                -exponent
            )));
        }
    }
    let g = |x: f64| (spec.f)(x) * (x + y).powf(-rho);

    let cutoff = match spec.tail {
        TailBound::HardCutoff { omega_c } => {
            if !(omega_c > 0.0) {
                return Err(Error::Domain("cutoff must be positive".into()));
            }
            Some(omega_c)
        }
        TailBound::PowerLaw { .. } => None,
    };

    // panels below the shift (resolving structure near zero), plus any
    // caller-declared sharp features
    let mut edges = vec![0.0, y / 16.0, y / 4.0, y];
    edges.extend(
        spec.breakpoints
            .iter()
            .copied()
            .filter(|b| b.is_finite() && *b > 0.0),
    );
    if let Some(wc) = cutoff {
        edges.retain(|&e| e < wc);
        edges.push(wc);
    }
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a - *b).abs() <= f64::EPSILON * a.abs());

    let mut acc = 0.0;
    for w in edges.windows(2) {
        acc += quadrature::integrate(&g, w[0], w[1], spec.rel_tol, 0.0, 400)?.value;
    }
    if cutoff.is_some() {
        return Ok(acc);
    }

    // geometric panels beyond the last edge until the power-law bound dies
    let exponent = match spec.tail {
        TailBound::PowerLaw { exponent } => exponent,
        TailBound::HardCutoff { .. } => unreachable!(),
    };
    let mut lo = *edges.last().unwrap();
    let mut hi = 2.0 * lo;
    for _ in 0..200 {
        let r = quadrature::integrate(&g, lo, hi, spec.rel_tol, 0.0, 400)?;
        acc += r.value;
        // remaining tail <= |f(hi)| hi^p ∫_hi x^{-p}(x+y)^{-rho} dx
        //               <= |f(hi)| hi^{1-rho} / (p + rho - 1)
        let tail_bound = (spec.f)(hi).abs() * hi.powf(1.0 - rho) / (exponent + rho - 1.0);
        if tail_bound <= spec.rel_tol * acc.abs().max(f64::MIN_POSITIVE)
            && r.value.abs() <= spec.rel_tol * acc.abs()
        {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EntanglementMethod {
    ExactQuadrature,
    Approximate,
    DiscreteSum,
}

/// Ground-state entanglement probability with its evaluation route.
#[derive(Debug, Clone, Serialize)]
pub struct EntanglementResult {
    pub e: f64,
    pub method: EntanglementMethod,
    pub warnings: Vec<Warning>,
}

impl EntanglementResult {
    fn checked(e: f64, method: EntanglementMethod) -> Self {
        let mut warnings = Vec::new();
        if e > 0.1 {
            warnings.push(Warning::PerturbativeValidity);
        }
        Self {
            e,
            method,
            warnings,
        }
    }
}

/// Dissipation input for the entanglement and renormalization routes:
/// either a continuous scalar Γ(ω) with the slab tensor structure
/// (I + n̂⊗n̂)Γ, or a discrete oscillator bath taken as exact.
pub enum DissipationSpectrum<'a> {
    Continuous {
        gamma: &'a dyn Fn(f64) -> f64,
        n_hat: Vec3,
        tail: TailBound,
        /// Sharp spectral features the quadrature panels must not skip.
        breakpoints: &'a [f64],
    },
    Discrete(&'a DiscreteBath),
}

/// Spin-reservoir entanglement
/// `E = (γ²ħ/4π) 𝔊₂{ω tr[(I−p̂⊗p̂)·(I+n̂⊗n̂)] Γ(ω); ω0}`.
///
/// Discrete baths take the exact-sum fast path. A warning is attached when
/// E exceeds 0.1, where the first-order perturbative estimate loses
/// validity.
pub fn spin_entanglement(
    p_hat: Vec3,
    omega0: f64,
    gamma_spin: f64,
    spectrum: &DissipationSpectrum<'_>,
) -> Result<EntanglementResult> {
    if !(omega0 > 0.0) {
        return Err(Error::Domain(format!(
            "precession frequency must be positive, got {omega0}"
        )));
    }
    if !p_hat.is_unit(1e-9) {
        return Err(Error::Domain(
            "polarization axis must be a unit vector".into(),
        ));
    }
    match spectrum {
        DissipationSpectrum::Discrete(bath) => Ok(EntanglementResult::checked(
            bath.exact_spin_entanglement(p_hat, omega0),
            EntanglementMethod::DiscreteSum,
        )),
        DissipationSpectrum::Continuous {
            gamma,
            n_hat,
            tail,
            breakpoints,
        } => {
            let cos_t = p_hat.dot(*n_hat);
            let angular = 3.0 - cos_t * cos_t;
            let f = |w: f64| w * angular * gamma(w);
            // Γ ~ ω^{-3/2} thermally; the extra ω makes f one power slower
            let tail = match *tail {
                TailBound::PowerLaw { exponent } => TailBound::PowerLaw {
                    exponent: exponent - 1.0,
                },
                hard => hard,
            };
            let mut spec = StieltjesSpec::order2(&f, omega0, tail);
            spec.breakpoints = breakpoints;
            let g2 = stieltjes_transform(&spec)?;
            let e = gamma_spin * gamma_spin * HBAR / (4.0 * std::f64::consts::PI) * g2;
            Ok(EntanglementResult::checked(
                e,
                EntanglementMethod::ExactQuadrature,
            ))
        }
    }
}

/// Logarithmic approximation `E ≈ ln(ω_c/ω0) / (2π ω0 T1)` with T1
/// evaluated at zero temperature. Warns when ω_c/ω0 < 10.
pub fn approximate_entanglement(
    t1_zero_temperature: f64,
    omega0: f64,
    omega_c: f64,
) -> Result<EntanglementResult> {
    if !(omega0 > 0.0) || !(omega_c > 0.0) || !(t1_zero_temperature > 0.0) {
        return Err(Error::Domain(
            "approximate entanglement needs positive omega0, omega_c, T1".into(),
        ));
    }
    let e = (omega_c / omega0).ln() / (2.0 * std::f64::consts::PI * omega0 * t1_zero_temperature);
    let mut result = EntanglementResult::checked(e, EntanglementMethod::Approximate);
    if omega_c / omega0 < 10.0 {
        result.warnings.push(Warning::CutoffRatioLow);
    }
    Ok(result)
}

/// Oscillator-reservoir entanglement `E = (1/2π) 𝔊₂{ω Re μ̃(ω); ω0}` from
/// the dimensionless dissipative kernel Re μ̃.
pub fn oscillator_entanglement(
    mu_re: &dyn Fn(f64) -> f64,
    tail: TailBound,
    omega0: f64,
) -> Result<EntanglementResult> {
    let f = |w: f64| w * mu_re(w);
    let tail = match tail {
        TailBound::PowerLaw { exponent } => TailBound::PowerLaw {
            exponent: exponent - 1.0,
        },
        hard => hard,
    };
    let spec = StieltjesSpec::order2(&f, omega0, tail);
    let g2 = stieltjes_transform(&spec)?;
    Ok(EntanglementResult::checked(
        g2 / (2.0 * std::f64::consts::PI),
        EntanglementMethod::ExactQuadrature,
    ))
}

/// Ohmic closed form `E ≈ ln(ω_c/ω0)/(2πQ)` for a flat kernel
/// Re μ̃ = 1/Q below the cutoff.
pub fn ohmic_approx(q: f64, omega_c: f64, omega0: f64) -> Result<EntanglementResult> {
    if !(q > 0.0) || !(omega_c > 0.0) || !(omega0 > 0.0) {
        return Err(Error::Domain(
            "ohmic estimate needs positive Q, omega_c, omega0".into(),
        ));
    }
    let e = (omega_c / omega0).ln() / (2.0 * std::f64::consts::PI * q);
    let mut result = EntanglementResult::checked(e, EntanglementMethod::Approximate);
    if omega_c / omega0 < 10.0 {
        result.warnings.push(Warning::CutoffRatioLow);
    }
    Ok(result)
}

/// Kernel input for the renormalization integrals.
pub enum RenormalizationKernel<'a> {
    /// Scalar Re μ̃(ω) (dimensionless) for the oscillator frequency shift.
    Continuous {
        re_mu: &'a dyn Fn(f64) -> f64,
        tail: TailBound,
        /// Frequency scale of the kernel's support, used to size panels.
        scale: f64,
    },
    Discrete(&'a DiscreteBath),
}

fn improper_integral(
    f: &dyn Fn(f64) -> f64,
    tail: TailBound,
    scale: f64,
    rel_tol: f64,
) -> Result<f64> {
    match tail {
        TailBound::HardCutoff { omega_c } => {
            let mut acc = 0.0;
            for w in [0.0, omega_c / 16.0, omega_c / 4.0, omega_c].windows(2) {
                acc += quadrature::integrate(&f, w[0], w[1], rel_tol, 0.0, 400)?.value;
            }
            Ok(acc)
        }
        TailBound::PowerLaw { exponent } => {
            if exponent <= 1.0 + 1e-12 {
                return Err(Error::DivergentTail(format!(
                    "kernel decaying like x^-{exponent} has no finite integral"
                )));
            }
            let mut acc = 0.0;
            let mut lo = 0.0;
            let mut hi = scale;
            for _ in 0..200 {
                acc += quadrature::integrate(&f, lo, hi, rel_tol, 0.0, 400)?.value;
                let bound = f(hi).abs() * hi / (exponent - 1.0);
                if bound <= rel_tol * acc.abs().max(f64::MIN_POSITIVE) {
                    break;
                }
                lo = hi;
                hi *= 2.0;
            }
            Ok(acc)
        }
    }
}

/// Squared ratio of the bare to the dressed oscillator frequency,
/// `(ω0'/ω0)² = 1 + (2/(π ω0)) ∫₀^∞ Re μ̃(ω) dω`. Temperature never enters:
/// renormalization is fixed by the kernel alone.
pub fn frequency_ratio_squared(kernel: &RenormalizationKernel<'_>, omega0: f64) -> Result<f64> {
    if !(omega0 > 0.0) {
        return Err(Error::Domain("omega0 must be positive".into()));
    }
    match kernel {
        RenormalizationKernel::Discrete(bath) => Ok(bath.frequency_ratio_squared(omega0)),
        RenormalizationKernel::Continuous { re_mu, tail, scale } => {
            let integral = improper_integral(*re_mu, *tail, *scale, 1e-9)?;
            Ok(1.0 + 2.0 / (std::f64::consts::PI * omega0) * integral)
        }
    }
}

/// Reservoir-induced anisotropy tensor `C = (2/π) ∫₀^∞ Re G̃(ω) dω`
/// (dynamically inert for spin-1/2, but it fixes the renormalization of
/// higher spins). For a slab kernel Re G̃ = γ² (I + n̂⊗n̂) Γ(ω).
pub fn anisotropy_tensor(spectrum: &DissipationSpectrum<'_>, gamma_spin: f64) -> Result<Mat3> {
    match spectrum {
        DissipationSpectrum::Discrete(bath) => Ok(bath.anisotropy()),
        DissipationSpectrum::Continuous {
            gamma,
            n_hat,
            tail,
            breakpoints: _,
        } => {
            let scale = match *tail {
                TailBound::HardCutoff { omega_c } => omega_c,
                TailBound::PowerLaw { .. } => 1.0,
            };
            let integral = improper_integral(*gamma, *tail, scale, 1e-9)?;
            let c = 2.0 * gamma_spin * gamma_spin / std::f64::consts::PI * integral;
            Ok((Mat3::IDENTITY + n_hat.outer(*n_hat)) * c)
        }
    }
}

/// Principal-value Kramers-Kronig reconstruction of Im G̃ from samples of
/// Re G̃ on a grid spanning its support:
/// `Im G̃(ω) = (1/π) P∫ Re G̃(ω')/(ω' − ω) dω'`.
///
/// The pole is removed by subtracting Re G̃(ω); the subtracted integrand is
/// smooth and integrated by the trapezoid rule, and the subtracted constant
/// contributes the exact log term. Errors out when the grid does not
/// resolve the neighborhood of ω.
pub fn kramers_kronig(grid: &[f64], re_g: &[f64], omega: f64) -> Result<f64> {
    if grid.len() != re_g.len() || grid.len() < 9 {
        return Err(Error::Domain(
            "Kramers-Kronig needs matching arrays with at least 9 samples".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    let n = grid.len();
    let (w_lo, w_hi) = (grid[0], grid[n - 1]);
    // locate omega; need at least 4 points on each side
    let idx = match grid.iter().position(|&g| g >= omega) {
        Some(i) => i,
        None => return Err(Error::GridTooCoarse { omega }),
    };
    if idx < 4 || idx > n - 5 {
        return Err(Error::GridTooCoarse { omega });
    }

    // local quadratic fit for Re G̃(ω) and its derivative at the pole
    let j = idx.clamp(1, n - 2);
    let (x0, x1, x2) = (grid[j - 1], grid[j], grid[j + 1]);
    let (y0, y1, y2) = (re_g[j - 1], re_g[j], re_g[j + 1]);
    let lagrange = |x: f64| {
        y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2))
            + y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
            + y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1))
    };
    let g_at = lagrange(omega);
    let d_at = {
        let h = 1e-3 * (x2 - x0);
        (lagrange(omega + h) - lagrange(omega - h)) / (2.0 * h)
    };
    // resolution check: the quadratic and a wider-stencil fit must agree
    let (xa, xb) = (grid[j - 3], grid[(j + 3).min(n - 1)]);
    let wide_slope = (re_g[(j + 3).min(n - 1)] - re_g[j - 3]) / (xb - xa);
    let slope_scale = d_at.abs().max(wide_slope.abs());
    if slope_scale > 0.0 {
        let mismatch = (d_at - wide_slope).abs() / slope_scale;
        let curvature_visible = (y2 - 2.0 * y1 + y0).abs() > 1e-3 * y1.abs().max(1e-300);
        if mismatch > 0.75 && curvature_visible {
            return Err(Error::GridTooCoarse { omega });
        }
    }

    let h_val = |i: usize| {
        let dx = grid[i] - omega;
        if dx.abs() < 1e-12 * (w_hi - w_lo) {
            d_at
        } else {
            (re_g[i] - g_at) / dx
        }
    };
    let mut integral = 0.0;
    for i in 0..n - 1 {
        integral += 0.5 * (h_val(i) + h_val(i + 1)) * (grid[i + 1] - grid[i]);
    }
    // P∫ dω'/(ω'-ω) over [w_lo, w_hi]
    integral += g_at * ((w_hi - omega).abs() / (omega - w_lo).abs()).ln();
    Ok(integral / std::f64::consts::PI)
}
