//! Command-line surface: every computation in the library exposed as a
//! subcommand with deterministic CSV/JSON output.

use crate::config::ConfigError;
use crate::scenarios::{self, ScenarioError, ScenarioReport};
use crate::units::{Dimension, ParseQuantityError, Quantity};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use slabnoise::constants::MU_0;
use slabnoise::entanglement::ohmic_approx;
use slabnoise::fields::reconstruct_fields;
use slabnoise::gamma::{
    gamma_asymptotic, gamma_interpolated, gamma_quadrature, gamma_static, log_space,
    AsymptoticRegime, QuadratureConfig, SurveyGrid,
};
use slabnoise::model::{skin_depth, Material, SlabSystem, SpinContext};
use slabnoise::relaxation::{
    bloch_integrate, equilibrium_polarization, relaxation_times, BlochState, StepControl,
};
use slabnoise::spectra::{convention_convert, lab_spectral_density, Convention};
use slabnoise::{Error as PhysError, Vec3};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<ParseQuantityError> for CliError {
    fn from(e: ParseQuantityError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<PhysError> for CliError {
    fn from(e: PhysError) -> Self {
        match e {
            PhysError::Domain(_) | PhysError::MissingRf | PhysError::NegativeInput(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Config(c) => CliError::Usage(c.to_string()),
            ScenarioError::Parameter(k, m) => CliError::Usage(format!("parameter {k}: {m}")),
            ScenarioError::Physics(p) => p.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    OneSided,
    TwoSided,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::OneSided => Convention::OneSided,
            ConventionArg::TwoSided => Convention::TwoSided,
        }
    }
}

/// Thermal magnetic noise near conductive slabs: dissipation kernels,
/// spin relaxation, and reservoir entanglement.
#[derive(Debug, Parser)]
#[command(name = "slabnoise", version, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct SlabArgs {
    /// Source-to-surface distance (length quantity, e.g. 1cm, 50nm).
    #[arg(long)]
    pub d: Quantity,
    /// Slab thickness.
    #[arg(long)]
    pub t: Quantity,
    /// Conductivity magnitude |σ|, (Ω·m)⁻¹.
    #[arg(long)]
    pub sigma: Quantity,
    /// Conductivity phase φ in radians (σ = |σ|e^{-iφ}; π/2 = ideal superconductor).
    #[arg(long, default_value = "0")]
    pub phi: Quantity,
    /// Re(μ/μ0).
    #[arg(long, default_value = "1")]
    pub k_re: Quantity,
    /// Im(μ/μ0) ≥ 0 (magnetically lossy).
    #[arg(long, default_value = "0")]
    pub k_im: Quantity,
    /// Field point at the midpoint between two identical slabs.
    #[arg(long)]
    pub two_slab: bool,
}

impl SlabArgs {
    pub fn build(&self) -> Result<(SlabSystem, Material), CliError> {
        let d = self.d.expect(Dimension::Length, "--d")?;
        let t = self.t.expect(Dimension::Length, "--t")?;
        let slab = if self.two_slab {
            SlabSystem::two_slab_midpoint(d, t)?
        } else {
            SlabSystem::one_slab(d, t)?
        };
        let material = Material::new(
            self.sigma.expect(Dimension::Dimensionless, "--sigma")?,
            self.phi.expect(Dimension::Dimensionless, "--phi")?,
            Complex64::new(
                self.k_re.expect(Dimension::Dimensionless, "--k-re")? * MU_0,
                self.k_im.expect(Dimension::Dimensionless, "--k-im")? * MU_0,
            ),
        )?;
        Ok((slab, material))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GammaMethodArg {
    Quadrature,
    Interpolated,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Auto,
    QuasiStatic,
    ThinSkin,
    ThinSlab,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Magnetic dissipation coefficient Γ(ω).
    Gamma {
        #[command(flatten)]
        slab: SlabArgs,
        /// Frequency (Hz quantity; bare values are rad/s). 0 gives the static limit.
        #[arg(long)]
        f: Quantity,
        #[arg(long, value_enum, default_value_t = GammaMethodArg::Quadrature)]
        method: GammaMethodArg,
        #[arg(long, value_enum, default_value_t = RegimeArg::Auto)]
        regime: RegimeArg,
    },
    /// Noise spectral density S_B(ω); single frequency gives the JSON
    /// matrix, a grid gives CSV of the normal component.
    Spectrum {
        #[command(flatten)]
        slab: SlabArgs,
        #[arg(long)]
        temperature: Quantity,
        /// Single evaluation frequency.
        #[arg(long, conflicts_with_all = ["f_min", "f_max", "n_f"])]
        f: Option<Quantity>,
        #[arg(long, requires = "f_max")]
        f_min: Option<Quantity>,
        #[arg(long, requires = "f_min")]
        f_max: Option<Quantity>,
        #[arg(long, default_value_t = 25)]
        n_f: usize,
        #[arg(long, value_enum, default_value_t = ConventionArg::OneSided)]
        convention: ConventionArg,
    },
    /// Relaxation times T1, T2 (and T1ρ with an RF field), plus an optional
    /// Bloch trajectory.
    Relax {
        #[command(flatten)]
        slab: SlabArgs,
        #[arg(long)]
        temperature: Quantity,
        /// Gyromagnetic ratio over 2π, per tesla (frequency quantity).
        #[arg(long)]
        gamma_over_2pi: Quantity,
        #[arg(long)]
        b0: Quantity,
        /// Angle between polarization axis and slab normal, radians.
        #[arg(long, default_value = "0")]
        theta: Quantity,
        /// Spin-locking RF amplitude (tesla); enables T1ρ.
        #[arg(long)]
        b1: Option<Quantity>,
        /// Angle between RF axis and polarization axis, radians.
        #[arg(long, default_value = "1.5707963267948966")]
        beta: Quantity,
        /// Emit a Bloch trajectory CSV over this duration (seconds).
        #[arg(long)]
        trajectory: Option<Quantity>,
        /// Initial transverse tip fraction of ħ/2 for the trajectory.
        #[arg(long, default_value = "0.5")]
        tip: Quantity,
    },
    /// Zero-temperature spin-reservoir entanglement.
    Entangle {
        /// Ohmic oscillator estimate ln(ωc/ω0)/(2πQ) instead of the slab kernel.
        #[arg(long)]
        ohmic: bool,
        #[arg(long, required_if_eq("ohmic", "true"))]
        q: Option<Quantity>,
        #[arg(long)]
        wc_over_w0: Option<Quantity>,
        #[arg(long, default_value = "1")]
        w0: Quantity,
        #[arg(long)]
        d: Option<Quantity>,
        #[arg(long)]
        t: Option<Quantity>,
        #[arg(long)]
        sigma: Option<Quantity>,
        #[arg(long)]
        gamma_over_2pi: Option<Quantity>,
        #[arg(long)]
        b0: Option<Quantity>,
        #[arg(long, default_value = "0")]
        theta: Quantity,
        /// Sweep the precession frequency over [w0-min, w0-max] and emit a
        /// CSV of E(ω0) instead of a single report.
        #[arg(long, requires = "w0_max")]
        w0_min: Option<Quantity>,
        #[arg(long, requires = "w0_min")]
        w0_max: Option<Quantity>,
        #[arg(long, default_value_t = 17)]
        n_w0: usize,
    },
    /// E/B field map in the source region, CSV over an x-z grid.
    Fieldmap {
        #[command(flatten)]
        slab: SlabArgs,
        #[arg(long)]
        f: Quantity,
        /// Dipole moment vector "mx,my,mz" (A·m²).
        #[arg(long, default_value = "0,0,1")]
        m: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: Quantity,
        #[arg(long, allow_hyphen_values = true)]
        x1: Quantity,
        #[arg(long, default_value_t = 11)]
        nx: usize,
        #[arg(long, allow_hyphen_values = true)]
        z0: Quantity,
        #[arg(long, allow_hyphen_values = true)]
        z1: Quantity,
        #[arg(long, default_value_t = 11)]
        nz: usize,
        /// Fixed y coordinate of the plane.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        y: Quantity,
    },
    /// Interpolation-accuracy survey over the design space.
    Survey {
        /// Grid sizes "nd,nt,nl" for the d, t, λ/d axes.
        #[arg(long, default_value = "7,7,7")]
        grid: String,
        /// Compare doubled one-slab Γ against the true two-slab midpoint Γ′.
        #[arg(long)]
        two_slab: bool,
        #[arg(long, default_value = "5.9e7")]
        sigma: Quantity,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Exact discrete-bath sums (the oracle for the continuum machinery).
    BathOracle {
        /// Bath JSON file with {oscillators: [{omega, beta_sq, n_hat}]}.
        #[arg(long, conflicts_with = "flat_gamma")]
        bath: Option<std::path::PathBuf>,
        /// Flat Γ level to discretize instead of loading a bath.
        #[arg(long)]
        flat_gamma: Option<Quantity>,
        #[arg(long, default_value = "1e5")]
        w_min: Quantity,
        #[arg(long, default_value = "1e8")]
        w_max: Quantity,
        #[arg(long, default_value_t = 128)]
        bins: usize,
        /// Spin gyromagnetic ratio, rad/(s·T), for the Γ discretization.
        #[arg(long, default_value = "1e8")]
        gamma_spin: Quantity,
        #[arg(long, default_value = "1e6")]
        omega0: Quantity,
        /// Polarization axis "x,y,z".
        #[arg(long, default_value = "0,0,1")]
        p_hat: String,
        /// Write the (possibly generated) bath back out as JSON.
        #[arg(long)]
        emit_bath: bool,
    },
    /// Worked design scenarios with published reference values.
    Scenario {
        #[command(subcommand)]
        which: ScenarioCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum ScenarioCommand {
    /// Trapped atoms between two room-temperature copper slabs.
    AtomTrap(ScenarioArgs),
    /// Magnetic resonance force microscopy tip, with a conductivity sweep.
    Mrfm(ScenarioArgs),
    /// Donor-spin register under metallic gates, with hyperfine amplification.
    Kane(ScenarioArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Flat key-value config file overriding the frozen defaults.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// Inline override `key=value`; repeatable; wins over the config file.
    #[arg(long = "set")]
    pub sets: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Emit the conductivity-sweep table instead of the summary report.
    #[arg(long)]
    pub sweep_csv: bool,
}

fn quad_cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn parse_vec3(text: &str, what: &str) -> Result<Vec3, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "{what} expects three comma-separated components, got {text:?}"
        )));
    }
    let mut v = [0.0; 3];
    for (i, p) in parts.iter().enumerate() {
        v[i] = p
            .trim()
            .parse::<f64>()
            .map_err(|e| CliError::Usage(format!("{what}: {e}")))?;
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

#[derive(Serialize)]
struct GammaOut {
    gamma: f64,
    method: String,
    omega_rad_per_s: f64,
    /// Absent at ω = 0, where the static field penetrates fully.
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_m: Option<f64>,
    regime: &'static str,
    warnings: Vec<slabnoise::Warning>,
}

fn run_gamma(
    slab_args: &SlabArgs,
    f: Quantity,
    method: GammaMethodArg,
    regime: RegimeArg,
) -> Result<String, CliError> {
    let (slab, material) = slab_args.build()?;
    let omega = f.angular("--f")?;
    let kernel = match (method, omega) {
        (_, 0.0) => gamma_static(&slab, &material)?,
        (GammaMethodArg::Quadrature, w) => gamma_quadrature(&slab, &material, w, &quad_cfg())?,
        (GammaMethodArg::Interpolated, w) => gamma_interpolated(&slab, &material, w)?,
        (GammaMethodArg::Asymptotic, w) => {
            let lambda = skin_depth(&material, w);
            let chosen = match regime {
                RegimeArg::Auto => AsymptoticRegime::detect(&slab, lambda, 10.0).ok_or_else(|| {
                    CliError::Usage(
                        "no asymptotic regime applies here (transition zone); pass --regime explicitly"
                            .into(),
                    )
                })?,
                RegimeArg::QuasiStatic => AsymptoticRegime::QuasiStatic,
                RegimeArg::ThinSkin => AsymptoticRegime::ThinSkin,
                RegimeArg::ThinSlab => AsymptoticRegime::ThinSlab,
            };
            gamma_asymptotic(&slab, &material, w, chosen, 10.0)?
        }
    };
    let lambda = skin_depth(&material, omega);
    let out = GammaOut {
        gamma: kernel.gamma,
        method: format!("{:?}", kernel.method),
        omega_rad_per_s: omega,
        lambda_m: lambda.is_finite().then_some(lambda),
        regime: AsymptoticRegime::detect(&slab, lambda, 10.0)
            .map(|r| r.label())
            .unwrap_or("transition"),
        warnings: kernel.warnings,
    };
    Ok(serde_json::to_string_pretty(&out).expect("serialize"))
}

fn gamma_at(
    slab: &SlabSystem,
    material: &Material,
    omega: f64,
) -> Result<slabnoise::gamma::DissipationKernel, CliError> {
    if omega == 0.0 {
        Ok(gamma_static(slab, material)?)
    } else {
        Ok(gamma_quadrature(slab, material, omega, &quad_cfg())?)
    }
}

fn run_spectrum(
    slab_args: &SlabArgs,
    temperature: Quantity,
    f: Option<Quantity>,
    f_min: Option<Quantity>,
    f_max: Option<Quantity>,
    n_f: usize,
    convention: ConventionArg,
) -> Result<String, CliError> {
    let (slab, material) = slab_args.build()?;
    let temp = temperature.expect(Dimension::Temperature, "--temperature")?;
    let target: Convention = convention.into();
    if let Some(f) = f {
        let omega = f.angular("--f")?;
        let kernel = gamma_at(&slab, &material, omega)?;
        let s = convention_convert(
            &lab_spectral_density(&kernel, slab.n_hat, omega, temp),
            target,
        );
        return Ok(s.to_json());
    }
    let (Some(f_min), Some(f_max)) = (f_min, f_max) else {
        return Err(CliError::Usage(
            "pass either --f or the grid flags --f-min/--f-max".into(),
        ));
    };
    let w_lo = f_min.angular("--f-min")?;
    let w_hi = f_max.angular("--f-max")?;
    if !(w_lo > 0.0 && w_hi > w_lo) || n_f < 2 {
        return Err(CliError::Usage(
            "need 0 < f-min < f-max and n-f >= 2".into(),
        ));
    }
    let mut out = String::from("f_hz,omega_rad_per_s,sqrt_sbn_t_per_sqrt_hz,convention\n");
    let tag = match target {
        Convention::OneSided => "one-sided",
        Convention::TwoSided => "two-sided",
    };
    for omega in log_space(w_lo, w_hi, n_f) {
        let kernel = gamma_at(&slab, &material, omega)?;
        let s = convention_convert(
            &lab_spectral_density(&kernel, slab.n_hat, omega, temp),
            target,
        );
        out.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{}\n",
            omega / (2.0 * std::f64::consts::PI),
            omega,
            s.along(slab.n_hat).sqrt(),
            tag
        ));
    }
    Ok(out)
}

#[derive(Serialize)]
struct RelaxOut {
    rate1_per_s: f64,
    rate2_per_s: f64,
    rate1_rho_per_s: Option<f64>,
    t1_s: f64,
    t2_s: f64,
    t1_rho_s: Option<f64>,
    omega0_rad_per_s: f64,
    gamma_at_zero: f64,
    gamma_at_omega0: f64,
    gamma_at_omega1: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn run_relax(
    slab_args: &SlabArgs,
    temperature: Quantity,
    gamma_over_2pi: Quantity,
    b0: Quantity,
    theta: Quantity,
    b1: Option<Quantity>,
    beta: Quantity,
    trajectory: Option<Quantity>,
    tip: Quantity,
) -> Result<String, CliError> {
    let (slab, material) = slab_args.build()?;
    let temp = temperature.expect(Dimension::Temperature, "--temperature")?;
    let gamma = gamma_over_2pi.angular("--gamma-over-2pi")?;
    let b0 = b0.expect(Dimension::MagneticField, "--b0")?;
    let theta = theta.expect(Dimension::Dimensionless, "--theta")?;
    let b_hat = Vec3::new(theta.sin(), 0.0, theta.cos());
    let mut ctx = SpinContext::new(gamma, b0, b_hat, temp)?;
    let mut gamma_omega1 = None;
    if let Some(b1q) = b1 {
        let b1v = b1q.expect(Dimension::MagneticField, "--b1")?;
        let beta = beta.expect(Dimension::Dimensionless, "--beta")?;
        // RF axis at angle beta from the polarization axis, in the x-z plane
        let perp = Vec3::new(theta.cos(), 0.0, -theta.sin());
        let b1_hat = (b_hat * beta.cos() + perp * beta.sin()).normalized();
        ctx = ctx.with_rf(b1v, b1_hat)?;
        gamma_omega1 = Some(gamma_at(&slab, &material, gamma * b1v)?.gamma);
    }
    let omega0 = ctx.omega0();
    let g0 = gamma_static(&slab, &material)?.gamma;
    let g_w0 = gamma_at(&slab, &material, omega0)?.gamma;
    let times = relaxation_times(&ctx, slab.n_hat, g0, gamma_omega1, g_w0)?;

    if let Some(duration) = trajectory {
        let duration = duration.expect(Dimension::Dimensionless, "--trajectory")?;
        let tip = tip.expect(Dimension::Dimensionless, "--tip")?;
        let s_eq = equilibrium_polarization(&ctx);
        let perp = Vec3::new(theta.cos(), 0.0, -theta.sin());
        let start = BlochState {
            time: 0.0,
            spin: s_eq + perp * (tip * 0.5 * slabnoise::constants::HBAR),
        };
        let control = StepControl {
            max_step: duration / 200.0,
            ..Default::default()
        };
        let traj = bloch_integrate(&start, &ctx, &times, duration, &control)?;
        let mut out = String::from("t_s,sx_hbar,sy_hbar,sz_hbar\n");
        for st in traj {
            let s = st.spin * (1.0 / slabnoise::constants::HBAR);
            out.push_str(&format!(
                "{:.12e},{:.12e},{:.12e},{:.12e}\n",
                st.time, s.x, s.y, s.z
            ));
        }
        return Ok(out);
    }

    let out = RelaxOut {
        rate1_per_s: times.rate1,
        rate2_per_s: times.rate2,
        rate1_rho_per_s: times.rate1_rho,
        t1_s: times.t1,
        t2_s: times.t2,
        t1_rho_s: times.t1_rho,
        omega0_rad_per_s: omega0,
        gamma_at_zero: g0,
        gamma_at_omega0: g_w0,
        gamma_at_omega1: gamma_omega1,
    };
    Ok(serde_json::to_string_pretty(&out).expect("serialize"))
}

#[derive(Serialize)]
struct EntangleOut {
    e: f64,
    method: String,
    omega0_rad_per_s: f64,
    omega_c_rad_per_s: f64,
    warnings: Vec<slabnoise::Warning>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e_log_estimate: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn run_entangle(
    ohmic: bool,
    q: Option<Quantity>,
    wc_over_w0: Option<Quantity>,
    w0: Quantity,
    d: Option<Quantity>,
    t: Option<Quantity>,
    sigma: Option<Quantity>,
    gamma_over_2pi: Option<Quantity>,
    b0: Option<Quantity>,
    theta: Quantity,
    w0_sweep: Option<(f64, f64, usize)>,
) -> Result<String, CliError> {
    if let Some((w_lo, w_hi, n)) = w0_sweep {
        if ohmic {
            let q = q
                .ok_or_else(|| CliError::Usage("--ohmic requires --q".into()))?
                .expect(Dimension::Dimensionless, "--q")?;
            let ratio = wc_over_w0
                .ok_or_else(|| CliError::Usage("--ohmic sweep requires --wc-over-w0".into()))?
                .expect(Dimension::Dimensionless, "--wc-over-w0")?;
            let mut out = String::from("omega0_rad_per_s,entanglement\n");
            for w in log_space(w_lo, w_hi, n) {
                let r = ohmic_approx(q, ratio * w, w)?;
                out.push_str(&format!("{:.12e},{:.12e}\n", w, r.e));
            }
            return Ok(out);
        }
        let (Some(d), Some(t), Some(sigma), Some(g2pi)) = (d, t, sigma, gamma_over_2pi) else {
            return Err(CliError::Usage(
                "slab sweep needs --d --t --sigma --gamma-over-2pi".into(),
            ));
        };
        let d = d.expect(Dimension::Length, "--d")?;
        let t = t.expect(Dimension::Length, "--t")?;
        let sigma = sigma.expect(Dimension::Dimensionless, "--sigma")?;
        let gamma = g2pi.angular("--gamma-over-2pi")?;
        let theta = theta.expect(Dimension::Dimensionless, "--theta")?;
        let omega_c = scenarios::cutoff_frequency(d, sigma);
        let mut out = String::from("omega0_rad_per_s,entanglement,log_estimate\n");
        for w in log_space(w_lo, w_hi, n) {
            let (exact, approx) =
                scenarios::slab_entanglement(d, t, sigma, gamma, w / gamma, theta, omega_c)?;
            out.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", w, exact, approx));
        }
        return Ok(out);
    }
    if ohmic {
        let q = q
            .ok_or_else(|| CliError::Usage("--ohmic requires --q".into()))?
            .expect(Dimension::Dimensionless, "--q")?;
        let ratio = wc_over_w0
            .ok_or_else(|| CliError::Usage("--ohmic requires --wc-over-w0".into()))?
            .expect(Dimension::Dimensionless, "--wc-over-w0")?;
        let w0 = w0.angular("--w0")?;
        let r = ohmic_approx(q, ratio * w0, w0)?;
        let out = EntangleOut {
            e: r.e,
            method: format!("{:?}", r.method),
            omega0_rad_per_s: w0,
            omega_c_rad_per_s: ratio * w0,
            warnings: r.warnings,
            e_log_estimate: None,
        };
        return Ok(serde_json::to_string_pretty(&out).expect("serialize"));
    }
    let (Some(d), Some(t), Some(sigma), Some(g2pi), Some(b0)) = (d, t, sigma, gamma_over_2pi, b0)
    else {
        return Err(CliError::Usage(
            "slab mode needs --d --t --sigma --gamma-over-2pi --b0 (or use --ohmic)".into(),
        ));
    };
    let d = d.expect(Dimension::Length, "--d")?;
    let t = t.expect(Dimension::Length, "--t")?;
    let sigma = sigma.expect(Dimension::Dimensionless, "--sigma")?;
    let gamma = g2pi.angular("--gamma-over-2pi")?;
    let b0 = b0.expect(Dimension::MagneticField, "--b0")?;
    let theta = theta.expect(Dimension::Dimensionless, "--theta")?;
    let omega_c = match wc_over_w0 {
        Some(r) => r.expect(Dimension::Dimensionless, "--wc-over-w0")? * gamma * b0,
        None => scenarios::cutoff_frequency(d, sigma),
    };
    let (exact, approx) = scenarios::slab_entanglement(d, t, sigma, gamma, b0, theta, omega_c)?;
    let out = EntangleOut {
        e: exact,
        method: "ExactQuadrature".into(),
        omega0_rad_per_s: gamma * b0,
        omega_c_rad_per_s: omega_c,
        warnings: vec![],
        e_log_estimate: Some(approx),
    };
    Ok(serde_json::to_string_pretty(&out).expect("serialize"))
}

#[allow(clippy::too_many_arguments)]
fn run_fieldmap(
    slab_args: &SlabArgs,
    f: Quantity,
    m: &str,
    x0: Quantity,
    x1: Quantity,
    nx: usize,
    z0: Quantity,
    z1: Quantity,
    nz: usize,
    y: Quantity,
) -> Result<String, CliError> {
    let (slab, material) = slab_args.build()?;
    let omega = f.angular("--f")?;
    if omega <= 0.0 {
        return Err(CliError::Usage("fieldmap needs --f > 0".into()));
    }
    let dipole = parse_vec3(m, "--m")?;
    let x0 = x0.expect(Dimension::Length, "--x0")?;
    let x1 = x1.expect(Dimension::Length, "--x1")?;
    let z0 = z0.expect(Dimension::Length, "--z0")?;
    let z1 = z1.expect(Dimension::Length, "--z1")?;
    let y = y.expect(Dimension::Length, "--y")?;
    if nx < 1 || nz < 1 {
        return Err(CliError::Usage("need nx >= 1 and nz >= 1".into()));
    }
    let mut positions = Vec::new();
    for iz in 0..nz {
        for ix in 0..nx {
            let x = if nx == 1 {
                x0
            } else {
                x0 + (x1 - x0) * ix as f64 / (nx - 1) as f64
            };
            let z = if nz == 1 {
                z0
            } else {
                z0 + (z1 - z0) * iz as f64 / (nz - 1) as f64
            };
            let p = Vec3::new(x, y, z);
            if p.z < slab.d && p.norm() > 0.0 {
                positions.push(p);
            }
        }
    }
    let samples = reconstruct_fields(&slab, &material, omega, dipole, &positions, &quad_cfg())?;
    let mut out = String::from(
        "x_m,y_m,z_m,re_bx_t,im_bx_t,re_by_t,im_by_t,re_bz_t,im_bz_t,re_ex_v_per_m,im_ex_v_per_m,re_ey_v_per_m,im_ey_v_per_m,re_ez_v_per_m,im_ez_v_per_m\n",
    );
    for s in samples {
        out.push_str(&format!(
            "{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}\n",
            s.position.x, s.position.y, s.position.z,
            s.b.x.re, s.b.x.im, s.b.y.re, s.b.y.im, s.b.z.re, s.b.z.im,
            s.e.x.re, s.e.x.im, s.e.y.re, s.e.y.im, s.e.z.re, s.e.z.im,
        ));
    }
    Ok(out)
}

fn run_survey(
    grid_text: &str,
    two_slab: bool,
    sigma: Quantity,
    format: Format,
) -> Result<String, CliError> {
    let parts: Vec<usize> = grid_text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("--grid expects \"nd,nt,nl\": {e}")))?;
    if parts.len() != 3 || parts.iter().any(|&n| n < 2) {
        return Err(CliError::Usage("--grid expects three sizes >= 2".into()));
    }
    let mut grid = SurveyGrid::full_design_space(parts[0], parts[1], parts[2]);
    grid.sigma_mag = sigma.expect(Dimension::Dimensionless, "--sigma")?;
    let report = slabnoise::gamma::survey_design_space(&grid, &quad_cfg(), two_slab);
    if !report.failures.is_empty() {
        eprintln!("{} grid points failed to converge", report.failures.len());
    }
    eprintln!(
        "survey: {} points, err_db in [{:+.3}, {:+.3}]",
        report.points.len(),
        report.min_err_db,
        report.max_err_db
    );
    Ok(match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    })
}

#[derive(Serialize)]
struct BathOracleOut {
    oscillators: usize,
    spin_entanglement: f64,
    oscillator_entanglement: f64,
    frequency_ratio_squared: f64,
    anisotropy: slabnoise::Mat3,
    #[serde(skip_serializing_if = "Option::is_none")]
    bath_json: Option<serde_json::Value>,
}

#[allow(clippy::too_many_arguments)]
fn run_bath_oracle(
    bath_path: Option<&std::path::Path>,
    flat_gamma: Option<Quantity>,
    w_min: Quantity,
    w_max: Quantity,
    bins: usize,
    gamma_spin: Quantity,
    omega0: Quantity,
    p_hat: &str,
    emit_bath: bool,
) -> Result<String, CliError> {
    let p_hat = parse_vec3(p_hat, "--p-hat")?;
    if p_hat.norm() == 0.0 {
        return Err(CliError::Usage("--p-hat must be a nonzero vector".into()));
    }
    let p_hat = p_hat.normalized();
    let omega0 = omega0.angular("--omega0")?;
    let bath = match (bath_path, flat_gamma) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            slabnoise::bath::DiscreteBath::from_json(&text)?
        }
        (None, Some(level)) => {
            let level = level.expect(Dimension::Dimensionless, "--flat-gamma")?;
            let w_lo = w_min.angular("--w-min")?;
            let w_hi = w_max.angular("--w-max")?;
            if !(w_lo >= 0.0 && w_hi > w_lo) || bins < 1 {
                return Err(CliError::Usage(
                    "need 0 <= w-min < w-max and bins >= 1".into(),
                ));
            }
            let gs = gamma_spin.expect(Dimension::Dimensionless, "--gamma-spin")?;
            let edges: Vec<f64> = (0..=bins)
                .map(|i| w_lo + (w_hi - w_lo) * i as f64 / bins as f64)
                .collect();
            let g = move |_: f64| level;
            slabnoise::bath::sample_from_gamma(&g, &edges, gs, Vec3::Z)?
        }
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --bath FILE or --flat-gamma LEVEL".into(),
            ))
        }
    };
    let out = BathOracleOut {
        oscillators: bath.len(),
        spin_entanglement: bath.exact_spin_entanglement(p_hat, omega0),
        oscillator_entanglement: bath.exact_oscillator_entanglement(omega0),
        frequency_ratio_squared: bath.frequency_ratio_squared(omega0),
        anisotropy: bath.anisotropy(),
        bath_json: if emit_bath {
            Some(serde_json::from_str(&bath.to_json()).expect("bath json"))
        } else {
            None
        },
    };
    Ok(serde_json::to_string_pretty(&out).expect("serialize"))
}

fn run_scenario(which: &ScenarioCommand) -> Result<String, CliError> {
    let (args, report): (&ScenarioArgs, ScenarioReport) = match which {
        ScenarioCommand::AtomTrap(a) => {
            let cfg = read_config(a)?;
            (a, scenarios::scenario_atom_trap(cfg.as_deref(), &a.sets)?)
        }
        ScenarioCommand::Mrfm(a) => {
            let cfg = read_config(a)?;
            (a, scenarios::scenario_mrfm(cfg.as_deref(), &a.sets)?)
        }
        ScenarioCommand::Kane(a) => {
            let cfg = read_config(a)?;
            (a, scenarios::scenario_kane(cfg.as_deref(), &a.sets)?)
        }
    };
    if args.sweep_csv {
        let Some(sweep) = &report.sweep else {
            return Err(CliError::Usage("this scenario has no sweep table".into()));
        };
        return Ok(sweep.to_csv());
    }
    Ok(match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    })
}

fn read_config(args: &ScenarioArgs) -> Result<Option<String>, CliError> {
    match &args.config {
        Some(path) => Ok(Some(std::fs::read_to_string(path)?)),
        None => Ok(None),
    }
}

/// Execute a parsed command, returning the output text destined for stdout.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Gamma {
            slab,
            f,
            method,
            regime,
        } => run_gamma(slab, *f, *method, *regime),
        Command::Spectrum {
            slab,
            temperature,
            f,
            f_min,
            f_max,
            n_f,
            convention,
        } => run_spectrum(slab, *temperature, *f, *f_min, *f_max, *n_f, *convention),
        Command::Relax {
            slab,
            temperature,
            gamma_over_2pi,
            b0,
            theta,
            b1,
            beta,
            trajectory,
            tip,
        } => run_relax(
            slab,
            *temperature,
            *gamma_over_2pi,
            *b0,
            *theta,
            *b1,
            *beta,
            *trajectory,
            *tip,
        ),
        Command::Entangle {
            ohmic,
            q,
            wc_over_w0,
            w0,
            d,
            t,
            sigma,
            gamma_over_2pi,
            b0,
            theta,
            w0_min,
            w0_max,
            n_w0,
        } => {
            let sweep = match (w0_min, w0_max) {
                (Some(lo), Some(hi)) => {
                    let lo = lo.angular("--w0-min")?;
                    let hi = hi.angular("--w0-max")?;
                    if !(lo > 0.0 && hi > lo) || *n_w0 < 2 {
                        return Err(CliError::Usage(
                            "need 0 < w0-min < w0-max and n-w0 >= 2".into(),
                        ));
                    }
                    Some((lo, hi, *n_w0))
                }
                _ => None,
            };
            run_entangle(
                *ohmic,
                *q,
                *wc_over_w0,
                *w0,
                *d,
                *t,
                *sigma,
                *gamma_over_2pi,
                *b0,
                *theta,
                sweep,
            )
        }
        Command::Fieldmap {
            slab,
            f,
            m,
            x0,
            x1,
            nx,
            z0,
            z1,
            nz,
            y,
        } => run_fieldmap(slab, *f, m, *x0, *x1, *nx, *z0, *z1, *nz, *y),
        Command::Survey {
            grid,
            two_slab,
            sigma,
            format,
        } => run_survey(grid, *two_slab, *sigma, *format),
        Command::BathOracle {
            bath,
            flat_gamma,
            w_min,
            w_max,
            bins,
            gamma_spin,
            omega0,
            p_hat,
            emit_bath,
        } => run_bath_oracle(
            bath.as_deref(),
            *flat_gamma,
            *w_min,
            *w_max,
            *bins,
            *gamma_spin,
            *omega0,
            p_hat,
            *emit_bath,
        ),
        Command::Scenario { which } => run_scenario(which),
    }
}
