//! The three worked design scenarios: room-temperature atom traps between
//! copper slabs, a magnetic-resonance force microscope tip, and metallic
//! control gates over donor-spin qubits. Each runs from a frozen default
//! parameter set, takes config-file and command-line overrides, and
//! reports computed values next to the published reference numbers it
//! reproduces.

use crate::config::{Config, ConfigError};
use crate::units::Dimension;
use serde::Serialize;
use slabnoise::constants::{ELEMENTARY_CHARGE, HBAR, MU_0};
use slabnoise::entanglement::{spin_entanglement, DissipationSpectrum, TailBound};
use slabnoise::gamma::{gamma_quadrature, gamma_static, AsymptoticRegime, QuadratureConfig};
use slabnoise::model::{skin_depth, Material, SlabSystem, SpinContext};
use slabnoise::relaxation::{
    kane_effective_density, relaxation_from_spectra, relaxation_times, HyperfineSystem,
};
use slabnoise::spectra::{convention_convert, lab_spectral_density, Convention, SpectralDensity};
use slabnoise::{Error as PhysError, Vec3};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("parameter {0}: {1}")]
    Parameter(String, String),
    #[error(transparent)]
    Physics(#[from] PhysError),
}

/// One computed output with its unit spelled out.
#[derive(Debug, Clone, Serialize)]
pub struct OutputRow {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

/// A computed value next to the published number it reproduces.
#[derive(Debug, Clone, Serialize)]
pub struct ReferenceRow {
    pub quantity: String,
    pub computed: f64,
    pub reference: f64,
    pub ratio: f64,
    pub unit: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    /// Resolved inputs in canonical config-file form.
    pub input_echo: String,
    pub outputs: Vec<OutputRow>,
    pub reference_checks: Vec<ReferenceRow>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepTable>,
}

impl ScenarioReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,name,value,unit,reference,ratio\n");
        for o in &self.outputs {
            out.push_str(&format!(
                "output,{},{:.12e},{},,\n",
                o.name, o.value, o.unit
            ));
        }
        for r in &self.reference_checks {
            out.push_str(&format!(
                "reference,{},{:.12e},{},{:.12e},{:.6}\n",
                r.quantity, r.computed, r.unit, r.reference, r.ratio
            ));
        }
        out
    }
}

fn reference(quantity: &str, computed: f64, reference: f64, unit: &str) -> ReferenceRow {
    ReferenceRow {
        quantity: quantity.to_string(),
        computed,
        reference,
        ratio: computed / reference,
        unit: unit.to_string(),
    }
}

struct Params {
    config: Config,
    scenario: &'static str,
}

impl Params {
    fn resolve(
        scenario: &'static str,
        defaults: &[(&str, &str)],
        config_text: Option<&str>,
        overrides: &[String],
    ) -> Result<Self, ScenarioError> {
        let mut config = Config::default();
        for (k, v) in defaults {
            config.set(k, v.parse().expect("default quantities parse"));
        }
        if let Some(text) = config_text {
            let user = Config::parse(text)?;
            user.restrict_keys(&defaults.iter().map(|(k, _)| *k).collect::<Vec<_>>())?;
            for (k, v) in user.entries() {
                config.set(k, *v);
            }
        }
        let mut staged = Config::default();
        staged.apply_overrides(overrides)?;
        staged.restrict_keys(&defaults.iter().map(|(k, _)| *k).collect::<Vec<_>>())?;
        for (k, v) in staged.entries() {
            config.set(k, *v);
        }
        Ok(Self { config, scenario })
    }

    fn get(&self, key: &str, dim: Dimension) -> Result<f64, ScenarioError> {
        let q = self
            .config
            .get(key)
            .ok_or_else(|| ScenarioError::Parameter(key.into(), "missing".into()))?;
        q.expect(dim, key)
            .map_err(|e| ScenarioError::Parameter(key.into(), e.to_string()))
    }

    /// Frequency-per-tesla parameters (gyromagnetic ratios over 2π) given
    /// in Hz/T; returns rad/(s·T).
    fn gyro(&self, key: &str) -> Result<f64, ScenarioError> {
        let q = self
            .config
            .get(key)
            .ok_or_else(|| ScenarioError::Parameter(key.into(), "missing".into()))?;
        q.angular(key)
            .map_err(|e| ScenarioError::Parameter(key.into(), e.to_string()))
    }

    fn echo(&self) -> String {
        self.config.emit()
    }
}

fn quad_cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

// ---------------------------------------------------------------------------
// Atom trap between two room-temperature copper slabs
// ---------------------------------------------------------------------------

pub const ATOM_TRAP_DEFAULTS: &[(&str, &str)] = &[
    ("d", "1cm"), // midpoint to each surface (separation 2 cm)
    ("t", "1cm"),
    ("sigma", "5.9e7"), // high-purity copper, (Ω·m)⁻¹
    ("temperature", "300K"),
    ("gamma_over_2pi", "7.59MHz"), // ¹⁹⁹Hg, per tesla
    ("e_field", "1e6"),            // V/m (10⁴ V/cm)
    ("regions", "1"),              // independent averaging regions (noise power ÷ n)
];

pub fn scenario_atom_trap(
    config_text: Option<&str>,
    overrides: &[String],
) -> Result<ScenarioReport, ScenarioError> {
    let p = Params::resolve("atom-trap", ATOM_TRAP_DEFAULTS, config_text, overrides)?;
    let d = p.get("d", Dimension::Length)?;
    let t = p.get("t", Dimension::Length)?;
    let sigma = p.get("sigma", Dimension::Dimensionless)?;
    let temperature = p.get("temperature", Dimension::Temperature)?;
    let gamma = p.gyro("gamma_over_2pi")?;
    let e_field = p.get("e_field", Dimension::Dimensionless)?;
    let regions = p.get("regions", Dimension::Dimensionless)?;
    if regions < 1.0 {
        return Err(ScenarioError::Parameter(
            "regions".into(),
            "must be >= 1".into(),
        ));
    }

    let material = Material::conductor(sigma)?;
    let slab = SlabSystem::two_slab_midpoint(d, t)?;
    let n_hat = slab.n_hat;
    let averaging = regions.sqrt();

    let sqrt_sbn = |omega: f64| -> Result<f64, ScenarioError> {
        let kernel = if omega == 0.0 {
            gamma_static(&slab, &material)?
        } else {
            gamma_quadrature(&slab, &material, omega, &quad_cfg())?
        };
        let s = lab_spectral_density(&kernel, n_hat, omega, temperature);
        let one_sided = convention_convert(&s, Convention::OneSided);
        Ok(one_sided.along(n_hat).sqrt() / averaging)
    };

    let s0 = sqrt_sbn(0.0)?;
    let s100 = sqrt_sbn(2.0 * std::f64::consts::PI * 100.0)?;
    // equivalent electric-dipole noise: S_d = (ħγ/2E)² n̂·S_B·n̂
    let e_sqrt_sd_joule = 0.5 * HBAR * gamma * s0;
    let e_sqrt_sd_ev = e_sqrt_sd_joule / ELEMENTARY_CHARGE;
    let sqrt_sd_e_cm = e_sqrt_sd_joule / e_field / ELEMENTARY_CHARGE * 100.0;

    let outputs = vec![
        OutputRow {
            name: "sqrt_sbn_0hz".into(),
            value: s0,
            unit: "T/sqrt(Hz), one-sided".into(),
        },
        OutputRow {
            name: "sqrt_sbn_100hz".into(),
            value: s100,
            unit: "T/sqrt(Hz), one-sided".into(),
        },
        OutputRow {
            name: "e_times_sqrt_sd".into(),
            value: e_sqrt_sd_ev,
            unit: "eV/sqrt(Hz)".into(),
        },
        OutputRow {
            name: "sqrt_sd".into(),
            value: sqrt_sd_e_cm,
            unit: "e*cm/sqrt(Hz)".into(),
        },
    ];
    let reference_checks = vec![
        reference("sqrt_sbn_0hz", s0, 1.2e-12, "T/sqrt(Hz)"),
        reference("sqrt_sbn_100hz", s100, 0.6e-12, "T/sqrt(Hz)"),
        reference("e_times_sqrt_sd", e_sqrt_sd_ev, 1.94e-20, "eV/sqrt(Hz)"),
    ];
    Ok(ScenarioReport {
        scenario: p.scenario.into(),
        input_echo: p.echo(),
        outputs,
        reference_checks,
        notes: vec![
            "noise from the two slabs is additive at the midpoint".into(),
            "region averaging divides amplitude by sqrt(regions); choosing the \
             divisor is design-specific and left to the caller"
                .into(),
        ],
        sweep: None,
    })
}

// ---------------------------------------------------------------------------
// Magnetic resonance force microscopy tip
// ---------------------------------------------------------------------------

pub const MRFM_DEFAULTS: &[(&str, &str)] = &[
    ("tip_radius", "1um"),
    ("tip_field", "1T"), // μ0 M of the uniformly magnetized sphere
    ("d", "50nm"),
    ("t", "50nm"), // tip modeled as a slab of thickness t = d
    ("temperature", "4K"),
    ("theta", "0"),
    ("gamma_e_over_2pi", "28GHz"),    // electron, per tesla
    ("gamma_p_over_2pi", "42.58MHz"), // proton, per tesla
    ("sigma", "4e6"),                 // headline tip conductivity, (Ω·m)⁻¹
    ("sweep_sigma_min", "1e4"),
    ("sweep_sigma_max", "1e12"),
    ("sweep_points", "49"),
];

fn slab_rates(
    slab: &SlabSystem,
    material: &Material,
    gamma: f64,
    b0: f64,
    theta: f64,
    temperature: f64,
) -> Result<(f64, f64), ScenarioError> {
    let b_hat = Vec3::new(theta.sin(), 0.0, theta.cos());
    let ctx = SpinContext::new(gamma, b0, b_hat, temperature)?;
    let omega0 = ctx.omega0();
    let g0 = gamma_static(slab, material)?.gamma;
    let g_omega0 = gamma_quadrature(slab, material, omega0, &quad_cfg())?.gamma;
    let times = relaxation_times(&ctx, slab.n_hat, g0, None, g_omega0)?;
    Ok((times.rate1, times.rate2))
}

pub fn scenario_mrfm(
    config_text: Option<&str>,
    overrides: &[String],
) -> Result<ScenarioReport, ScenarioError> {
    let p = Params::resolve("mrfm", MRFM_DEFAULTS, config_text, overrides)?;
    let r_tip = p.get("tip_radius", Dimension::Length)?;
    let mu0_m = p.get("tip_field", Dimension::MagneticField)?;
    let d = p.get("d", Dimension::Length)?;
    let t = p.get("t", Dimension::Length)?;
    let temperature = p.get("temperature", Dimension::Temperature)?;
    let theta = p.get("theta", Dimension::Dimensionless)?;
    let gamma_e = p.gyro("gamma_e_over_2pi")?;
    let gamma_p = p.gyro("gamma_p_over_2pi")?;
    let sigma = p.get("sigma", Dimension::Dimensionless)?;
    let s_min = p.get("sweep_sigma_min", Dimension::Dimensionless)?;
    let s_max = p.get("sweep_sigma_max", Dimension::Dimensionless)?;
    let n_sweep = p.get("sweep_points", Dimension::Dimensionless)? as usize;

    // polarizing field of a uniformly magnetized sphere at distance d from
    // its surface: B0 = 2 μ0 M r³ / (3 (r+d)³)
    let b0 = 2.0 * mu0_m * r_tip.powi(3) / (3.0 * (r_tip + d).powi(3));
    let omega0_e = gamma_e * b0;
    let f0_e = omega0_e / (2.0 * std::f64::consts::PI);

    let slab = SlabSystem::one_slab(d, t)?;
    let material = Material::conductor(sigma)?;
    let (rate1_e, rate2_e) = slab_rates(&slab, &material, gamma_e, b0, theta, temperature)?;
    let (rate1_p, rate2_p) = slab_rates(&slab, &material, gamma_p, b0, theta, temperature)?;
    let lambda0 = skin_depth(&material, omega0_e);

    // conductivity sweep, deterministic order
    let sweep_sigmas = slabnoise::gamma::log_space(s_min, s_max, n_sweep.max(2));
    use rayon::prelude::*;
    let rows: Result<Vec<Vec<f64>>, ScenarioError> = sweep_sigmas
        .par_iter()
        .map(|&s| {
            let m = Material::conductor(s)?;
            let (r1e, r2e) = slab_rates(&slab, &m, gamma_e, b0, theta, temperature)?;
            let (r1p, r2p) = slab_rates(&slab, &m, gamma_p, b0, theta, temperature)?;
            Ok(vec![s, r1e, r2e, r1p, r2p])
        })
        .collect();
    let sweep = SweepTable {
        columns: vec![
            "sigma_S_per_m".into(),
            "rate1_electron_per_s".into(),
            "rate2_electron_per_s".into(),
            "rate1_proton_per_s".into(),
            "rate2_proton_per_s".into(),
        ],
        rows: rows?,
    };

    let outputs = vec![
        OutputRow {
            name: "b0".into(),
            value: b0,
            unit: "T".into(),
        },
        OutputRow {
            name: "precession_frequency".into(),
            value: f0_e,
            unit: "Hz".into(),
        },
        OutputRow {
            name: "lambda_at_omega0".into(),
            value: lambda0,
            unit: "m".into(),
        },
        OutputRow {
            name: "rate1_electron".into(),
            value: rate1_e,
            unit: "1/s".into(),
        },
        OutputRow {
            name: "rate2_electron".into(),
            value: rate2_e,
            unit: "1/s".into(),
        },
        OutputRow {
            name: "rate1_proton".into(),
            value: rate1_p,
            unit: "1/s".into(),
        },
        OutputRow {
            name: "rate2_proton".into(),
            value: rate2_p,
            unit: "1/s".into(),
        },
    ];
    let reference_checks = vec![
        reference("b0", b0, 0.58, "T"),
        reference("precession_frequency", f0_e, 16.1e9, "Hz"),
        reference("rate1_electron", rate1_e, 10.0, "1/s"),
    ];
    Ok(ScenarioReport {
        scenario: p.scenario.into(),
        input_echo: p.echo(),
        outputs,
        reference_checks,
        notes: vec![
            "electron gyromagnetic ratio taken as 28.0 GHz/T; the published \
             figure quoting 2.8 MHz/T alongside a 16.1 GHz precession at \
             0.58 T is internally inconsistent by four orders of magnitude"
                .into(),
            "the published ~10 1/s relaxation rate at sigma = 4e6 is not \
             exactly reproducible from the quoted inputs; this pipeline \
             gives ~1 1/s, so agreement is order-of-magnitude only"
                .into(),
        ],
        sweep: Some(sweep),
    })
}

// ---------------------------------------------------------------------------
// Donor-spin quantum register under metallic gates
// ---------------------------------------------------------------------------

pub const KANE_DEFAULTS: &[(&str, &str)] = &[
    ("b0", "2T"),
    ("temperature", "100mK"),
    ("t", "5nm"),
    ("d", "10nm"),
    ("theta", "0"),
    ("a_over_2pi", "29MHz"),          // hyperfine coupling
    ("gamma_n_over_2pi", "17.25MHz"), // ³¹P nucleus, per tesla
    ("gamma_e_over_2pi", "28GHz"),    // electron, per tesla
    ("sigma", "1e6"),                 // gate pad conductivity
    ("sweep_sigma_min", "1e2"),
    ("sweep_sigma_max", "1e8"),
    ("sweep_points", "25"),
];

/// Nuclear-spin rates with the hyperfine-amplified effective density, via
/// the covariant trace route (the amplified tensor is no longer of the
/// plain slab form).
fn kane_nuclear_rates(
    slab: &SlabSystem,
    material: &Material,
    hf: &HyperfineSystem,
    theta: f64,
    temperature: f64,
) -> Result<(f64, f64), ScenarioError> {
    let b_hat = Vec3::new(theta.sin(), 0.0, theta.cos());
    let omega0 = hf.omega0();
    let ctx = SpinContext::new(hf.gamma_n, omega0 / hf.gamma_n, b_hat, temperature)?;
    let g0 = gamma_static(slab, material)?.gamma;
    let g_omega0 = gamma_quadrature(slab, material, omega0, &quad_cfg())?.gamma;
    let s_of = |g: f64, w: f64| -> SpectralDensity {
        let kernel = slabnoise::gamma::DissipationKernel {
            gamma: g,
            method: slabnoise::gamma::GammaMethod::Quadrature,
            warnings: vec![],
        };
        lab_spectral_density(&kernel, slab.n_hat, w, temperature)
    };
    let s0_eff = kane_effective_density(hf, &s_of(g0, 0.0), b_hat)?.s_eff;
    let sw_eff = kane_effective_density(hf, &s_of(g_omega0, omega0), b_hat)?.s_eff;
    let times = relaxation_from_spectra(&ctx, &s0_eff, None, &sw_eff)?;
    Ok((times.rate1, times.rate2))
}

pub fn scenario_kane(
    config_text: Option<&str>,
    overrides: &[String],
) -> Result<ScenarioReport, ScenarioError> {
    let p = Params::resolve("kane", KANE_DEFAULTS, config_text, overrides)?;
    let b0 = p.get("b0", Dimension::MagneticField)?;
    let temperature = p.get("temperature", Dimension::Temperature)?;
    let t = p.get("t", Dimension::Length)?;
    let d = p.get("d", Dimension::Length)?;
    let theta = p.get("theta", Dimension::Dimensionless)?;
    let a = p.gyro("a_over_2pi")?;
    let gamma_n = p.gyro("gamma_n_over_2pi")?;
    let gamma_e = p.gyro("gamma_e_over_2pi")?;
    let sigma = p.get("sigma", Dimension::Dimensionless)?;
    let s_min = p.get("sweep_sigma_min", Dimension::Dimensionless)?;
    let s_max = p.get("sweep_sigma_max", Dimension::Dimensionless)?;
    let n_sweep = p.get("sweep_points", Dimension::Dimensionless)? as usize;

    let hf = HyperfineSystem::new(gamma_e, gamma_n, a, b0)?;
    let amplification = hf.coupling_factor().powi(2);
    let slab = SlabSystem::one_slab(d, t)?;
    let material = Material::conductor(sigma)?;

    let (rate1_n, rate2_n) = kane_nuclear_rates(&slab, &material, &hf, theta, temperature)?;
    let (rate1_e, rate2_e) = slab_rates(&slab, &material, gamma_e, b0, theta, temperature)?;

    use rayon::prelude::*;
    let sweep_sigmas = slabnoise::gamma::log_space(s_min, s_max, n_sweep.max(2));
    let rows: Result<Vec<Vec<f64>>, ScenarioError> = sweep_sigmas
        .par_iter()
        .map(|&s| {
            let m = Material::conductor(s)?;
            let (r1n, r2n) = kane_nuclear_rates(&slab, &m, &hf, theta, temperature)?;
            let (r1e, r2e) = slab_rates(&slab, &m, gamma_e, b0, theta, temperature)?;
            Ok(vec![s, r1n, r2n, r1e, r2e])
        })
        .collect();
    let sweep = SweepTable {
        columns: vec![
            "sigma_S_per_m".into(),
            "rate1_nuclear_per_s".into(),
            "rate2_nuclear_per_s".into(),
            "rate1_electron_per_s".into(),
            "rate2_electron_per_s".into(),
        ],
        rows: rows?,
    };

    let outputs = vec![
        OutputRow {
            name: "amplification".into(),
            value: amplification,
            unit: "dimensionless".into(),
        },
        OutputRow {
            name: "nuclear_splitting".into(),
            value: hf.omega0() / (2.0 * std::f64::consts::PI),
            unit: "Hz".into(),
        },
        OutputRow {
            name: "rate1_nuclear".into(),
            value: rate1_n,
            unit: "1/s".into(),
        },
        OutputRow {
            name: "rate2_nuclear".into(),
            value: rate2_n,
            unit: "1/s".into(),
        },
        OutputRow {
            name: "rate1_electron".into(),
            value: rate1_e,
            unit: "1/s".into(),
        },
        OutputRow {
            name: "rate2_electron".into(),
            value: rate2_e,
            unit: "1/s".into(),
        },
    ];
    let reference_checks = vec![reference(
        "amplification",
        amplification,
        7.2,
        "dimensionless",
    )];
    Ok(ScenarioReport {
        scenario: p.scenario.into(),
        input_echo: p.echo(),
        outputs,
        reference_checks,
        notes: vec![
            "transverse noise power seen by the two computational levels is \
             amplified by (1 + 2A/(gamma_n B0))^2"
                .into(),
        ],
        sweep: Some(sweep),
    })
}

/// Thermal-noise entanglement of a polarized spin with the slab reservoir
/// at zero temperature; shared by the `entangle` subcommand.
pub fn slab_entanglement(
    d: f64,
    t: f64,
    sigma: f64,
    gamma: f64,
    b0: f64,
    theta: f64,
    omega_c: f64,
) -> Result<(f64, f64), ScenarioError> {
    let slab = SlabSystem::one_slab(d, t)?;
    let material = Material::conductor(sigma)?;
    let omega0 = gamma * b0;
    let cfg = quad_cfg();
    let gamma_fn = move |w: f64| -> f64 {
        gamma_quadrature(&slab, &material, w, &cfg)
            .map(|k| k.gamma)
            .unwrap_or(f64::NAN)
    };
    let p_hat = Vec3::new(theta.sin(), 0.0, theta.cos());
    let exact = spin_entanglement(
        p_hat,
        omega0,
        gamma,
        &DissipationSpectrum::Continuous {
            gamma: &gamma_fn,
            n_hat: Vec3::Z,
            tail: TailBound::HardCutoff { omega_c },
            breakpoints: &[],
        },
    )?;
    // logarithmic estimate from T1 at zero temperature
    let g_omega0 = gamma_quadrature(
        &SlabSystem::one_slab(d, t)?,
        &Material::conductor(sigma)?,
        omega0,
        &quad_cfg(),
    )?;
    let cos_t = p_hat.dot(Vec3::Z);
    let rate1_zero_t = 0.5 * gamma * gamma * (3.0 - cos_t * cos_t) * g_omega0.gamma * HBAR * omega0;
    let approx =
        slabnoise::entanglement::approximate_entanglement(1.0 / rate1_zero_t, omega0, omega_c)?;
    Ok((exact.e, approx.e))
}

/// Cutoff frequency for the thermal magnetic kernel of a thick slab: the
/// frequency where the skin depth shrinks to the source distance.
pub fn cutoff_frequency(d: f64, sigma: f64) -> f64 {
    1.0 / (d * d * MU_0 * sigma)
}

/// Regime label for report output.
pub fn regime_label(slab: &SlabSystem, material: &Material, omega: f64) -> &'static str {
    AsymptoticRegime::detect(slab, skin_depth(material, omega), 10.0)
        .map(|r| r.label())
        .unwrap_or("transition")
}
