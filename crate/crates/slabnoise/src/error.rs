use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by the numerical operations in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions. Carries the worst
    /// remaining subinterval and its local error estimate.
    #[error("quadrature did not converge after {subdivisions} subdivisions; worst interval [{lo:e}, {hi:e}] with error {err:e}")]
    NonConvergence {
        subdivisions: usize,
        lo: f64,
        hi: f64,
        err: f64,
    },

    /// Tail metadata implies the improper integral does not exist.
    #[error("divergent integrand tail: {0}")]
    DivergentTail(String),

    #[error("sample grid too coarse near omega = {omega:e} rad/s")]
    GridTooCoarse { omega: f64 },

    #[error("spin-locked relaxation requested without an RF field in the context")]
    MissingRf,

    #[error("negative dissipation input: {0}")]
    NegativeInput(String),

    #[error("ODE step size underflow at t = {t:e} s (dt = {dt:e})")]
    StepUnderflow { t: f64, dt: f64 },

    /// Coefficient denominator nearly vanished relative to its leading term.
    #[error("near-resonant boundary system at rho = {rho:e} (|den|/|leading| = {ratio:e})")]
    NearResonance { rho: f64, ratio: f64 },
}

/// Non-fatal conditions attached to results instead of aborting them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Warning {
    /// An asymptotic regime was requested outside its validity inequalities.
    RegimeOutsideValidity,
    /// |K - 1| is large; the interpolation formula assumes K close to one.
    PermeabilityNotUnity,
    /// Im(K)/Re(K) > 0.1; the integrand keeps only the two leading orders in Im(mu).
    PermeabilityLossLarge,
    /// Entanglement probability above 0.1; first-order perturbation theory is strained.
    PerturbativeValidity,
    /// Cutoff ratio omega_c/omega_0 below 10; the logarithmic approximation is crude.
    CutoffRatioLow,
}
