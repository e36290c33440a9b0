//! CODATA 2018 physical constants, frozen so numerical outputs are
//! reproducible bit-for-bit across builds.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K (exact in the 2019 SI).
pub const K_B: f64 = 1.380_649e-23;

/// Vacuum permeability, H/m.
pub const MU_0: f64 = 1.256_637_062_12e-6;

/// Elementary charge, C (exact in the 2019 SI).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Immutable bundle of the constants above, for callers that want to pass
/// them around as a value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub mu_0: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: HBAR,
    k_b: K_B,
    mu_0: MU_0,
};
