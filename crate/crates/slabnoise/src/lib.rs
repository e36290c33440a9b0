//! Thermal magnetic noise near conductive and/or permeable slabs.
//!
//! A fluctuating magnetic field accompanies the Johnson currents in any
//! nearby conductor. This crate computes the magnetic dissipation
//! coefficient `Γ(ω)` of one- and two-slab geometries (by adaptive
//! quadrature, by closed-form regime limits, and by a smooth interpolation
//! across the whole design space), assembles the resulting noise spectral
//! densities, and propagates them into spin relaxation times (T1, T2, T1ρ),
//! Bloch dynamics, and zero-temperature reservoir entanglement via
//! Stieltjes transforms.
//!
//! Everything is strict SI with angular frequencies in rad/s. All types are
//! immutable after construction and all operations are pure, so values may
//! be shared freely across threads.

// `!(x > 0.0)` deliberately traps NaN alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod bessel;
pub mod constants;
pub mod entanglement;
pub mod error;
pub mod fields;
pub mod gamma;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod relaxation;
pub mod spectra;

pub use error::{Error, Result, Warning};
pub use linalg::{Mat3, Vec3};
pub use model::{
    skin_depth, thermal_occupation_kernel, Material, SlabConfig, SlabSystem, SpinContext,
};
