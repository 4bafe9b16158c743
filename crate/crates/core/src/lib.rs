//! Simulation and fitting toolkit for a single-electron quantum-dot spin
//! qubit coupled to a photonic-crystal cavity.
//!
//! The crate is organized around the measurements such a device supports:
//!
//! - [`reflectivity`] — scattering/Green's-function model of the differential
//!   reflectivity of the coupled cavity-dot system, for both polarizations.
//! - [`fit`] — zero-crossing identification and a global shared-parameter
//!   least-squares fit of the vertical-polarization ΔR across a temperature
//!   series.
//! - [`dynamics`] — Lindblad engine for the four-level Voigt system: optical
//!   pumping, Ramsey fringes, Rabi power scans, and cavity-modified rotation
//!   fidelity.
//!
//! Units throughout: energies in μeV, times in ps, magnetic field in T.
//! Conversion between the two is `ħ` = [`consts::HBAR`] μeV·ps.

pub mod consts;
pub mod density;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod level;
pub mod linalg;
pub mod lm;
pub mod params;
pub mod pulse;
pub mod reflectivity;
pub mod spectrum;

pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use level::{build_level_system, LevelSystem, TransitionRecord};
pub use params::{CavityDotParams, MagneticFieldConfig};
pub use pulse::{sech_envelope, sech_rotation_angle, FieldPolarization, SechPulse};
pub use spectrum::{MeasPolarization, Spectrum, SpectrumMeta};
