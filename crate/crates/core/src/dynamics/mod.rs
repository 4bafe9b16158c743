//! Lindblad engine for the four-level Voigt system and the simulations
//! built on it: optical pumping, Ramsey fringes, Rabi power scans, and
//! cavity-modified rotation scans.
//!
//! All simulations integrate in a rotating frame (the drive carrier, or the
//! mean transition energy when undriven); Hamiltonians are in μeV and rates
//! convert to ps⁻¹ through ħ once, inside the master-equation right-hand
//! side.

pub mod drive;
pub mod fringe;
pub mod integrator;
pub mod lindblad;
pub mod pumping;
pub mod ramsey;
pub mod rotation;

pub use drive::{
    cavity_filtered_envelope, cavity_filtered_field, cw_drive, pulse_drive, DriveComponent,
    DriveField,
};
pub use fringe::{fit_decaying_cosine, EnvelopeKind, FringeFit, FringeGuess};
pub use integrator::{integrate_adaptive, integrate_fixed, Rk45Options};
pub use lindblad::{
    decay_channels, evolve, evolve_with_channels, hamiltonian_at, lindblad_rhs, DecayChannel,
    ObservableSeries, Trajectory,
};
pub use pumping::{simulate_pumping, PumpingOptions, PumpingResult};
pub use ramsey::{
    fit_ramsey_series, ideal_rotation, rabi_scan, simulate_ramsey, RabiScanConfig,
    RabiScanPoint, RamseyPulses, RamseySeries,
};
pub use rotation::{
    fidelity_purity, rotation_pulse, rotation_scan, RotationScan, RotationScanPoint,
};
