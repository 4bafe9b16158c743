//! Four-level structure of a negatively charged dot in a transverse (Voigt)
//! magnetic field: two electron ground states split by δ_e and two trion
//! states split by δ_h, forming two Λ systems with four allowed linear
//! dipoles.
//!
//! Level indices used everywhere in this crate:
//!
//! lower en.  0 = |g₀⟩ (energy −δ_e/2)    2 = |t₀⟩ (energy ω̄ − δ_h/2)
//! higher en. 1 = |g₁⟩ (energy +δ_e/2)    3 = |t₁⟩ (energy ω̄ + δ_h/2)
//!
//! Transition indices: 0 = g₀→t₀ (inner), 1 = g₀→t₁ (outer),
//! 2 = g₁→t₀ (outer), 3 = g₁→t₁ (inner). The "outer" pair is split by
//! δ_e + δ_h about the mean transition energy, the "inner" pair by
//! δ_e − δ_h.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::params::{CavityDotParams, MagneticFieldConfig};

pub const N_LEVELS: usize = 4;
pub const N_TRANSITIONS: usize = 4;

/// One optical transition of the four-level system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    /// Ground-state level index (0 or 1).
    pub lower: usize,
    /// Trion level index (2 or 3).
    pub upper: usize,
    /// Transition energy, μeV.
    pub energy: f64,
    /// Linear dipole direction, rad, measured from the cavity (V) axis.
    pub polarization_angle: f64,
    /// Internal phase of the dipole matrix element, rad. The two dipoles
    /// sharing a trion are orthogonal in direction *and* in quadrature; the
    /// relative quarter-wave phase is what makes a circularly polarized
    /// drive close a Raman loop through both trions with the correct sign.
    pub dipole_phase: f64,
    /// Radiative decay rate of this branch, μeV.
    pub decay_rate: f64,
}

impl TransitionRecord {
    /// Complex Jones vector of the dipole in the (V, H) basis.
    pub fn jones(&self) -> [C64; 2] {
        let ph = C64::from_polar(1.0, self.dipole_phase);
        [ph * self.polarization_angle.cos(), ph * self.polarization_angle.sin()]
    }

    /// Complex projection of the dipole on a field polarization vector.
    pub fn projection(&self, field_jones: [C64; 2]) -> C64 {
        let d = self.jones();
        d[0] * field_jones[0] + d[1] * field_jones[1]
    }
}

/// The four-level Voigt-geometry system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSystem {
    /// Electron Zeeman splitting δ_e, μeV.
    pub ground_splitting: f64,
    /// Trion (hole) Zeeman splitting δ_h, μeV.
    pub trion_splitting: f64,
    /// Mean optical transition energy ω̄, μeV.
    pub transition_energy: f64,
    /// Dot linear-polarization axis relative to the cavity V axis, rad.
    pub dipole_axis_angle: f64,
    /// Exactly four transitions, indexed as documented at module level.
    pub transitions: Vec<TransitionRecord>,
}

/// Indices of the inner transitions (energies ω̄ ± (δ_e−δ_h)/2).
pub const INNER: [usize; 2] = [0, 3];
/// Indices of the outer transitions (energies ω̄ ± (δ_e+δ_h)/2).
pub const OUTER: [usize; 2] = [1, 2];

/// Constructs the four-level system for a given field configuration.
///
/// Each trion decays to both ground states; before any cavity modification
/// both branches carry rate Γ₀/2. Outer transitions carry the dipole axis
/// angle, inner transitions the perpendicular direction.
pub fn build_level_system(
    field: &MagneticFieldConfig,
    transition_energy: f64,
    dipole_axis_angle: f64,
    gamma_0: f64,
) -> Result<LevelSystem> {
    field.validate()?;
    ensure_finite("transition_energy", transition_energy)?;
    ensure_finite("dipole_axis_angle", dipole_axis_angle)?;
    ensure_finite("gamma_0", gamma_0)?;
    if gamma_0 <= 0.0 {
        return Err(Error::invalid("gamma_0", "radiative rate must be > 0"));
    }

    let de = field.electron_splitting();
    let dh = field.hole_splitting();
    let half = gamma_0 / 2.0;
    let theta = dipole_axis_angle;
    let quarter = -std::f64::consts::FRAC_PI_2;

    let transitions = vec![
        // g0 -> t0, inner
        TransitionRecord {
            lower: 0,
            upper: 2,
            energy: transition_energy + (de - dh) / 2.0,
            polarization_angle: theta + std::f64::consts::FRAC_PI_2,
            dipole_phase: quarter,
            decay_rate: half,
        },
        // g0 -> t1, outer
        TransitionRecord {
            lower: 0,
            upper: 3,
            energy: transition_energy + (de + dh) / 2.0,
            polarization_angle: theta,
            dipole_phase: 0.0,
            decay_rate: half,
        },
        // g1 -> t0, outer
        TransitionRecord {
            lower: 1,
            upper: 2,
            energy: transition_energy - (de + dh) / 2.0,
            polarization_angle: theta,
            dipole_phase: 0.0,
            decay_rate: half,
        },
        // g1 -> t1, inner
        TransitionRecord {
            lower: 1,
            upper: 3,
            energy: transition_energy - (de - dh) / 2.0,
            polarization_angle: theta + std::f64::consts::FRAC_PI_2,
            dipole_phase: quarter,
            decay_rate: half,
        },
    ];

    Ok(LevelSystem {
        ground_splitting: de,
        trion_splitting: dh,
        transition_energy,
        dipole_axis_angle,
        transitions,
    })
}

impl LevelSystem {
    /// Level energies [g0, g1, t0, t1] in μeV, grounds centered on zero.
    pub fn level_energies(&self) -> [f64; N_LEVELS] {
        [
            -self.ground_splitting / 2.0,
            self.ground_splitting / 2.0,
            self.transition_energy - self.trion_splitting / 2.0,
            self.transition_energy + self.trion_splitting / 2.0,
        ]
    }

    /// Total decay rate (μeV) of trion level 2 or 3: the sum of its two
    /// branch rates.
    pub fn trion_total_decay(&self, trion_level: usize) -> f64 {
        self.transitions
            .iter()
            .filter(|t| t.upper == trion_level)
            .map(|t| t.decay_rate)
            .sum()
    }

    /// Smallest total trion decay rate, μeV. Sets the slowest recombination
    /// timescale ħ/Γ used when padding readouts.
    pub fn min_trion_decay(&self) -> f64 {
        f64::min(self.trion_total_decay(2), self.trion_total_decay(3))
    }

    /// Copy of the system with each branch rate Purcell-enhanced by the
    /// heuristic cavity factor, weighted by the cos² projection of the
    /// branch dipole on the cavity (V) axis.
    pub fn with_cavity_modified_decay(&self, p: &CavityDotParams) -> LevelSystem {
        let mut out = self.clone();
        for t in &mut out.transitions {
            let delta = t.energy - p.omega_c;
            let weight = t.polarization_angle.cos().powi(2);
            t.decay_rate += weight * cavity_enhancement(p, delta);
        }
        out
    }

    /// Copy with the ground splitting replaced and the four transition
    /// energies recomputed. Decay rates and polarizations are kept.
    pub fn with_ground_splitting(&self, splitting: f64) -> LevelSystem {
        let mut out = self.clone();
        out.ground_splitting = splitting;
        let (de, dh, mean) = (splitting, self.trion_splitting, self.transition_energy);
        out.transitions[0].energy = mean + (de - dh) / 2.0;
        out.transitions[1].energy = mean + (de + dh) / 2.0;
        out.transitions[2].energy = mean - (de + dh) / 2.0;
        out.transitions[3].energy = mean - (de - dh) / 2.0;
        out
    }

    /// Copy with both Zeeman splittings suppressed (all four transitions
    /// degenerate at the mean energy). Used by scans that ignore precession
    /// during the pulse.
    pub fn with_suppressed_splittings(&self) -> LevelSystem {
        let mut out = self.clone();
        out.ground_splitting = 0.0;
        out.trion_splitting = 0.0;
        for t in &mut out.transitions {
            t.energy = self.transition_energy;
        }
        out
    }
}

/// Cavity contribution g_c²·Γ_c/(Γ_c² + δ²) to a decay rate, μeV.
fn cavity_enhancement(p: &CavityDotParams, delta: f64) -> f64 {
    p.g_c * p.g_c * p.gamma_c / (p.gamma_c * p.gamma_c + delta * delta)
}

/// Heuristic cavity-modified spontaneous-emission rate
/// Γ₀ → Γ₀ + g_c²·Γ_c/(Γ_c² + δ²), where δ is the emitter-cavity detuning.
pub fn cavity_modified_decay_rate(gamma_0: f64, p: &CavityDotParams, delta: f64) -> f64 {
    gamma_0 + cavity_enhancement(p, delta)
}
