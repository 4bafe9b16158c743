//! Lindblad master equation for the four-level system and the trajectory
//! container returned by the integrator.
//!
//! All generators are expressed in energy units (μeV) and divided by ħ once
//! at the end, so dρ/dt is in ps⁻¹:
//!
//!   dρ/dt = (1/ħ)·(−i[H, ρ] + Σ_k Γ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})),
//!   L_k = |lower⟩⟨upper|.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::consts::HBAR;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::level::LevelSystem;

use super::drive::DriveField;
use super::integrator::{integrate_adaptive, Rk45Options};

/// One decay channel L = |lower⟩⟨upper| with rate in μeV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayChannel {
    pub lower: usize,
    pub upper: usize,
    pub rate: f64,
}

/// Right-hand side of the master equation for one Hamiltonian sample.
/// `hamiltonian` is Hermitian in μeV; rates are μeV; the result is dρ/dt in
/// ps⁻¹.
pub fn lindblad_rhs(
    rho: &Array2<C64>,
    hamiltonian: &Array2<C64>,
    decays: &[DecayChannel],
) -> Result<Array2<C64>> {
    let n = rho.nrows();
    if rho.ncols() != n || hamiltonian.nrows() != n || hamiltonian.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "rho is {}x{}, H is {}x{}",
            rho.nrows(),
            rho.ncols(),
            hamiltonian.nrows(),
            hamiltonian.ncols()
        )));
    }
    for d in decays {
        if d.lower >= n || d.upper >= n {
            return Err(Error::DimensionMismatch(format!(
                "decay channel {} -> {} outside dimension {}",
                d.upper, d.lower, n
            )));
        }
        if d.rate < 0.0 {
            return Err(Error::invalid("rate", "decay rates must be ≥ 0"));
        }
    }
    Ok(lindblad_rhs_unchecked(rho, hamiltonian, decays))
}

pub(crate) fn lindblad_rhs_unchecked(
    rho: &Array2<C64>,
    hamiltonian: &Array2<C64>,
    decays: &[DecayChannel],
) -> Array2<C64> {
    let n = rho.nrows();
    let mut out = hamiltonian.dot(rho);
    out.zip_mut_with(&rho.dot(hamiltonian), |a, &b| *a -= b);
    let minus_i = C64::new(0.0, -1.0);
    out.mapv_inplace(|v| v * minus_i);
    for d in decays {
        let (l, u) = (d.lower, d.upper);
        let g = d.rate;
        // Γ·ρ_uu feeds the lower level; the upper row and column decay at Γ/2.
        let feed = g * rho[[u, u]];
        out[[l, l]] += feed;
        for k in 0..n {
            out[[u, k]] -= 0.5 * g * rho[[u, k]];
            out[[k, u]] -= 0.5 * g * rho[[k, u]];
        }
    }
    out.mapv_inplace(|v| v / HBAR);
    out
}

/// Named observable series along a trajectory.
#[derive(Clone, Debug, Default)]
pub struct ObservableSeries {
    pub pop_g0: Vec<f64>,
    pub pop_g1: Vec<f64>,
    pub pop_t0: Vec<f64>,
    pub pop_t1: Vec<f64>,
    /// Ground-state coherence ρ₀₁.
    pub coherence_g: Vec<C64>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub observables: ObservableSeries,
}

impl Trajectory {
    /// Worst trace deviation |Tr ρ − 1| along the trajectory.
    pub fn max_trace_drift(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.trace() - C64::new(1.0, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_hermiticity_deviation(&self) -> f64 {
        self.states.iter().map(|s| s.hermiticity_deviation()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.states.iter().map(|s| s.min_eigenvalue()).fold(f64::INFINITY, f64::min)
    }
}

/// Builds the rotating-frame Hamiltonian of the four-level system at time
/// `t`: diagonal level energies (trions shifted by the drive frame) plus
/// ħ·Ω/2 couplings from every drive component.
pub fn hamiltonian_at(
    system: &LevelSystem,
    drive: Option<&DriveField>,
    t: f64,
    out: &mut Array2<C64>,
) {
    out.fill(C64::new(0.0, 0.0));
    let energies = system.level_energies();
    let frame = drive.map_or(system.transition_energy, |d| d.rotating_frame);
    for (k, &e) in energies.iter().enumerate() {
        let shifted = if k >= 2 { e - frame } else { e };
        out[[k, k]] = C64::new(shifted, 0.0);
    }
    if let Some(drive) = drive {
        for comp in &drive.components {
            let tr = &system.transitions[comp.transition];
            let amp = (comp.amplitude)(t) * (0.5 * HBAR);
            out[[tr.upper, tr.lower]] += amp;
            out[[tr.lower, tr.upper]] += amp.conj();
        }
    }
}

/// Decay channels of the system plus any extras (e.g. ground-state spin
/// relaxation).
pub fn decay_channels(system: &LevelSystem, extra: &[DecayChannel]) -> Vec<DecayChannel> {
    let mut channels: Vec<DecayChannel> = system
        .transitions
        .iter()
        .filter(|t| t.decay_rate > 0.0)
        .map(|t| DecayChannel { lower: t.lower, upper: t.upper, rate: t.decay_rate })
        .collect();
    channels.extend_from_slice(extra);
    channels
}

/// Integrates the master equation over `span`, sampling the state at
/// `sample_times` (sorted, within the span). `tol` is the local error
/// tolerance of the adaptive integrator, bounded to (1e-12, 1e-4).
pub fn evolve(
    rho0: &DensityMatrix,
    system: &LevelSystem,
    drive: Option<&DriveField>,
    span: (f64, f64),
    tol: f64,
    sample_times: &[f64],
) -> Result<Trajectory> {
    evolve_with_channels(rho0, system, drive, &[], span, tol, sample_times)
}

/// [`evolve`] with additional decay channels appended to the system's own.
#[allow(clippy::too_many_arguments)]
pub fn evolve_with_channels(
    rho0: &DensityMatrix,
    system: &LevelSystem,
    drive: Option<&DriveField>,
    extra_channels: &[DecayChannel],
    span: (f64, f64),
    tol: f64,
    sample_times: &[f64],
) -> Result<Trajectory> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::invalid("tol", format!("must lie in (1e-12, 1e-4), got {tol}")));
    }
    rho0.validate()?;
    if rho0.dim() != crate::level::N_LEVELS {
        return Err(Error::DimensionMismatch(format!(
            "four-level evolution needs a 4x4 state, got {}x{}",
            rho0.dim(),
            rho0.dim()
        )));
    }
    let channels = decay_channels(system, extra_channels);
    let mut h = Array2::zeros((4, 4));
    let rhs = |t: f64, rho: &Array2<C64>| {
        hamiltonian_at(system, drive, t, &mut h);
        lindblad_rhs_unchecked(rho, &h, &channels)
    };

    let mut times = Vec::with_capacity(sample_times.len());
    let mut states = Vec::with_capacity(sample_times.len());
    let opts = Rk45Options {
        rel_tol: tol,
        abs_tol: tol,
        h_init: 1e-3,
        h_max: f64::INFINITY,
        h_min: 1e-13,
    };
    integrate_adaptive(
        rhs,
        rho0.as_array().clone(),
        span.0,
        span.1,
        &opts,
        sample_times,
        hermitize,
        |t, y| {
            times.push(t);
            states.push(DensityMatrix::from_array_unchecked(y.clone()));
        },
    )?;

    let mut observables = ObservableSeries::default();
    for s in &states {
        observables.pop_g0.push(s.population(0));
        observables.pop_g1.push(s.population(1));
        observables.pop_t0.push(s.population(2));
        observables.pop_t1.push(s.population(3));
        observables.coherence_g.push(s.coherence(0, 1));
    }
    Ok(Trajectory { times, states, observables })
}

/// Projects onto the Hermitian manifold: ρ ← (ρ + ρ†)/2.
pub(crate) fn hermitize(rho: &mut Array2<C64>) {
    let n = rho.nrows();
    for i in 0..n {
        rho[[i, i]] = C64::new(rho[[i, i]].re, 0.0);
        for j in i + 1..n {
            let avg = 0.5 * (rho[[i, j]] + rho[[j, i]].conj());
            rho[[i, j]] = avg;
            rho[[j, i]] = avg.conj();
        }
    }
}
