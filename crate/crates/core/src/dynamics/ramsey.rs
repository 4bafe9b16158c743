//! Ramsey interference: two spin rotations separated by a variable delay,
//! with optional frozen-Overhauser averaging, plus the Rabi power scan
//! built on top of it.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consts::HBAR;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::level::LevelSystem;
use crate::params::CavityDotParams;
use crate::pulse::SechPulse;

use super::drive::pulse_drive;
use super::fringe::{fit_decaying_cosine, EnvelopeKind, FringeFit, FringeGuess};
use super::lindblad::evolve;

/// Spin rotation about the optical axis by angle φ, as an instantaneous
/// unitary on the ground-state pair embedded in the four-level space.
///
/// A circularly polarized pulse drives one equal-weight superposition of
/// the two ground states (the bright combination) and leaves the orthogonal
/// one dark; the bright state acquires exp(−iφ), which on the spin Bloch
/// sphere is a rotation about the axis joining the two combinations.
pub fn ideal_rotation(phi: f64) -> Array2<C64> {
    let mut u = Array2::eye(4);
    let c = C64::new((phi / 2.0).cos(), 0.0);
    let s = C64::new(0.0, -(phi / 2.0).sin());
    u[[0, 0]] = c;
    u[[1, 1]] = c;
    u[[0, 1]] = s;
    u[[1, 0]] = s;
    u
}

pub(crate) fn apply_unitary(rho: &DensityMatrix, u: &Array2<C64>) -> DensityMatrix {
    let a = u.dot(rho.as_array());
    let mut udag = Array2::zeros(u.raw_dim());
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            udag[[i, j]] = u[[j, i]].conj();
        }
    }
    DensityMatrix::from_array_unchecked(a.dot(&udag))
}

/// How the two rotation pulses are modeled.
#[derive(Clone, Copy, Debug)]
pub enum RamseyPulses {
    /// Full integration of a pair of sech pulses.
    Sech(SechPulse),
    /// Instantaneous rotations by the given angle. The delta-pulse limit.
    Instantaneous { angle: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RamseySeries {
    /// Pulse separations, ps.
    pub tau: Vec<f64>,
    /// Ensemble-averaged population of the initially occupied ground state
    /// after the second pulse.
    pub population: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Simulates Ramsey fringes: initialize in |g₀⟩, rotate, precess for τ,
/// rotate again, read the |g₀⟩ population. Each Overhauser sample perturbs
/// the ground splitting by a Gaussian draw of width `nuclear_sigma` (μeV);
/// the returned series is the sample average.
pub fn simulate_ramsey(
    system: &LevelSystem,
    p: &CavityDotParams,
    pulses: RamseyPulses,
    tau_grid: &[f64],
    nuclear_sigma: f64,
    n_samples: usize,
    seed: u64,
) -> Result<RamseySeries> {
    if tau_grid.is_empty() {
        return Err(Error::invalid("tau_grid", "at least one delay required"));
    }
    if tau_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("tau_grid", "delays must be strictly increasing"));
    }
    if n_samples == 0 {
        return Err(Error::invalid("n_samples", "at least one sample required"));
    }
    if !(nuclear_sigma.is_finite() && nuclear_sigma >= 0.0) {
        return Err(Error::invalid("nuclear_sigma", "must be finite and ≥ 0"));
    }

    let mut warnings = Vec::new();
    if let RamseyPulses::Sech(pulse) = &pulses {
        let overlap = 2.0 * pulse.fwhm();
        if tau_grid.iter().any(|&t| t < overlap) {
            warnings.push(format!(
                "pulse overlap: some delays are below twice the pulse FWHM ({overlap:.1} ps)"
            ));
        }
    }

    // Pre-drawn Overhauser shifts so the result is independent of the
    // parallel schedule.
    let shifts: Vec<f64> = if nuclear_sigma == 0.0 {
        vec![0.0; n_samples]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, nuclear_sigma).expect("valid width");
        (0..n_samples).map(|_| normal.sample(&mut rng)).collect()
    };

    let enhanced = system.with_cavity_modified_decay(p);
    let per_sample: Vec<Vec<f64>> = shifts
        .par_iter()
        .map(|&shift| {
            let sys = enhanced.with_ground_splitting(enhanced.ground_splitting + shift);
            match &pulses {
                RamseyPulses::Instantaneous { angle } => {
                    ramsey_instantaneous(&sys, *angle, tau_grid)
                }
                RamseyPulses::Sech(pulse) => ramsey_sech(&sys, pulse, tau_grid),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut population = vec![0.0; tau_grid.len()];
    for sample in &per_sample {
        for (acc, v) in population.iter_mut().zip(sample) {
            *acc += v;
        }
    }
    for v in &mut population {
        *v /= n_samples as f64;
    }
    Ok(RamseySeries { tau: tau_grid.to_vec(), population, warnings })
}

fn ramsey_instantaneous(
    system: &LevelSystem,
    angle: f64,
    tau_grid: &[f64],
) -> Result<Vec<f64>> {
    let u = ideal_rotation(angle);
    let rho_start = apply_unitary(&DensityMatrix::basis_state(4, 0), &u);
    let t_end = *tau_grid.last().expect("non-empty");
    if t_end == 0.0 {
        let rho = apply_unitary(&rho_start, &u);
        return Ok(vec![rho.population(0); tau_grid.len()]);
    }
    let traj = evolve(&rho_start, system, None, (0.0, t_end), 1e-10, tau_grid)?;
    Ok(traj
        .states
        .iter()
        .map(|rho| apply_unitary(rho, &u).population(0))
        .collect())
}

fn ramsey_sech(system: &LevelSystem, pulse: &SechPulse, tau_grid: &[f64]) -> Result<Vec<f64>> {
    let fwhm = pulse.fwhm();
    let lead = 4.0 * fwhm;
    // Residual trion population after a far-detuned pulse is tiny, but let
    // it recombine before reading out.
    let decay_pad = (3.0 * HBAR / system.min_trion_decay().max(1e-6)).min(2_000.0);
    tau_grid
        .iter()
        .map(|&tau| {
            let first = SechPulse { center_time: 0.0, ..*pulse };
            let second = SechPulse { center_time: tau, ..*pulse };
            let drive = pulse_drive(system, &[first, second])?;
            let t_end = tau + lead + decay_pad;
            let traj = evolve(
                &DensityMatrix::basis_state(4, 0),
                system,
                Some(&drive),
                (-lead, t_end),
                1e-9,
                &[t_end],
            )?;
            Ok(traj.states[0].population(0))
        })
        .collect()
}

/// One point of a Rabi power scan.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RabiScanPoint {
    pub power: f64,
    /// Envelope area π·Ω₀/σ of the scanned pulse, rad.
    pub pulse_area: f64,
    /// Fitted fringe amplitude after the high-power damping factor.
    pub fringe_amplitude: f64,
}

#[derive(Clone, Debug)]
pub struct RabiScanConfig {
    /// Relative powers; the peak Rabi rate is `power_to_rabi·√power`.
    pub powers: Vec<f64>,
    pub power_to_rabi: f64,
    /// Delay window (start, stop, points) for the fringe fit.
    pub tau_window: (f64, f64, usize),
    /// Exponential damping rate of the fringe amplitude per radian of pulse
    /// area, modeling high-power decoherence.
    pub damping_per_area: f64,
}

/// Scans the Ramsey fringe amplitude against pulse power.
pub fn rabi_scan(
    system: &LevelSystem,
    p: &CavityDotParams,
    pulse_template: &SechPulse,
    config: &RabiScanConfig,
) -> Result<Vec<RabiScanPoint>> {
    if config.powers.iter().any(|&x| x < 0.0) {
        return Err(Error::invalid("powers", "must be ≥ 0"));
    }
    let (t0, t1, n) = config.tau_window;
    if !(t1 > t0 && n >= 8) {
        return Err(Error::invalid("tau_window", "need an increasing window with ≥ 8 points"));
    }
    let tau_grid: Vec<f64> =
        (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect();
    let larmor = system.ground_splitting / HBAR;

    config
        .powers
        .par_iter()
        .map(|&power| {
            let rabi = config.power_to_rabi * power.sqrt();
            let pulse = SechPulse { rabi_peak: rabi, ..*pulse_template };
            let series = simulate_ramsey(
                system,
                p,
                RamseyPulses::Sech(pulse),
                &tau_grid,
                0.0,
                1,
                0,
            )?;
            let guess = FringeGuess {
                frequency: larmor,
                ..FringeGuess::from_series(&series.tau, &series.population)
            };
            let fit = fit_decaying_cosine(
                &series.tau,
                &series.population,
                &guess,
                EnvelopeKind::Exponential,
            )?;
            let area = pulse.area();
            Ok(RabiScanPoint {
                power,
                pulse_area: area,
                fringe_amplitude: fit.amplitude * (-config.damping_per_area * area).exp(),
            })
        })
        .collect()
}

/// Fits a measured Ramsey series to a decaying cosine at the Larmor
/// frequency guess.
pub fn fit_ramsey_series(
    system: &LevelSystem,
    series: &RamseySeries,
    envelope: EnvelopeKind,
) -> Result<FringeFit> {
    let guess = FringeGuess {
        frequency: system.ground_splitting / HBAR,
        ..FringeGuess::from_series(&series.tau, &series.population)
    };
    fit_decaying_cosine(&series.tau, &series.population, &guess, envelope)
}
