//! Global fitting of differential V-polarization spectra across a
//! temperature series: zero-crossing identification per dataset, then a
//! shared-parameter damped least-squares fit of the truncated ΔR model.
//!
//! Shared across all datasets: g_C, Γ_C, Γ_D, φ, and the overall amplitude.
//! Per dataset: ω_C, ω_D, and the bias shift δω.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lm::{levenberg_marquardt, LmConfig};
use crate::params::CavityDotParams;
use crate::reflectivity::expanded_parts;
use crate::spectrum::Spectrum;

/// Parameters common to every dataset in the series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharedParams {
    pub g_c: f64,
    pub gamma_c: f64,
    pub gamma_d: f64,
    pub phi: f64,
    pub amplitude: f64,
}

/// Parameters specific to one dataset (one temperature).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetParams {
    pub omega_c: f64,
    pub omega_d: f64,
    pub delta_omega: f64,
}

/// Inclusive (min, max) box for each parameter; min == max freezes it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharedBounds {
    pub g_c: (f64, f64),
    pub gamma_c: (f64, f64),
    pub gamma_d: (f64, f64),
    pub phi: (f64, f64),
    pub amplitude: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetBounds {
    pub omega_c: (f64, f64),
    pub omega_d: (f64, f64),
    pub delta_omega: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitTolerance {
    pub step: f64,
    pub residual: f64,
}

impl Default for FitTolerance {
    fn default() -> Self {
        FitTolerance { step: 1e-10, residual: 1e-10 }
    }
}

/// A global fit over one or more spectra.
#[derive(Clone, Debug)]
pub struct FitProblem {
    pub datasets: Vec<Spectrum>,
    pub initial_shared: SharedParams,
    pub initial_per_dataset: Vec<DatasetParams>,
    pub shared_bounds: SharedBounds,
    /// Applied to every dataset's (ω_C, ω_D, δω) relative to nothing —
    /// absolute boxes, one per dataset.
    pub dataset_bounds: Vec<DatasetBounds>,
    /// Per-dataset zero crossings (ω_C⁰, ω_D⁰). When present, each adds two
    /// soft-constraint residuals pulling the model to zero there.
    pub crossings: Option<Vec<(f64, f64)>>,
    /// Weight of each crossing residual relative to unit data weights.
    pub penalty_weight: f64,
    pub tolerance: FitTolerance,
    pub max_iterations: usize,
}

impl FitProblem {
    /// Problem with default tolerances, no crossing constraints, and the
    /// default penalty weight.
    pub fn new(
        datasets: Vec<Spectrum>,
        initial_shared: SharedParams,
        initial_per_dataset: Vec<DatasetParams>,
        shared_bounds: SharedBounds,
        dataset_bounds: Vec<DatasetBounds>,
    ) -> Self {
        FitProblem {
            datasets,
            initial_shared,
            initial_per_dataset,
            shared_bounds,
            dataset_bounds,
            crossings: None,
            penalty_weight: 10.0,
            tolerance: FitTolerance::default(),
            max_iterations: 200,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FitResult {
    pub shared: SharedParams,
    pub per_dataset: Vec<DatasetParams>,
    /// Covariance in packed order [g_C, Γ_C, Γ_D, φ, amp,
    /// (ω_C, ω_D, δω)·K].
    #[serde(skip)]
    pub covariance: Array2<f64>,
    pub standard_errors: Vec<f64>,
    pub residual_norm: f64,
    pub per_dataset_residual_norms: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    #[serde(skip)]
    pub objective_trace: Vec<f64>,
    pub rank: usize,
    pub rank_deficient: bool,
    pub warnings: Vec<String>,
}

pub const N_SHARED: usize = 5;
pub const N_PER_DATASET: usize = 3;

/// The truncated model evaluated at one energy.
pub fn model_value(omega: f64, shared: &SharedParams, ds: &DatasetParams) -> f64 {
    let (dr0, dr1) = expanded_parts(
        omega,
        shared.g_c,
        shared.gamma_c,
        shared.gamma_d,
        ds.omega_c,
        ds.omega_d,
        shared.phi,
    );
    shared.amplitude * (dr0 + ds.delta_omega * dr1)
}

fn unpack(params: &[f64], n_datasets: usize) -> (SharedParams, Vec<DatasetParams>) {
    let shared = SharedParams {
        g_c: params[0],
        gamma_c: params[1],
        gamma_d: params[2],
        phi: params[3],
        amplitude: params[4],
    };
    let per = (0..n_datasets)
        .map(|k| {
            let o = N_SHARED + k * N_PER_DATASET;
            DatasetParams {
                omega_c: params[o],
                omega_d: params[o + 1],
                delta_omega: params[o + 2],
            }
        })
        .collect();
    (shared, per)
}

/// Runs the global fit. Returns a non-converged result (not an error) when
/// the iteration budget is exhausted; a singular Jacobian is reported via
/// `rank_deficient` with pseudo-inverse covariance.
pub fn fit_global(problem: &FitProblem) -> Result<FitResult> {
    let k = problem.datasets.len();
    if k == 0 {
        return Err(Error::InvalidProblem("no datasets".into()));
    }
    if problem.initial_per_dataset.len() != k || problem.dataset_bounds.len() != k {
        return Err(Error::InvalidProblem(format!(
            "{} datasets but {} per-dataset initials and {} bounds",
            k,
            problem.initial_per_dataset.len(),
            problem.dataset_bounds.len()
        )));
    }
    if let Some(crossings) = &problem.crossings {
        if crossings.len() != k {
            return Err(Error::InvalidProblem(format!(
                "{} datasets but {} crossing pairs",
                k,
                crossings.len()
            )));
        }
    }
    for (i, ds) in problem.datasets.iter().enumerate() {
        if ds.is_empty() {
            return Err(Error::InvalidProblem(format!("dataset {i} is empty")));
        }
    }

    let n_points: usize = problem.datasets.iter().map(|d| d.len()).sum();
    let n_penalty = if problem.crossings.is_some() { 2 * k } else { 0 };
    let n_residuals = n_points + n_penalty;

    let mut x0 = Vec::with_capacity(N_SHARED + k * N_PER_DATASET);
    let s = &problem.initial_shared;
    x0.extend_from_slice(&[s.g_c, s.gamma_c, s.gamma_d, s.phi, s.amplitude]);
    let mut bounds = Vec::with_capacity(x0.capacity());
    let b = &problem.shared_bounds;
    bounds.extend_from_slice(&[b.g_c, b.gamma_c, b.gamma_d, b.phi, b.amplitude]);
    for (init, bx) in problem.initial_per_dataset.iter().zip(&problem.dataset_bounds) {
        x0.extend_from_slice(&[init.omega_c, init.omega_d, init.delta_omega]);
        bounds.extend_from_slice(&[bx.omega_c, bx.omega_d, bx.delta_omega]);
    }

    let datasets = problem.datasets.clone();
    let crossings = problem.crossings.clone();
    let pw = problem.penalty_weight;
    let residual_fn = move |params: &[f64], out: &mut [f64]| {
        let (shared, per) = unpack(params, k);
        let mut idx = 0;
        for (ds, dp) in datasets.iter().zip(&per) {
            for (&w, &y) in ds.grid.iter().zip(&ds.values) {
                out[idx] = model_value(w, &shared, dp) - y;
                idx += 1;
            }
        }
        if let Some(cross) = &crossings {
            for ((wc0, wd0), dp) in cross.iter().zip(&per) {
                out[idx] = pw * model_value(*wc0, &shared, dp);
                out[idx + 1] = pw * model_value(*wd0, &shared, dp);
                idx += 2;
            }
        }
    };

    let cfg = LmConfig {
        max_iterations: problem.max_iterations,
        step_tol: problem.tolerance.step,
        residual_tol: problem.tolerance.residual,
        ..Default::default()
    };
    let report = levenberg_marquardt(residual_fn, n_residuals, &x0, &bounds, &cfg)?;

    let (shared, per_dataset) = unpack(&report.params, k);
    let mut per_norms = Vec::with_capacity(k);
    let mut offset = 0;
    for ds in &problem.datasets {
        let slice = &report.final_residuals[offset..offset + ds.len()];
        per_norms.push(slice.iter().map(|v| v * v).sum::<f64>().sqrt());
        offset += ds.len();
    }
    let mut warnings = Vec::new();
    if report.rank_deficient {
        warnings.push(format!(
            "rank-deficient Jacobian (rank {} of {} free parameters); covariance uses a pseudo-inverse",
            report.rank,
            report.covariance.nrows()
        ));
    }
    if !report.converged {
        warnings.push(format!(
            "iteration budget of {} exhausted before convergence",
            problem.max_iterations
        ));
    }

    Ok(FitResult {
        shared,
        per_dataset,
        covariance: report.covariance,
        standard_errors: report.standard_errors,
        residual_norm: report.residual_norm,
        per_dataset_residual_norms: per_norms,
        converged: report.converged,
        iterations: report.iterations,
        objective_trace: report.objective_trace,
        rank: report.rank,
        rank_deficient: report.rank_deficient,
        warnings,
    })
}

/// Finds the sign-change zero crossing inside each search window by linear
/// interpolation. Errors if a window contains no crossing or more than one.
pub fn find_zero_crossings(
    spectrum: &Spectrum,
    windows: [(f64, f64); 2],
) -> Result<(f64, f64)> {
    let mut out = [0.0f64; 2];
    for (slot, &(lo, hi)) in windows.iter().enumerate() {
        let roots = crossings_in_window(spectrum, lo, hi);
        match roots.len() {
            0 => return Err(Error::CrossingNotFound { lo, hi }),
            1 => out[slot] = roots[0],
            _ => return Err(Error::CrossingAmbiguous { lo, hi, candidates: roots }),
        }
    }
    Ok((out[0], out[1]))
}

/// All linearly interpolated sign-change roots inside [lo, hi].
pub fn crossings_in_window(spectrum: &Spectrum, lo: f64, hi: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    for i in 0..spectrum.len().saturating_sub(1) {
        let (x0, x1) = (spectrum.grid[i], spectrum.grid[i + 1]);
        if x1 < lo || x0 > hi {
            continue;
        }
        let (y0, y1) = (spectrum.values[i], spectrum.values[i + 1]);
        if y0 == 0.0 {
            if x0 >= lo && x0 <= hi {
                roots.push(x0);
            }
            continue;
        }
        if y0 * y1 < 0.0 {
            let root = x0 - y0 * (x1 - x0) / (y1 - y0);
            if root >= lo && root <= hi {
                roots.push(root);
            }
        }
    }
    roots
}

/// Synthesizes a truncated-model spectrum with seeded additive Gaussian
/// noise of the given RMS. Bit-reproducible for a fixed seed.
pub fn synth_spectrum(
    p: &CavityDotParams,
    grid: &[f64],
    noise_rms: f64,
    seed: u64,
) -> Result<Spectrum> {
    if !(noise_rms.is_finite() && noise_rms >= 0.0) {
        return Err(Error::invalid("noise_rms", "must be finite and ≥ 0"));
    }
    let mut spectrum = crate::reflectivity::delta_r_v_expanded(grid, p)?;
    if noise_rms > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_rms).expect("valid noise width");
        for v in &mut spectrum.values {
            *v += normal.sample(&mut rng);
        }
    }
    Ok(spectrum)
}
