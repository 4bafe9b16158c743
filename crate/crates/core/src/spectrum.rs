//! Spectral data containers shared by the reflectivity model, the fitter,
//! and file I/O.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Measurement polarization attached to a spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasPolarization {
    H,
    V,
    Circular,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub temperature_k: Option<f64>,
    pub polarization: Option<MeasPolarization>,
    pub bias_v: Option<f64>,
}

/// Real-valued spectrum on a strictly increasing energy grid (μeV).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: SpectrumMeta,
}

impl Spectrum {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, meta: SpectrumMeta) -> Result<Self> {
        check_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "spectrum grid has {} points but values has {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "all signal values must be finite"));
        }
        Ok(Spectrum { grid, values, meta })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index and value of the largest |signal|.
    pub fn peak_abs(&self) -> (usize, f64) {
        let mut idx = 0;
        let mut best = 0.0f64;
        for (i, v) in self.values.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                idx = i;
            }
        }
        (idx, best)
    }
}

/// Complex frequency-domain response on a strictly increasing grid (μeV).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexResponse {
    pub grid: Vec<f64>,
    pub values: Vec<C64>,
}

impl ComplexResponse {
    pub fn new(grid: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        check_grid(&grid)?;
        if grid.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "response grid has {} points but values has {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("values", "all response values must be finite"));
        }
        Ok(ComplexResponse { grid, values })
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::invalid("grid", "all grid points must be finite"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("grid", "grid must be strictly increasing"));
    }
    Ok(())
}

/// Uniform grid of `n` points spanning [lo, hi] inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| lo + k as f64 * step).collect()
}
