//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("rotation-angle calibration is undefined at zero detuning")]
    UndefinedCalibration,

    #[error("no zero crossing found in window [{lo}, {hi}] μeV")]
    CrossingNotFound { lo: f64, hi: f64 },

    #[error("ambiguous zero crossings in window [{lo}, {hi}] μeV: {candidates:?}")]
    CrossingAmbiguous {
        lo: f64,
        hi: f64,
        candidates: Vec<f64>,
    },

    #[error("invalid fit problem: {0}")]
    InvalidProblem(String),

    #[error("fit did not converge: {reason}")]
    FitNotConverged { reason: String, last_params: Vec<f64> },

    #[error("integration failure at t = {t} ps: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error(
        "FFT grid too coarse: pulse bandwidth {bandwidth} ps⁻¹ exceeds half the \
         sampling bandwidth {nyquist} ps⁻¹"
    )]
    Aliasing { bandwidth: f64, nyquist: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

/// Require a finite value; the error names the offending parameter.
pub fn ensure_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(name, format!("must be finite, got {value}")))
    }
}
