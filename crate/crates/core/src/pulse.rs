//! Hyperbolic-secant optical pulses and the analytic rotation-angle
//! calibration they admit.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::consts::HBAR;
use crate::error::{Error, Result};

/// Field polarization in the cavity frame. `V` is the cavity axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldPolarization {
    CircularPlus,
    CircularMinus,
    H,
    V,
}

impl FieldPolarization {
    /// Jones vector in the (V, H) basis.
    pub fn jones(&self) -> [C64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            FieldPolarization::V => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            FieldPolarization::H => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            FieldPolarization::CircularPlus => [C64::new(s, 0.0), C64::new(0.0, s)],
            FieldPolarization::CircularMinus => [C64::new(s, 0.0), C64::new(0.0, -s)],
        }
    }
}

/// `2·arccosh(2)`: temporal FWHM of a sech envelope times its bandwidth σ.
pub const SECH_FWHM_BANDWIDTH: f64 = 2.633_915_793_849_633_4;

/// A sech optical pulse Ω₀·sech(σ(t−t₀)) at carrier ω̄ + Δ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SechPulse {
    /// Peak Rabi amplitude Ω₀ of one dipole-allowed transition at unit
    /// polarization projection, ps⁻¹ (angular). Enters the Hamiltonian as
    /// an off-diagonal element ħΩ/2.
    pub rabi_peak: f64,
    /// Bandwidth σ, ps⁻¹ (angular).
    pub bandwidth: f64,
    /// Carrier detuning Δ relative to the mean transition energy, μeV.
    pub detuning: f64,
    /// Envelope center t₀, ps.
    pub center_time: f64,
    pub polarization: FieldPolarization,
}

impl SechPulse {
    /// Builds a pulse from its temporal FWHM in ps.
    pub fn from_fwhm(
        rabi_peak: f64,
        fwhm: f64,
        detuning: f64,
        center_time: f64,
        polarization: FieldPolarization,
    ) -> Result<Self> {
        if !(fwhm.is_finite() && fwhm > 0.0) {
            return Err(Error::invalid("fwhm", "must be finite and > 0"));
        }
        Ok(SechPulse {
            rabi_peak,
            bandwidth: SECH_FWHM_BANDWIDTH / fwhm,
            detuning,
            center_time,
            polarization,
        })
    }

    /// Temporal FWHM, ps.
    pub fn fwhm(&self) -> f64 {
        SECH_FWHM_BANDWIDTH / self.bandwidth
    }

    /// Envelope area ∫Ω dt = π·Ω₀/σ, rad.
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.rabi_peak / self.bandwidth
    }
}

/// Complex pulse amplitude at time `t` in the frame rotating at the mean
/// transition energy: Ω₀·sech(σ(t−t₀))·exp(−i(Δ/ħ)t). The magnitude is the
/// instantaneous Rabi envelope; the phase carries the detuning of the
/// carrier ω̄ + Δ relative to the frame.
pub fn sech_envelope(pulse: &SechPulse, t: f64) -> C64 {
    let env = pulse.rabi_peak / (pulse.bandwidth * (t - pulse.center_time)).cosh();
    let phase = -pulse.detuning / HBAR * t;
    C64::from_polar(env, phase)
}

/// Analytic spin-rotation angle φ = 2·arctan(ħσ/Δ) of a detuned sech pulse
/// whose envelope area corresponds to a full return of the optical
/// population (a "2π" sech pulse). Used to seed pulse calibration; the
/// dynamics module verifies it by integration.
pub fn sech_rotation_angle(bandwidth: f64, detuning: f64) -> Result<f64> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::invalid("bandwidth", "must be finite and > 0"));
    }
    if detuning == 0.0 {
        return Err(Error::UndefinedCalibration);
    }
    Ok(2.0 * (HBAR * bandwidth / detuning).atan())
}
