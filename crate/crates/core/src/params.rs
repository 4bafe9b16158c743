//! Spectroscopic parameter sets shared by the reflectivity and dynamics
//! modules.

use serde::{Deserialize, Serialize};

use crate::consts::MU_B;
use crate::error::{ensure_finite, Error, Result};

/// All spectroscopic constants of one cavity-dot system.
///
/// `gamma_c` / `gamma_d` are Lorentzian *half*-widths: the response
/// denominator is `ω − ω₀ + iΓ`, so the full width at half maximum of the
/// corresponding intensity line is `2Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityDotParams {
    /// Cavity mode energy, μeV.
    pub omega_c: f64,
    /// Mean trion (X⁻) transition energy, μeV.
    pub omega_d: f64,
    /// Cavity half-width, μeV.
    pub gamma_c: f64,
    /// Dot half-width, μeV.
    pub gamma_d: f64,
    /// Cavity-dot coupling magnitude |g_C|, μeV.
    pub g_c: f64,
    /// Background reflection phase, rad, in [−π, π).
    pub phi: f64,
    /// Bundled background scale |γ|²/A multiplying the cavity response
    /// in the vertical-polarization amplitude. Dimensionless.
    pub bg_scale: f64,
    /// Bias-induced cavity shift δω entering the differential reference,
    /// μeV (signed).
    pub delta_omega: f64,
    /// Free-space radiative rate Γ₀ of the trion, μeV.
    pub gamma_0: f64,
}

impl CavityDotParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("omega_d", self.omega_d),
            ("gamma_c", self.gamma_c),
            ("gamma_d", self.gamma_d),
            ("g_c", self.g_c),
            ("phi", self.phi),
            ("bg_scale", self.bg_scale),
            ("delta_omega", self.delta_omega),
            ("gamma_0", self.gamma_0),
        ] {
            ensure_finite(name, v)?;
        }
        if self.gamma_c <= 0.0 {
            return Err(Error::invalid("gamma_c", "half-width must be > 0"));
        }
        if self.gamma_d <= 0.0 {
            return Err(Error::invalid("gamma_d", "half-width must be > 0"));
        }
        if self.g_c < 0.0 {
            return Err(Error::invalid("g_c", "coupling magnitude must be ≥ 0"));
        }
        if self.gamma_0 <= 0.0 {
            return Err(Error::invalid("gamma_0", "radiative rate must be > 0"));
        }
        if self.bg_scale < 0.0 {
            return Err(Error::invalid("bg_scale", "background scale must be ≥ 0"));
        }
        if !(-std::f64::consts::PI..std::f64::consts::PI).contains(&self.phi) {
            return Err(Error::invalid("phi", "phase must lie in [−π, π)"));
        }
        Ok(())
    }

    /// Cavity-dot detuning ω_C − ω_D, μeV.
    pub fn cavity_detuning(&self) -> f64 {
        self.omega_c - self.omega_d
    }
}

/// Transverse (Voigt-geometry) magnetic field and the electron/hole g-factors
/// that convert it into ground and trion Zeeman splittings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagneticFieldConfig {
    /// Field along the in-plane axis, T.
    pub b_x: f64,
    pub g_electron: f64,
    pub g_hole: f64,
}

impl MagneticFieldConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_finite("b_x", self.b_x)?;
        ensure_finite("g_electron", self.g_electron)?;
        ensure_finite("g_hole", self.g_hole)?;
        if self.b_x < 0.0 {
            return Err(Error::invalid("b_x", "field must be ≥ 0"));
        }
        Ok(())
    }

    /// Electron Zeeman splitting δ_e = g_e·μ_B·B_x, μeV.
    pub fn electron_splitting(&self) -> f64 {
        self.g_electron * MU_B * self.b_x
    }

    /// Hole Zeeman splitting δ_h = g_h·μ_B·B_x, μeV.
    pub fn hole_splitting(&self) -> f64 {
        self.g_hole * MU_B * self.b_x
    }
}
