//! Drive fields for the four-level system: cw tones, bare sech pulse
//! sequences, and pulses filtered through the cavity response.
//!
//! A [`DriveField`] carries one complex Rabi envelope per transition,
//! expressed in the rotating frame of `rotating_frame` (μeV): the trion
//! levels are shifted down by that energy and each envelope is what remains
//! of the field after removing the frame carrier.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::consts::HBAR;
use crate::error::{Error, Result};
use crate::level::LevelSystem;
use crate::params::CavityDotParams;
use crate::pulse::{FieldPolarization, SechPulse};

pub type AmplitudeFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

#[derive(Clone)]
pub struct DriveComponent {
    /// Index into `LevelSystem::transitions`.
    pub transition: usize,
    /// Complex Rabi envelope Ω(t), ps⁻¹, in the drive's rotating frame.
    pub amplitude: AmplitudeFn,
}

#[derive(Clone)]
pub struct DriveField {
    /// Energy of the rotating frame, μeV. Trion levels are shifted by this.
    pub rotating_frame: f64,
    pub components: Vec<DriveComponent>,
}

impl std::fmt::Debug for DriveField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DriveField")
            .field("rotating_frame", &self.rotating_frame)
            .field("components", &self.components.len())
            .finish()
    }
}

/// Continuous drive at the energy of one transition, linearly polarized
/// along `axis_angle` (rad from the cavity axis). Every transition with a
/// nonzero projection is driven; the frame is the laser energy, so all
/// envelopes are constant up to their static detuning phase — which is
/// absorbed by the frame-shifted level energies.
pub fn cw_drive(
    system: &LevelSystem,
    driven_transition: usize,
    rabi_peak: f64,
    axis_angle: f64,
) -> Result<DriveField> {
    if driven_transition >= system.transitions.len() {
        return Err(Error::invalid("driven_transition", "index out of range"));
    }
    if !(rabi_peak.is_finite() && rabi_peak >= 0.0) {
        return Err(Error::invalid("rabi_peak", "must be finite and ≥ 0"));
    }
    let laser_energy = system.transitions[driven_transition].energy;
    let jones = [
        C64::new(axis_angle.cos(), 0.0),
        C64::new(axis_angle.sin(), 0.0),
    ];
    let components = system
        .transitions
        .iter()
        .enumerate()
        .filter_map(|(k, tr)| {
            let proj = tr.projection(jones);
            if proj.norm() < 1e-14 {
                return None;
            }
            let amp = proj * rabi_peak;
            Some(DriveComponent {
                transition: k,
                amplitude: Arc::new(move |_t| amp) as AmplitudeFn,
            })
        })
        .collect();
    Ok(DriveField { rotating_frame: laser_energy, components })
}

/// A train of sech pulses sharing one carrier (energy ω̄ + detuning of the
/// first pulse). All pulses must carry the same detuning; their relative
/// carrier phase is then automatic.
pub fn pulse_drive(system: &LevelSystem, pulses: &[SechPulse]) -> Result<DriveField> {
    let first = pulses
        .first()
        .ok_or_else(|| Error::invalid("pulses", "at least one pulse required"))?;
    if pulses.iter().any(|p| p.detuning != first.detuning) {
        return Err(Error::invalid("pulses", "all pulses must share one carrier detuning"));
    }
    let frame = system.transition_energy + first.detuning;
    let pulses = pulses.to_vec();
    let components = system
        .transitions
        .iter()
        .enumerate()
        .filter_map(|(k, tr)| {
            let proj = tr.projection(first.polarization.jones());
            if proj.norm() < 1e-14 {
                return None;
            }
            let pulses = pulses.clone();
            Some(DriveComponent {
                transition: k,
                amplitude: Arc::new(move |t: f64| {
                    let env: f64 = pulses
                        .iter()
                        .map(|p| p.rabi_peak / ((p.bandwidth * (t - p.center_time)).cosh()))
                        .sum();
                    proj * env
                }) as AmplitudeFn,
            })
        })
        .collect();
    Ok(DriveField { rotating_frame: frame, components })
}

/// The cavity-filtered part of a pulse: envelope samples of
/// cs·ω_C·(G_C⁰(ω) + G_C⁰(−ω)) applied to the pulse spectrum, in the pulse
/// rotating frame, plus the time grid they live on.
pub struct FilteredEnvelope {
    pub times: Vec<f64>,
    pub values: Vec<C64>,
    dt: f64,
    t0: f64,
}

impl FilteredEnvelope {
    /// Cubic Hermite interpolation (finite-difference slopes); zero outside
    /// the grid.
    pub fn at(&self, t: f64) -> C64 {
        let x = (t - self.t0) / self.dt;
        if x < 1.0 || x >= (self.values.len() - 2) as f64 {
            return C64::new(0.0, 0.0);
        }
        let i = x.floor() as usize;
        let u = x - i as f64;
        let (ym, y0, y1, y2) =
            (self.values[i - 1], self.values[i], self.values[i + 1], self.values[i + 2]);
        let m0 = (y1 - ym) * 0.5;
        let m1 = (y2 - y0) * 0.5;
        let u2 = u * u;
        let u3 = u2 * u;
        y0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + m0 * (u3 - 2.0 * u2 + u)
            + y1 * (-2.0 * u3 + 3.0 * u2)
            + m1 * (u3 - u2)
    }

    /// ∫|f|²dt by the trapezoid rule over the grid.
    pub fn energy(&self) -> f64 {
        let mut acc = 0.0;
        for w in self.values.windows(2) {
            acc += self.dt * (w[0].norm_sqr() + w[1].norm_sqr()) / 2.0;
        }
        acc
    }
}

/// Computes the cavity-filtered envelope of a sech pulse by discrete
/// Fourier transform: the pulse spectrum is multiplied by the symmetrized
/// cavity response cs·ω_C·(G_C⁰(ω) + G_C⁰(−ω)) evaluated on the absolute
/// energy axis, then transformed back. Returned in the pulse rotating
/// frame.
pub fn cavity_filtered_envelope(
    pulse: &SechPulse,
    transition_energy: f64,
    p: &CavityDotParams,
    coupling_scale: f64,
    dt: f64,
) -> Result<FilteredEnvelope> {
    if !(coupling_scale.is_finite() && coupling_scale >= 0.0) {
        return Err(Error::invalid("coupling_scale", "must be finite and ≥ 0"));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("dt", "sample spacing must be > 0"));
    }
    let nyquist = std::f64::consts::PI / dt;
    if pulse.bandwidth > 0.5 * nyquist {
        return Err(Error::Aliasing { bandwidth: pulse.bandwidth, nyquist });
    }

    // Span: the sech tails plus the cavity ring-down.
    let tail = 14.0 / pulse.bandwidth;
    let ring = 12.0 * HBAR / p.gamma_c;
    let t_start = pulse.center_time - tail;
    let t_stop = pulse.center_time + tail + ring;
    let mut n = (((t_stop - t_start) / dt).ceil() as usize).max(64);
    n = n.next_power_of_two();

    let carrier = transition_energy + pulse.detuning;
    let mut buf: Vec<C64> = (0..n)
        .map(|k| {
            let t = t_start + k as f64 * dt;
            C64::new(pulse.rabi_peak / ((pulse.bandwidth * (t - pulse.center_time)).cosh()), 0.0)
        })
        .collect();

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    // Bin k carries angular frequency μ_k; the absolute photon energy seen
    // by the filter is ħμ + carrier.
    let dnu = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    for (k, v) in buf.iter_mut().enumerate() {
        let mu = if k <= n / 2 {
            k as f64 * dnu
        } else {
            (k as f64 - n as f64) * dnu
        };
        let omega_abs = carrier + HBAR * mu;
        let g_plus = C64::new(1.0, 0.0) / C64::new(omega_abs - p.omega_c, p.gamma_c);
        let g_minus = C64::new(1.0, 0.0) / C64::new(-omega_abs - p.omega_c, p.gamma_c);
        *v *= coupling_scale * p.omega_c * (g_plus + g_minus);
    }

    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    // The FFT phase reference sits at t_start; re-anchor the envelope phase
    // to absolute time so it composes with the analytic bare envelope.
    let values: Vec<C64> = buf.iter().map(|v| v * scale).collect();
    let times: Vec<f64> = (0..n).map(|k| t_start + k as f64 * dt).collect();
    Ok(FilteredEnvelope { times, values, dt, t0: t_start })
}

/// Total drive of a sech pulse in front of the cavity: the bare pulse keeps
/// its own polarization, the filtered component is V-polarized. Transitions
/// pick up each part through their polarization projections.
pub fn cavity_filtered_field(
    pulse: &SechPulse,
    system: &LevelSystem,
    p: &CavityDotParams,
    coupling_scale: f64,
) -> Result<DriveField> {
    let dt = (0.05 / pulse.bandwidth).min(0.25);
    let filtered = Arc::new(cavity_filtered_envelope(
        pulse,
        system.transition_energy,
        p,
        coupling_scale,
        dt,
    )?);
    let frame = system.transition_energy + pulse.detuning;
    let v_jones = FieldPolarization::V.jones();
    let bare = *pulse;
    let components = system
        .transitions
        .iter()
        .enumerate()
        .filter_map(|(k, tr)| {
            let bare_proj = tr.projection(bare.polarization.jones());
            let v_proj = tr.projection(v_jones);
            if bare_proj.norm() < 1e-14 && (coupling_scale == 0.0 || v_proj.norm() < 1e-14) {
                return None;
            }
            let filtered = Arc::clone(&filtered);
            Some(DriveComponent {
                transition: k,
                amplitude: Arc::new(move |t: f64| {
                    let env = bare.rabi_peak / ((bare.bandwidth * (t - bare.center_time)).cosh());
                    bare_proj * env + v_proj * filtered.at(t)
                }) as AmplitudeFn,
            })
        })
        .collect();
    Ok(DriveField { rotating_frame: frame, components })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level::build_level_system;
    use crate::params::MagneticFieldConfig;

    fn system() -> LevelSystem {
        build_level_system(
            &MagneticFieldConfig { b_x: 2.0, g_electron: 0.4, g_hole: 0.2 },
            1_301_940.0,
            0.0,
            0.5,
        )
        .unwrap()
    }

    fn published() -> CavityDotParams {
        CavityDotParams {
            omega_c: 1_302_130.0,
            omega_d: 1_301_940.0,
            gamma_c: 172.0,
            gamma_d: 5.2,
            g_c: 24.9,
            phi: 1.13,
            bg_scale: 0.5,
            delta_omega: 0.0,
            gamma_0: 0.5,
        }
    }

    #[test]
    fn cw_drive_selects_by_polarization() {
        let sys = system();
        // Driving an inner transition along its own (H) axis leaves the
        // outer (V) transitions undriven.
        let drive = cw_drive(&sys, 0, 0.1, std::f64::consts::FRAC_PI_2).unwrap();
        let driven: Vec<usize> = drive.components.iter().map(|c| c.transition).collect();
        assert_eq!(driven, vec![0, 3]);
        assert_eq!(drive.rotating_frame, sys.transitions[0].energy);
    }

    #[test]
    fn pulse_drive_couples_all_under_circular_light() {
        let sys = system();
        let pulse = SechPulse::from_fwhm(
            0.2,
            13.0,
            -560.0,
            0.0,
            FieldPolarization::CircularPlus,
        )
        .unwrap();
        let drive = pulse_drive(&sys, &[pulse]).unwrap();
        assert_eq!(drive.components.len(), 4);
        // Equal magnitudes 1/√2·Ω₀ at the pulse peak on every transition.
        for c in &drive.components {
            let a = (c.amplitude)(0.0);
            assert!((a.norm() - 0.2 / 2.0f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_coupling_reduces_to_bare_pulse() {
        let sys = system();
        let p = published();
        let pulse = SechPulse::from_fwhm(
            0.15,
            11.5,
            -340.0,
            0.0,
            FieldPolarization::CircularPlus,
        )
        .unwrap();
        let bare = pulse_drive(&sys, &[pulse]).unwrap();
        let filtered = cavity_filtered_field(&pulse, &sys, &p, 0.0).unwrap();
        for (b, f) in bare.components.iter().zip(&filtered.components) {
            assert_eq!(b.transition, f.transition);
            for &t in &[-20.0, -3.0, 0.0, 5.0, 17.0] {
                let diff = ((b.amplitude)(t) - (f.amplitude)(t)).norm();
                assert!(diff < 1e-12, "difference {diff} at t = {t}");
            }
        }
    }

    #[test]
    fn far_detuned_filter_is_negligible() {
        let sys = system();
        let p = published();
        // Pulse far below the cavity: the filtered component carries almost
        // no energy relative to the bare envelope.
        let pulse = SechPulse::from_fwhm(
            0.15,
            11.5,
            -3_000.0,
            0.0,
            FieldPolarization::CircularPlus,
        )
        .unwrap();
        let far = cavity_filtered_envelope(&pulse, sys.transition_energy, &p, 1e-4, 0.1)
            .unwrap();
        let pulse_near = SechPulse { detuning: p.omega_c - sys.transition_energy, ..pulse };
        let near = cavity_filtered_envelope(&pulse_near, sys.transition_energy, &p, 1e-4, 0.1)
            .unwrap();
        assert!(
            far.energy() < 0.02 * near.energy(),
            "far-detuned filter energy {:.3e} should be far below resonant {:.3e}",
            far.energy(),
            near.energy()
        );
    }

    #[test]
    fn filtered_energy_matches_parseval_oracle() {
        // Time-domain energy of the filtered envelope vs the frequency
        // integral of |H(ω)·Ẽ(ω)|² with the analytic sech transform
        // Ẽ(μ) = Ω₀·(π/σ)·sech(πμ/2σ).
        let sys = system();
        let p = published();
        let detuning = p.omega_c - sys.transition_energy;
        let pulse = SechPulse::from_fwhm(
            0.15,
            11.5,
            detuning,
            0.0,
            FieldPolarization::CircularPlus,
        )
        .unwrap();
        let cs = 2.0e-4;
        let filtered =
            cavity_filtered_envelope(&pulse, sys.transition_energy, &p, cs, 0.05).unwrap();
        let time_energy = filtered.energy();

        let carrier = sys.transition_energy + pulse.detuning;
        let sigma = pulse.bandwidth;
        let spectral = |mu: f64| {
            let e_tilde = pulse.rabi_peak * (std::f64::consts::PI / sigma)
                / ((std::f64::consts::PI * mu / (2.0 * sigma)).cosh());
            let omega_abs = carrier + HBAR * mu;
            let g_plus = C64::new(1.0, 0.0) / C64::new(omega_abs - p.omega_c, p.gamma_c);
            let g_minus = C64::new(1.0, 0.0) / C64::new(-omega_abs - p.omega_c, p.gamma_c);
            let h = cs * p.omega_c * (g_plus + g_minus);
            (h.norm() * e_tilde).powi(2)
        };
        // ∫ dμ/2π |H·Ẽ|² by trapezoid over ±20σ.
        let n = 200_000usize;
        let lo = -20.0 * sigma;
        let hi = 20.0 * sigma;
        let dmu = (hi - lo) / n as f64;
        let mut freq_energy = 0.0;
        for k in 0..n {
            let a = spectral(lo + k as f64 * dmu);
            let b = spectral(lo + (k + 1) as f64 * dmu);
            freq_energy += dmu * (a + b) / 2.0;
        }
        freq_energy /= 2.0 * std::f64::consts::PI;

        let rel = (time_energy - freq_energy).abs() / freq_energy;
        assert!(rel < 1e-3, "Parseval mismatch: {time_energy:.6e} vs {freq_energy:.6e}");
    }

    #[test]
    fn aliasing_guard_trips() {
        let sys = system();
        let p = published();
        let pulse = SechPulse {
            rabi_peak: 0.1,
            bandwidth: 10.0,
            detuning: 0.0,
            center_time: 0.0,
            polarization: FieldPolarization::CircularPlus,
        };
        let out = cavity_filtered_envelope(&pulse, sys.transition_energy, &p, 1e-4, 1.0);
        assert!(matches!(out, Err(Error::Aliasing { .. })));
    }
}
