//! Decaying-cosine fits of interference fringes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lm::{levenberg_marquardt, LmConfig};

/// Envelope of the fringe decay.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// exp(−τ/T)
    Exponential,
    /// exp(−(τ/T)²)
    Gaussian,
}

/// offset + amplitude·cos(ω·τ + phase)·envelope(τ; decay_time).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub amplitude: f64,
    /// ps⁻¹ (angular).
    pub frequency: f64,
    pub phase: f64,
    /// ps.
    pub decay_time: f64,
    pub offset: f64,
    pub envelope: EnvelopeKind,
    /// Standard errors in the order [amplitude, frequency, phase,
    /// decay_time, offset].
    pub standard_errors: [f64; 5],
}

impl FringeFit {
    pub fn eval(&self, tau: f64) -> f64 {
        let env = match self.envelope {
            EnvelopeKind::Exponential => (-tau / self.decay_time).exp(),
            EnvelopeKind::Gaussian => (-(tau / self.decay_time).powi(2)).exp(),
        };
        self.offset + self.amplitude * (self.frequency * tau + self.phase).cos() * env
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FringeGuess {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
    pub decay_time: f64,
    pub offset: f64,
}

impl FringeGuess {
    /// Crude guess from the data: mean offset, half peak-to-peak amplitude,
    /// frequency from a coarse periodogram scan.
    pub fn from_series(taus: &[f64], values: &[f64]) -> FringeGuess {
        let n = values.len().max(1) as f64;
        let offset = values.iter().sum::<f64>() / n;
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let span = taus.last().copied().unwrap_or(1.0) - taus.first().copied().unwrap_or(0.0);
        let mut best = (0.0f64, 2.0 * std::f64::consts::PI / span.max(1.0));
        // Periodogram over 2..~n/2 cycles across the record.
        let max_cycles = (values.len() / 2).max(3);
        for cyc in 2..max_cycles {
            let w = 2.0 * std::f64::consts::PI * cyc as f64 / span.max(1e-9);
            let (mut c, mut s) = (0.0, 0.0);
            for (&t, &y) in taus.iter().zip(values) {
                c += (y - offset) * (w * t).cos();
                s += (y - offset) * (w * t).sin();
            }
            let power = c * c + s * s;
            if power > best.0 {
                best = (power, w);
            }
        }
        FringeGuess {
            amplitude: (max - min) / 2.0,
            frequency: best.1,
            phase: 0.0,
            decay_time: span.max(1.0),
            offset,
        }
    }
}

const DECAY_CAP: f64 = 1e9;

/// Nonlinear least-squares fit of a decaying cosine. Multi-starts over the
/// phase to avoid the half-period local minimum; errors carry the last
/// iterate when no start converges.
pub fn fit_decaying_cosine(
    taus: &[f64],
    values: &[f64],
    guess: &FringeGuess,
    envelope: EnvelopeKind,
) -> Result<FringeFit> {
    if taus.len() != values.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} abscissas vs {} values",
            taus.len(),
            values.len()
        )));
    }
    if taus.len() < 8 {
        return Err(Error::InvalidProblem("need at least 8 samples to fit fringes".into()));
    }

    let amp_scale = guess.amplitude.abs().max(1e-12);
    let bounds = [
        (0.0, 100.0 * amp_scale),
        (guess.frequency / 10.0, guess.frequency * 10.0),
        (-4.0, 4.0),
        (1e-3, DECAY_CAP),
        (
            guess.offset - 100.0 * amp_scale,
            guess.offset + 100.0 * amp_scale,
        ),
    ];

    let taus_v = taus.to_vec();
    let values_v = values.to_vec();
    let model = move |p: &[f64], out: &mut [f64]| {
        let (amp, freq, phase, decay, offset) = (p[0], p[1], p[2], p[3], p[4]);
        for (i, (&t, &y)) in taus_v.iter().zip(&values_v).enumerate() {
            let env = match envelope {
                EnvelopeKind::Exponential => (-t / decay).exp(),
                EnvelopeKind::Gaussian => (-(t / decay).powi(2)).exp(),
            };
            out[i] = offset + amp * (freq * t + phase).cos() * env - y;
        }
    };

    let mut best: Option<(f64, crate::lm::LmReport)> = None;
    for phase0 in [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI, -std::f64::consts::FRAC_PI_2] {
        let x0 = [
            guess.amplitude.abs().min(bounds[0].1),
            guess.frequency.clamp(bounds[1].0, bounds[1].1),
            phase0,
            guess.decay_time.clamp(bounds[3].0, bounds[3].1),
            guess.offset,
        ];
        let report = levenberg_marquardt(&model, taus.len(), &x0, &bounds, &LmConfig::default())?;
        let score = report.residual_norm;
        if best.as_ref().map_or(true, |(s, _)| score < *s) {
            best = Some((score, report));
        }
    }

    let (_, report) = best.expect("at least one phase start ran");
    // The decay time of a weakly damped fringe sits in an essentially flat
    // valley, so the step criterion may exhaust the iteration budget at a
    // perfectly good fit. Treat non-convergence as an error only when the
    // fit also fails to beat the flat-line baseline.
    if !report.converged {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let baseline = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>().sqrt();
        if report.residual_norm > 0.5 * baseline {
            return Err(Error::FitNotConverged {
                reason: format!(
                    "residual {:.3e} never fell below the flat-line baseline {:.3e}",
                    report.residual_norm, baseline
                ),
                last_params: report.params,
            });
        }
    }
    let p = &report.params;
    let se = &report.standard_errors;
    Ok(FringeFit {
        amplitude: p[0],
        frequency: p[1],
        phase: p[2],
        decay_time: p[3],
        offset: p[4],
        envelope,
        standard_errors: [se[0], se[1], se[2], se[3], se[4]],
    })
}
