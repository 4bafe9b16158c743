//! Embedded Dormand-Prince 5(4) integration of matrix-valued ODEs with
//! adaptive step control, exact landing on requested sample times, and a
//! fixed-step mode for order studies.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Error coefficients: 5th-order minus embedded 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

#[derive(Clone, Copy, Debug)]
pub struct Rk45Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_max: f64,
    /// Steps below this abort with a stiffness diagnostic.
    pub h_min: f64,
}

impl Rk45Options {
    pub fn with_tol(tol: f64) -> Self {
        Rk45Options { rel_tol: tol, abs_tol: tol, h_init: 1e-3, h_max: f64::INFINITY, h_min: 1e-12 }
    }
}

fn stage_sum(y: &Array2<C64>, h: f64, terms: &[(f64, &Array2<C64>)]) -> Array2<C64> {
    let mut out = y.clone();
    for &(coef, k) in terms {
        out.zip_mut_with(k, |o, &v| *o += h * coef * v);
    }
    out
}

/// Integrates dy/dt = rhs(t, y) from t0 to t1, invoking `on_sample` at each
/// requested time (which must be sorted and lie within [t0, t1]). The
/// optional `project` is applied to the state after every accepted step
/// (used to re-Hermitize density matrices). Returns the final state.
pub fn integrate_adaptive<F, P, S>(
    mut rhs: F,
    y0: Array2<C64>,
    t0: f64,
    t1: f64,
    opts: &Rk45Options,
    sample_times: &[f64],
    mut project: P,
    mut on_sample: S,
) -> Result<Array2<C64>>
where
    F: FnMut(f64, &Array2<C64>) -> Array2<C64>,
    P: FnMut(&mut Array2<C64>),
    S: FnMut(f64, &Array2<C64>),
{
    debug_assert!(sample_times.windows(2).all(|w| w[0] <= w[1]));
    let span = t1 - t0;
    if span <= 0.0 {
        return Err(Error::IntegrationFailure { t: t0, reason: "empty span".into() });
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h_init.min(span).min(opts.h_max);
    let mut k1 = rhs(t, &y);
    let mut next_sample = 0usize;

    // Emit samples that coincide with the start.
    while next_sample < sample_times.len() && sample_times[next_sample] <= t + 1e-12 {
        on_sample(sample_times[next_sample], &y);
        next_sample += 1;
    }

    let mut rejected_in_a_row = 0usize;
    while t < t1 - 1e-12 {
        let mut target = t1;
        if next_sample < sample_times.len() {
            target = target.min(sample_times[next_sample]);
        }
        if h > target - t {
            h = target - t;
        }
        if h < opts.h_min {
            return Err(Error::IntegrationFailure {
                t,
                reason: format!("step size underflow (h = {h:.3e}); system too stiff"),
            });
        }

        let k2 = rhs(t + C2 * h, &stage_sum(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &stage_sum(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * h, &stage_sum(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            t + C5 * h,
            &stage_sum(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + h,
            &stage_sum(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = stage_sum(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = rhs(t + h, &y_new);

        let mut err_ratio = 0.0f64;
        for i in 0..y.len() {
            let err = h
                * (E1 * k1.as_slice().unwrap()[i]
                    + E3 * k3.as_slice().unwrap()[i]
                    + E4 * k4.as_slice().unwrap()[i]
                    + E5 * k5.as_slice().unwrap()[i]
                    + E6 * k6.as_slice().unwrap()[i]
                    + E7 * k7.as_slice().unwrap()[i]);
            let mag = y.as_slice().unwrap()[i]
                .norm()
                .max(y_new.as_slice().unwrap()[i].norm());
            let scale = opts.abs_tol + opts.rel_tol * mag;
            err_ratio = err_ratio.max(err.norm() / scale);
        }

        if err_ratio <= 1.0 {
            t += h;
            y = y_new;
            project(&mut y);
            k1 = k7;
            rejected_in_a_row = 0;
            while next_sample < sample_times.len() && sample_times[next_sample] <= t + 1e-12 {
                on_sample(sample_times[next_sample], &y);
                next_sample += 1;
            }
        } else {
            rejected_in_a_row += 1;
            if rejected_in_a_row > 60 {
                return Err(Error::IntegrationFailure {
                    t,
                    reason: "repeated step rejection; system too stiff".into(),
                });
            }
        }
        let factor = if err_ratio > 0.0 {
            (0.9 * err_ratio.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * factor).min(opts.h_max).min(t1 - t + 1e-12);
    }

    // Flush any samples pinned to the exact end time.
    while next_sample < sample_times.len() && sample_times[next_sample] <= t1 + 1e-9 {
        on_sample(sample_times[next_sample], &y);
        next_sample += 1;
    }
    Ok(y)
}

/// Fixed-step integration with the 5th-order propagation of the same
/// tableau. For convergence-order studies.
pub fn integrate_fixed<F>(mut rhs: F, y0: Array2<C64>, t0: f64, t1: f64, n_steps: usize) -> Array2<C64>
where
    F: FnMut(f64, &Array2<C64>) -> Array2<C64>,
{
    let h = (t1 - t0) / n_steps as f64;
    let mut y = y0;
    let mut t = t0;
    for _ in 0..n_steps {
        let k1 = rhs(t, &y);
        let k2 = rhs(t + C2 * h, &stage_sum(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &stage_sum(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * h, &stage_sum(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            t + C5 * h,
            &stage_sum(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + h,
            &stage_sum(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        y = stage_sum(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        t += h;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn one_by_one(v: f64) -> Array2<C64> {
        array![[C64::new(v, 0.0)]]
    }

    #[test]
    fn exponential_decay_adaptive() {
        let rhs = |_t: f64, y: &Array2<C64>| y.mapv(|v| -v);
        let y = integrate_adaptive(
            rhs,
            one_by_one(1.0),
            0.0,
            3.0,
            &Rk45Options::with_tol(1e-10),
            &[],
            |_| {},
            |_, _| {},
        )
        .unwrap();
        assert!((y[[0, 0]].re - (-3.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn oscillator_hits_samples() {
        // y'' = -y as a 2x1 system packed into a 2x1 matrix.
        let rhs = |_t: f64, y: &Array2<C64>| {
            array![[y[[1, 0]]], [-y[[0, 0]]]]
        };
        let y0 = array![[C64::new(1.0, 0.0)], [C64::new(0.0, 0.0)]];
        let samples = [0.5f64, 1.0, 2.0, 3.0];
        let mut seen = Vec::new();
        integrate_adaptive(
            rhs,
            y0,
            0.0,
            3.0,
            &Rk45Options::with_tol(1e-10),
            &samples,
            |_| {},
            |t, y| seen.push((t, y[[0, 0]].re)),
        )
        .unwrap();
        assert_eq!(seen.len(), samples.len());
        for (t, v) in seen {
            assert!((v - t.cos()).abs() < 1e-8, "cos({t}) mismatch: {v}");
        }
    }

    #[test]
    fn fixed_step_fifth_order() {
        // Error vs closed form scales as h^5 on a smooth problem.
        let rhs = |t: f64, y: &Array2<C64>| y.mapv(|v| v * C64::new(0.0, 1.0) * t.cos());
        let exact = |t: f64| C64::new(0.0, t.sin()).exp();
        let mut errs = Vec::new();
        for n in [40usize, 80, 160, 320] {
            let y = integrate_fixed(rhs, one_by_one(1.0), 0.0, 6.0, n);
            errs.push((6.0 / n as f64, (y[[0, 0]] - exact(6.0)).norm()));
        }
        // Log-log slope across the extremes.
        let slope = ((errs[0].1 / errs[3].1).ln()) / ((errs[0].0 / errs[3].0).ln());
        assert!((slope - 5.0).abs() < 0.5, "measured order {slope}");
    }

    #[test]
    fn stiffness_reported_with_time() {
        // Blows up in finite time; the integrator must fail with a
        // diagnostic rather than loop forever.
        let rhs = |_t: f64, y: &Array2<C64>| y.mapv(|v| v * v * 1e3);
        let out = integrate_adaptive(
            rhs,
            one_by_one(1.0),
            0.0,
            10.0,
            &Rk45Options { h_min: 1e-10, ..Rk45Options::with_tol(1e-8) },
            &[],
            |_| {},
            |_, _| {},
        );
        assert!(matches!(out, Err(Error::IntegrationFailure { .. })));
    }
}
