//! Damped (Levenberg-style) least squares on small dense problems, with
//! central-difference Jacobians, box bounds, frozen parameters (bounds with
//! zero width), a monotone objective trace, and pseudo-inverse covariance
//! when the Jacobian is rank deficient.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{pinv_sym, solve};

#[derive(Clone, Copy, Debug)]
pub struct LmConfig {
    pub max_iterations: usize,
    /// Converged when the relative step falls below this.
    pub step_tol: f64,
    /// Converged when the relative objective decrease of an accepted step
    /// falls below this.
    pub residual_tol: f64,
    pub lambda_init: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        LmConfig {
            max_iterations: 200,
            step_tol: 1e-10,
            residual_tol: 1e-10,
            lambda_init: 1e-3,
            lambda_up: 4.0,
            lambda_down: 0.3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LmReport {
    pub params: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// √(Σr²) at the solution.
    pub residual_norm: f64,
    /// Objective ½Σr² after every accepted step, starting from the initial
    /// point. Non-increasing by construction.
    pub objective_trace: Vec<f64>,
    /// Covariance of the free parameters embedded at their positions;
    /// frozen rows/columns are zero.
    pub covariance: Array2<f64>,
    pub standard_errors: Vec<f64>,
    pub rank: usize,
    pub rank_deficient: bool,
    pub final_residuals: Vec<f64>,
}

/// Minimizes ½‖r(x)‖² with r filled by `residual_fn(x, &mut r)`.
///
/// `bounds` are inclusive boxes; a parameter with `lo == hi` is frozen.
pub fn levenberg_marquardt<F>(
    residual_fn: F,
    n_residuals: usize,
    x0: &[f64],
    bounds: &[(f64, f64)],
    config: &LmConfig,
) -> Result<LmReport>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = x0.len();
    if bounds.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} parameters but {} bounds",
            n,
            bounds.len()
        )));
    }
    for (k, (&x, &(lo, hi))) in x0.iter().zip(bounds).enumerate() {
        if !(lo <= hi) {
            return Err(Error::InvalidProblem(format!("bounds[{k}] inverted: ({lo}, {hi})")));
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidProblem(format!("bounds[{k}] must be finite")));
        }
        if x < lo || x > hi {
            return Err(Error::InvalidProblem(format!(
                "initial guess x[{k}] = {x} outside bounds ({lo}, {hi})"
            )));
        }
    }
    let free: Vec<usize> = (0..n).filter(|&k| bounds[k].0 < bounds[k].1).collect();
    if free.is_empty() {
        return Err(Error::InvalidProblem("all parameters frozen".into()));
    }

    let mut x = x0.to_vec();
    let mut r = vec![0.0; n_residuals];
    residual_fn(&x, &mut r);
    let mut f = 0.5 * r.iter().map(|v| v * v).sum::<f64>();
    if !f.is_finite() {
        return Err(Error::InvalidProblem("residuals not finite at initial guess".into()));
    }
    let mut trace = vec![f];

    let nf = free.len();
    let mut jac = Array2::zeros((n_residuals, nf));
    let mut lambda = config.lambda_init;
    let mut converged = false;
    let mut iterations = 0;

    let mut r_plus = vec![0.0; n_residuals];
    let mut r_minus = vec![0.0; n_residuals];

    for iter in 0..config.max_iterations {
        iterations = iter + 1;

        // Central-difference Jacobian over the free parameters.
        for (col, &k) in free.iter().enumerate() {
            let h = 1e-7 * x[k].abs().max(1e-2);
            let saved = x[k];
            x[k] = (saved + h).min(bounds[k].1);
            let h_up = x[k] - saved;
            residual_fn(&x, &mut r_plus);
            x[k] = (saved - h).max(bounds[k].0);
            let h_down = saved - x[k];
            residual_fn(&x, &mut r_minus);
            x[k] = saved;
            let denom = h_up + h_down;
            for i in 0..n_residuals {
                jac[[i, col]] = (r_plus[i] - r_minus[i]) / denom;
            }
        }

        // Normal equations with Marquardt scaling.
        let mut a = Array2::zeros((nf, nf));
        let mut g = vec![0.0; nf];
        for i in 0..n_residuals {
            for c1 in 0..nf {
                let ji = jac[[i, c1]];
                g[c1] += ji * r[i];
                for c2 in c1..nf {
                    a[[c1, c2]] += ji * jac[[i, c2]];
                }
            }
        }
        for c1 in 0..nf {
            for c2 in 0..c1 {
                a[[c1, c2]] = a[[c2, c1]];
            }
        }

        let mut accepted = false;
        for _attempt in 0..12 {
            let mut damped = a.clone();
            for c in 0..nf {
                let d: f64 = a[[c, c]];
                damped[[c, c]] = d + lambda * d.max(1e-12);
            }
            let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
            let step = match solve(&damped, &neg_g) {
                Ok(s) => s,
                Err(_) => {
                    lambda *= config.lambda_up;
                    continue;
                }
            };
            let mut x_try = x.clone();
            for (col, &k) in free.iter().enumerate() {
                x_try[k] = (x[k] + step[col]).clamp(bounds[k].0, bounds[k].1);
            }
            residual_fn(&x_try, &mut r_plus);
            let f_try = 0.5 * r_plus.iter().map(|v| v * v).sum::<f64>();
            if f_try.is_finite() && f_try < f {
                let rel_step = free
                    .iter()
                    .enumerate()
                    .map(|(col, &k)| step[col].abs() / x[k].abs().max(1.0))
                    .fold(0.0f64, f64::max);
                let rel_decrease = (f - f_try) / f.max(1e-300);
                x = x_try;
                r.copy_from_slice(&r_plus);
                f = f_try;
                trace.push(f);
                lambda = (lambda * config.lambda_down).max(1e-12);
                accepted = true;
                if rel_step < config.step_tol || rel_decrease < config.residual_tol {
                    converged = true;
                }
                break;
            }
            lambda *= config.lambda_up;
        }

        if !accepted {
            // No downhill step found at any damping: stationary point.
            converged = true;
        }
        if converged {
            break;
        }
    }

    // Covariance from the final Jacobian: σ²·(JᵀJ)⁺ over the free block.
    for (col, &k) in free.iter().enumerate() {
        let h = 1e-7 * x[k].abs().max(1e-2);
        let saved = x[k];
        x[k] = (saved + h).min(bounds[k].1);
        let h_up = x[k] - saved;
        residual_fn(&x, &mut r_plus);
        x[k] = (saved - h).max(bounds[k].0);
        let h_down = saved - x[k];
        residual_fn(&x, &mut r_minus);
        x[k] = saved;
        let denom = h_up + h_down;
        for i in 0..n_residuals {
            jac[[i, col]] = (r_plus[i] - r_minus[i]) / denom;
        }
    }
    let mut jtj = Array2::zeros((nf, nf));
    for i in 0..n_residuals {
        for c1 in 0..nf {
            for c2 in c1..nf {
                jtj[[c1, c2]] += jac[[i, c1]] * jac[[i, c2]];
            }
        }
    }
    for c1 in 0..nf {
        for c2 in 0..c1 {
            jtj[[c1, c2]] = jtj[[c2, c1]];
        }
    }
    let (pinv, rank) = pinv_sym(&jtj, 1e-12);
    let dof = n_residuals.saturating_sub(rank).max(1);
    let sigma_sq = r.iter().map(|v| v * v).sum::<f64>() / dof as f64;
    let mut covariance = Array2::zeros((n, n));
    for (c1, &k1) in free.iter().enumerate() {
        for (c2, &k2) in free.iter().enumerate() {
            covariance[[k1, k2]] = sigma_sq * pinv[[c1, c2]];
        }
    }
    let standard_errors = (0..n).map(|k| covariance[[k, k]].max(0.0).sqrt()).collect();

    Ok(LmReport {
        params: x,
        converged,
        iterations,
        residual_norm: r.iter().map(|v| v * v).sum::<f64>().sqrt(),
        objective_trace: trace,
        covariance,
        standard_errors,
        rank,
        rank_deficient: rank < nf,
        final_residuals: r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_exponential_decay() {
        // y = a·exp(−t/τ) + c with known truth.
        let truth = (2.0, 35.0, 0.4);
        let ts: Vec<f64> = (0..120).map(|k| k as f64).collect();
        let data: Vec<f64> =
            ts.iter().map(|&t| truth.0 * (-t / truth.1).exp() + truth.2).collect();
        let ts2 = ts.clone();
        let data2 = data.clone();
        let resid = move |p: &[f64], out: &mut [f64]| {
            for (i, (&t, &d)) in ts2.iter().zip(&data2).enumerate() {
                out[i] = p[0] * (-t / p[1]).exp() + p[2] - d;
            }
        };
        let report = levenberg_marquardt(
            resid,
            ts.len(),
            &[1.0, 20.0, 0.0],
            &[(0.0, 100.0), (1.0, 1e4), (-10.0, 10.0)],
            &LmConfig::default(),
        )
        .unwrap();
        assert!(report.converged);
        assert!((report.params[0] - truth.0).abs() < 1e-6);
        assert!((report.params[1] - truth.1).abs() < 1e-4);
        assert!((report.params[2] - truth.2).abs() < 1e-7);
    }

    #[test]
    fn objective_trace_monotone() {
        let resid = |p: &[f64], out: &mut [f64]| {
            out[0] = p[0] * p[0] - 2.0;
            out[1] = p[0] - p[1];
        };
        let report = levenberg_marquardt(
            resid,
            2,
            &[3.0, -1.0],
            &[(-10.0, 10.0), (-10.0, 10.0)],
            &LmConfig::default(),
        )
        .unwrap();
        for w in report.objective_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!((report.params[0] - 2.0f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn frozen_parameters_stay_put() {
        let resid = |p: &[f64], out: &mut [f64]| {
            out[0] = p[0] + p[1] - 3.0;
            out[1] = p[0] - p[1] - 1.0;
        };
        let report = levenberg_marquardt(
            resid,
            2,
            &[0.5, 0.5],
            &[(0.5, 0.5), (-10.0, 10.0)],
            &LmConfig::default(),
        )
        .unwrap();
        assert_eq!(report.params[0], 0.5);
        // Best least-squares value of p[1] given p[0] = 0.5.
        assert!((report.params[1] - 1.0).abs() < 1e-8);
        // Covariance row/col of the frozen parameter is zero.
        assert_eq!(report.covariance[[0, 0]], 0.0);
        assert_eq!(report.standard_errors[0], 0.0);
    }

    #[test]
    fn rank_deficiency_flagged() {
        // Two parameters entering only as their sum.
        let resid = |p: &[f64], out: &mut [f64]| {
            out[0] = p[0] + p[1] - 1.0;
            out[1] = 2.0 * (p[0] + p[1]) - 2.0;
        };
        let report = levenberg_marquardt(
            resid,
            2,
            &[0.2, 0.3],
            &[(-10.0, 10.0), (-10.0, 10.0)],
            &LmConfig::default(),
        )
        .unwrap();
        assert!(report.rank_deficient);
        assert_eq!(report.rank, 1);
    }

    #[test]
    fn rejects_bad_problems() {
        let resid = |_: &[f64], out: &mut [f64]| out[0] = 0.0;
        assert!(levenberg_marquardt(resid, 1, &[0.0], &[(1.0, 2.0)], &LmConfig::default())
            .is_err());
        assert!(levenberg_marquardt(resid, 1, &[0.0], &[(0.0, 0.0)], &LmConfig::default())
            .is_err());
        let resid2 = |_: &[f64], out: &mut [f64]| out[0] = 0.0;
        assert!(levenberg_marquardt(
            resid2,
            1,
            &[0.0, 0.0],
            &[(0.0, 1.0)],
            &LmConfig::default()
        )
        .is_err());
    }

    #[test]
    fn max_iterations_reports_nonconverged() {
        // Rosenbrock-style slow valley with a tiny iteration budget.
        let resid = |p: &[f64], out: &mut [f64]| {
            out[0] = 10.0 * (p[1] - p[0] * p[0]);
            out[1] = 1.0 - p[0];
        };
        let cfg = LmConfig { max_iterations: 2, step_tol: 1e-14, residual_tol: 1e-14, ..Default::default() };
        let report = levenberg_marquardt(
            resid,
            2,
            &[-1.2, 1.0],
            &[(-10.0, 10.0), (-10.0, 10.0)],
            &cfg,
        )
        .unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations, 2);
    }
}
