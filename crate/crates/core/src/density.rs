//! Density matrices with the physicality contract (Hermitian, unit trace,
//! positive) checked explicitly.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;

/// Tolerances for the physicality checks.
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const EIGENVALUE_FLOOR: f64 = -1e-8;

/// Complex Hermitian state with unit trace; the dynamical object of every
/// simulation in this crate.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    data: Array2<C64>,
}

impl DensityMatrix {
    /// Wraps a matrix, enforcing the physicality contract.
    pub fn new(data: Array2<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let rho = DensityMatrix { data };
        rho.validate()?;
        Ok(rho)
    }

    /// Pure state |ψ⟩⟨ψ| from an (unnormalized) state vector.
    pub fn from_pure(state: &[C64]) -> Result<Self> {
        let norm_sq: f64 = state.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::invalid("state", "zero state vector"));
        }
        let n = state.len();
        let mut data = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                data[[i, j]] = state[i] * state[j].conj() / norm_sq;
            }
        }
        Ok(DensityMatrix { data })
    }

    /// Pure basis state |k⟩⟨k| in an `n`-level system.
    pub fn basis_state(n: usize, k: usize) -> Self {
        let mut data = Array2::zeros((n, n));
        data[[k, k]] = C64::new(1.0, 0.0);
        DensityMatrix { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<C64> {
        self.data
    }

    /// Wrap without validation. For integrator output that is checked in
    /// bulk by the caller.
    pub(crate) fn from_array_unchecked(data: Array2<C64>) -> Self {
        DensityMatrix { data }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.data[[i, i]]).sum()
    }

    pub fn population(&self, level: usize) -> f64 {
        self.data[[level, level]].re
    }

    pub fn coherence(&self, i: usize, j: usize) -> C64 {
        self.data[[i, j]]
    }

    /// Largest |ρ_ij − ρ_ji*| over all pairs.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.data[[i, j]] - self.data[[j, i]].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.data)[0]
    }

    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.data[[i, j]] * self.data[[j, i]];
            }
        }
        acc.re
    }

    /// Checks Hermiticity, unit trace, and eigenvalue positivity at the
    /// module tolerances.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_deviation();
        if herm > HERMITICITY_TOL {
            return Err(Error::invalid(
                "density",
                format!("hermiticity deviation {herm:.3e} exceeds {HERMITICITY_TOL:.0e}"),
            ));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::invalid(
                "density",
                format!("trace {tr} deviates from 1 beyond {TRACE_TOL:.0e}"),
            ));
        }
        let min_ev = self.min_eigenvalue();
        if min_ev < EIGENVALUE_FLOOR {
            return Err(Error::invalid(
                "density",
                format!("negative eigenvalue {min_ev:.3e} below {EIGENVALUE_FLOOR:.0e}"),
            ));
        }
        Ok(())
    }
}
