//! Small dense linear algebra: Gaussian elimination, a cyclic Jacobi
//! eigensolver for real symmetric matrices, and Hermitian eigenvalues via
//! the real embedding. Problem sizes here are tiny (≤ ~30), so simplicity
//! and robustness win over sophistication.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Solves A·x = b by Gaussian elimination with partial pivoting.
/// Consumes copies; A must be square and match b.
pub fn solve(a: &Array2<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "solve: {}x{} matrix with rhs of length {}",
            a.nrows(),
            a.ncols(),
            n
        )));
    }
    let mut m = a.clone();
    let mut x: Vec<f64> = b.to_vec();
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[[col, col]].abs();
        for row in col + 1..n {
            let v = m[[row, col]].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best < 1e-300 {
            return Err(Error::DimensionMismatch("solve: singular matrix".into()));
        }
        if pivot != col {
            for k in 0..n {
                m.swap([col, k], [pivot, k]);
            }
            x.swap(col, pivot);
        }
        let d = m[[col, col]];
        for row in col + 1..n {
            let f = m[[row, col]] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[[row, k]] -= f * m[[col, k]];
            }
            x[row] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut v = x[col];
        for k in col + 1..n {
            v -= m[[col, k]] * x[k];
        }
        x[col] = v / m[[col, col]];
    }
    Ok(x)
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi
/// rotations. Returns (eigenvalues ascending, eigenvectors as columns).
pub fn jacobi_eigh(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "jacobi_eigh: matrix must be square");
    let mut m = a.clone();
    let mut v: Array2<f64> = Array2::eye(n);
    let scale: f64 = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs())).max(1e-300);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m[[p, q]].abs());
            }
        }
        if off < 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[[p, q]];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].total_cmp(&m[[j, j]]));
    let evals: Vec<f64> = order.iter().map(|&i| m[[i, i]]).collect();
    let mut evecs = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            evecs[[k, dst]] = v[[k, src]];
        }
    }
    (evals, evecs)
}

/// Eigenvalues of a Hermitian complex matrix, ascending.
///
/// Uses the real embedding [[Re, −Im], [Im, Re]], whose spectrum is that of
/// the Hermitian matrix with every eigenvalue doubled.
pub fn hermitian_eigenvalues(h: &Array2<C64>) -> Vec<f64> {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "hermitian_eigenvalues: matrix must be square");
    let mut e = Array2::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            let z = h[[i, j]];
            e[[i, j]] = z.re;
            e[[i + n, j + n]] = z.re;
            e[[i, j + n]] = -z.im;
            e[[i + n, j]] = z.im;
        }
    }
    let (evals, _) = jacobi_eigh(&e);
    evals.into_iter().step_by(2).collect()
}

/// Moore-Penrose pseudo-inverse of a symmetric positive semi-definite
/// matrix, plus its numerical rank. Eigenvalues below `rel_tol`·max are
/// treated as zero.
pub fn pinv_sym(a: &Array2<f64>, rel_tol: f64) -> (Array2<f64>, usize) {
    let n = a.nrows();
    let (evals, evecs) = jacobi_eigh(a);
    let max_ev = evals.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let cutoff = rel_tol * max_ev.max(1e-300);
    let mut rank = 0usize;
    let mut out = Array2::zeros((n, n));
    for (k, &ev) in evals.iter().enumerate() {
        if ev.abs() <= cutoff {
            continue;
        }
        rank += 1;
        let inv = 1.0 / ev;
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] += inv * evecs[[i, k]] * evecs[[j, k]];
            }
        }
    }
    (out, rank)
}
