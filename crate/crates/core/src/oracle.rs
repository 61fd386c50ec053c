//! Independent symmetric eigensolver used as ground truth in tests.
//!
//! Cyclic-by-rows Jacobi rotations: simple enough to audit and sharing no
//! code with the subspace iteration, so the two paths cannot fail the same
//! way. Test-grade; each sweep is O(n³) and no attempt is made to be fast.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Vector};
use crate::solver::{assemble_svd, RunReport, SvdResult};

/// Default off-diagonal tolerance, relative to the Frobenius norm.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Full eigendecomposition `S = V diag(values) Vᵀ` of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Eigenvalues sorted descending.
    pub values: Vector,
    /// Column-orthonormal eigenvectors, matching `values` column-wise and
    /// sign-normalized so each column's largest-magnitude entry is positive.
    pub vectors: Matrix,
}

/// Computes the full spectrum of a symmetric matrix by cyclic Jacobi
/// sweeps, stopping when the off-diagonal Frobenius norm falls to
/// `tol * ‖S‖_F`.
///
/// The input must be symmetric to within `1e-10` (relative to its largest
/// entry). More than 100 sweeps is reported as non-convergence; in
/// practice a handful suffice.
pub fn jacobi_eigen_sym(s: &Matrix, tol: f64) -> Result<EigenDecomposition> {
    let n = s.rows();
    if n != s.cols() {
        return Err(Error::Shape {
            context: format!("eigendecomposition needs a square matrix, got {}x{}", n, s.cols()),
        });
    }
    let sym_tol = 1e-10 * s.max_abs().max(1.0);
    let mut max_dev = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            max_dev = max_dev.max((s.get(i, j) - s.get(j, i)).abs());
        }
    }
    if max_dev > sym_tol {
        return Err(Error::NotSymmetric { max_deviation: max_dev });
    }

    let mut a = s.symmetrized();
    let mut v = Matrix::identity(n);
    let norm = s.frobenius_norm_sq().sqrt();
    let target = tol * norm;

    let mut sweeps = 0;
    loop {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a.get(i, j) * a.get(i, j);
                }
            }
        }
        if off.sqrt() <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;

        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = {
                    let abs_t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
                    if theta < 0.0 {
                        -abs_t
                    } else {
                        abs_t
                    }
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;

                let app = a.get(p, p);
                let aqq = a.get(q, q);
                a.set(p, p, c * c * app - 2.0 * sn * c * apq + sn * sn * aqq);
                a.set(q, q, sn * sn * app + 2.0 * sn * c * apq + c * c * aqq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - sn * akq);
                    a.set(p, k, c * akp - sn * akq);
                    a.set(k, q, sn * akp + c * akq);
                    a.set(q, k, sn * akp + c * akq);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - sn * vkq);
                    v.set(k, q, sn * vkp + c * vkq);
                }
            }
        }
    }

    let diag = a.diag();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]).then(x.cmp(&y)));
    let values = Vector::new(order.iter().map(|&i| diag[i]).collect())?;
    let mut vectors = v.permute_columns(&order);
    vectors.normalize_column_signs();
    Ok(EigenDecomposition { values, vectors })
}

/// Reference SVD: eigendecomposition of `XᵀX` assembled through the same
/// bridge (`W = V`, `d = sqrt(lambda)`, `u_j = X w_j / d_j`) as the
/// iterative solver.
pub fn oracle_svd(x: &Matrix) -> Result<SvdResult> {
    let eig = jacobi_eigen_sym(&x.gram_matrix(), DEFAULT_TOL)?;
    let report = RunReport {
        iterations: 0,
        final_delta: 0.0,
        converged: true,
        numerical_rank: 0,
        zero_threshold: 0.0,
    };
    assemble_svd(x, eig.vectors, eig.values, 1.0, report)
}
