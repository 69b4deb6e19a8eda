//! Dense numerical kernels used by the pipelines: simplex projection, a
//! projected-gradient QP over the simplex, a cyclic Jacobi eigensolver,
//! k-means and a Cholesky solve. All of them are single-threaded and
//! deterministic.

mod cholesky;
mod eigen;
mod kmeans;
mod qp;
mod simplex;

pub use cholesky::{cholesky_factor, cholesky_solve};
pub use eigen::{smallest_eigenvectors, symmetric_eigen, EigenResult, MAX_SWEEPS};
pub use kmeans::{kmeans, KmeansResult};
pub use qp::{solve_simplex_qp, solve_simplex_qp_from, QpOptions, QpProblem, QpSolution};
pub use simplex::project_simplex;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Checks squareness and finiteness, and returns the symmetrized matrix.
/// Asymmetry beyond `tol · max(1, max|a_ij|)` is an error.
pub(crate) fn symmetrized(a: &Array2<f64>, tol: f64) -> Result<Array2<f64>> {
    let (n, m) = a.dim();
    if n != m {
        return Err(Error::DimensionMismatch(format!("matrix is {n}x{m}, expected square")));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix has non-finite entries".into()));
    }
    let scale = a.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut out = a.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let (x, y) = (a[[i, j]], a[[j, i]]);
            if (x - y).abs() > tol * scale {
                return Err(Error::InvalidArgument(format!(
                    "matrix not symmetric at ({i}, {j}): {x} vs {y}"
                )));
            }
            let avg = 0.5 * (x + y);
            out[[i, j]] = avg;
            out[[j, i]] = avg;
        }
    }
    Ok(out)
}
