use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 50;

/// Eigenpairs of a symmetric matrix: values ascending, vectors as the
/// matching orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub values: Array1<f64>,
    pub vectors: Array2<f64>,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let scaled = &self.vectors * &self.values;
        scaled.dot(&self.vectors.t())
    }
}

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps visit `(p, q)` pairs in row order until the off-diagonal Frobenius
/// norm drops to `1e-12 · ‖A‖_F`. Eigenpairs come back sorted ascending, each
/// vector signed so that its largest-magnitude component (first one on ties)
/// is positive. Input must be symmetric within `1e-10` relative; it is
/// symmetrized by averaging.
pub fn symmetric_eigen(a: &Array2<f64>) -> Result<EigenResult> {
    let a = super::symmetrized(a, 1e-10)?;
    let n = a.nrows();
    let mut m: Vec<f64> = a.iter().copied().collect();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let fro = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = 1e-12 * fro;
    let off_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&m) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    let np = c * akp - s * akq;
                    let nq = s * akp + c * akq;
                    m[k * n + p] = np;
                    m[p * n + k] = np;
                    m[k * n + q] = nq;
                    m[q * n + k] = nq;
                }
                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        let off = off_norm(&m);
        if off > target {
            return Err(Error::EigenNoConvergence {
                sweeps: MAX_SWEEPS,
                off_norm: off,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let values = Array1::from_iter(order.iter().map(|&i| m[i * n + i]));
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        let mut best = 0;
        for k in 0..n {
            if v[k * n + src].abs() > v[best * n + src].abs() {
                best = k;
            }
        }
        let sign = if v[best * n + src] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..n {
            vectors[[k, col]] = sign * v[k * n + src];
        }
    }
    Ok(EigenResult { values, vectors })
}

/// The `k` smallest eigenpairs of a symmetric matrix, `1 ≤ k ≤ n`.
pub fn smallest_eigenvectors(a: &Array2<f64>, k: usize) -> Result<EigenResult> {
    let n = a.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= {n}, got k = {k}")));
    }
    let full = symmetric_eigen(a)?;
    Ok(EigenResult {
        values: full.values.slice(ndarray::s![..k]).to_owned(),
        vectors: full.vectors.slice(ndarray::s![.., ..k]).to_owned(),
    })
}
