use ndarray::Array2;

use crate::error::{Error, Result};

/// Lower-triangular `L` with `A = L Lᵀ`. Fails with [`Error::Singular`] on a
/// non-positive pivot.
pub fn cholesky_factor(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", n, a.ncols())));
    }
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut d = a[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Singular(format!("non-positive pivot {d} at column {j}")));
        }
        let d = d.sqrt();
        l[[j, j]] = d;
        for i in (j + 1)..n {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / d;
        }
    }
    Ok(l)
}

/// Solves `A X = B` for symmetric positive definite `A`.
pub fn cholesky_solve(a: &Array2<f64>, b: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if b.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "rhs has {} rows, expected {n}",
            b.nrows()
        )));
    }
    let l = cholesky_factor(a)?;
    let mut x = b.clone();
    for mut col in x.columns_mut() {
        for i in 0..n {
            let mut s = col[i];
            for k in 0..i {
                s -= l[[i, k]] * col[k];
            }
            col[i] = s / l[[i, i]];
        }
        for i in (0..n).rev() {
            let mut s = col[i];
            for k in (i + 1)..n {
                s -= l[[k, i]] * col[k];
            }
            col[i] = s / l[[i, i]];
        }
    }
    Ok(x)
}
