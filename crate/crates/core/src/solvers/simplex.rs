use ndarray::{Array1, ArrayView1};

use crate::similarity::Weights;

/// Euclidean projection onto `{α ≥ 0, Σα = 1}` by sort-and-threshold:
/// with `u` sorted descending, `θ = (Σ_{k≤ρ} u_k − 1)/ρ` for the largest `ρ`
/// keeping `u_ρ − θ > 0`, and the projection is `max(v − θ, 0)`.
///
/// Panics if `v` is empty or contains non-finite entries.
pub fn project_simplex(v: ArrayView1<'_, f64>) -> Weights {
    Weights::from_projection(project_raw(v))
}

pub(crate) fn project_raw(v: ArrayView1<'_, f64>) -> Array1<f64> {
    assert!(!v.is_empty(), "cannot project an empty vector");
    assert!(v.iter().all(|x| x.is_finite()), "cannot project non-finite values");
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    let mut x = v.mapv(|vi| (vi - theta).max(0.0));
    let s = x.sum();
    if s > 0.0 {
        x /= s;
    }
    x
}
