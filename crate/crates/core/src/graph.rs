//! Similarity graphs: degrees, Laplacians and cuts.

use ndarray::{Array1, Array2};

use crate::data::Labeling;
use crate::error::{Error, Result};

/// Degree floor used inside `D^{-1/2}`; vertices at or below it are isolated.
pub const ISOLATED_DEGREE: f64 = 1e-12;

/// A similarity graph with its Laplacians. Self-loops are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphBundle {
    pub s: Array2<f64>,
    pub degree: Array1<f64>,
    /// `D − S`.
    pub laplacian: Array2<f64>,
    /// `D^{-1/2} (D − S) D^{-1/2}`.
    pub normalized: Array2<f64>,
    /// Vertices with degree ≤ [`ISOLATED_DEGREE`].
    pub isolated: Vec<usize>,
}

impl GraphBundle {
    pub fn n(&self) -> usize {
        self.degree.len()
    }

    /// `D^{-1/2}` with the isolated-vertex floor applied.
    pub fn inv_sqrt_degree(&self) -> Array1<f64> {
        self.degree.mapv(|d| 1.0 / d.max(ISOLATED_DEGREE).sqrt())
    }
}

/// Builds the graph of a symmetric nonnegative similarity.
///
/// Negative entries are rejected, except roundoff-sized ones
/// (`≥ −1e-14 · max|S|`), which are clamped to zero.
pub fn build_graph(s: &Array2<f64>) -> Result<GraphBundle> {
    let mut s = crate::solvers::symmetrized(s, 1e-10)?;
    let n = s.nrows();
    if n == 0 {
        return Err(Error::Empty("similarity matrix".into()));
    }
    for i in 0..n {
        s[[i, i]] = 0.0;
    }
    let scale = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::ZeroSimilarity);
    }
    for ((row, col), v) in s.indexed_iter_mut() {
        if *v < 0.0 {
            if *v >= -1e-14 * scale {
                *v = 0.0;
            } else {
                return Err(Error::NegativeSimilarity { row, col, value: *v });
            }
        }
    }
    let degree = s.sum_axis(ndarray::Axis(1));
    let mut laplacian = -&s;
    for i in 0..n {
        laplacian[[i, i]] = degree[i];
    }
    let isolated = (0..n).filter(|&i| degree[i] <= ISOLATED_DEGREE).collect();
    let inv = degree.mapv(|d| 1.0 / d.max(ISOLATED_DEGREE).sqrt());
    let mut normalized = laplacian.clone();
    for ((i, j), v) in normalized.indexed_iter_mut() {
        *v *= inv[i] * inv[j];
    }
    Ok(GraphBundle {
        s,
        degree,
        laplacian,
        normalized,
        isolated,
    })
}

/// Binary `n × c` membership matrix of a labeling.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelIndicator(Array2<f64>);

impl LabelIndicator {
    pub fn new(labels: &Labeling) -> Self {
        let mut y = Array2::zeros((labels.n(), labels.c()));
        for (i, &l) in labels.labels().iter().enumerate() {
            y[[i, l - 1]] = 1.0;
        }
        Self(y)
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.0
    }
}

/// `Σ_{i<j} S_ij 1{y_i ≠ y_j}`.
pub fn cut_value(s: &Array2<f64>, labels: &Labeling) -> Result<f64> {
    let n = labels.n();
    if s.dim() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "S is {:?}, labeling has {n} entries",
            s.dim()
        )));
    }
    let y = labels.labels();
    let mut cut = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            if y[i] != y[j] {
                cut += s[[i, j]];
            }
        }
    }
    Ok(cut)
}

/// `trace(Yᵀ L Y)`. For an indicator `Y` this is twice the cut, since each
/// crossing pair shows up in two columns.
pub fn trace_quadratic(y: &Array2<f64>, l: &Array2<f64>) -> Result<f64> {
    let n = l.nrows();
    if l.ncols() != n || y.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "Y is {:?}, L is {:?}",
            y.dim(),
            l.dim()
        )));
    }
    let ly = l.dot(y);
    Ok((y * &ly).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::symmetric_eigen;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_nodes() {
        let w = 0.7;
        let g = build_graph(&array![[5.0, w], [w, 5.0]]).unwrap();
        assert_eq!(g.laplacian, array![[w, -w], [-w, w]]);
        let e = symmetric_eigen(&g.laplacian).unwrap();
        assert!(e.values[0].abs() < 1e-15 && (e.values[1] - 2.0 * w).abs() < 1e-15);
    }

    #[test]
    fn complete_three() {
        let g = build_graph(&Array2::ones((3, 3))).unwrap();
        assert_eq!(g.degree, array![2.0, 2.0, 2.0]);
        let e = symmetric_eigen(&g.normalized).unwrap();
        for (v, t) in e.values.iter().zip([0.0, 1.5, 1.5]) {
            assert!((v - t).abs() < 1e-12);
        }
    }

    #[test]
    fn two_components() {
        let s = array![
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 2.0],
            [0.0, 0.0, 2.0, 0.0]
        ];
        let g = build_graph(&s).unwrap();
        let e = symmetric_eigen(&g.laplacian).unwrap();
        assert!(e.values[0].abs() < 1e-12 && e.values[1].abs() < 1e-12 && e.values[2] > 0.5);
    }

    #[test]
    fn rejects_and_flags() {
        assert!(matches!(
            build_graph(&array![[0.0, -1.0], [-1.0, 0.0]]),
            Err(Error::NegativeSimilarity { .. })
        ));
        assert!(matches!(build_graph(&Array2::eye(3)), Err(Error::ZeroSimilarity)));
        let g = build_graph(&array![[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        assert_eq!(g.isolated, vec![2]);
        assert!(g.normalized.iter().all(|v| v.is_finite()));
        let tiny = build_graph(&array![[0.0, 1.0, -1e-17], [1.0, 0.0, 1.0], [-1e-17, 1.0, 0.0]]).unwrap();
        assert_eq!(tiny.s[[0, 2]], 0.0);
    }

    #[test]
    fn cut_examples() {
        let s = Array2::ones((3, 3));
        let same = Labeling::new(vec![1, 1, 1], 1).unwrap();
        assert_eq!(cut_value(&s, &same).unwrap(), 0.0);
        assert_eq!(cut_value(&s, &Labeling::new(vec![1, 1, 2], 2).unwrap()).unwrap(), 2.0);
        assert_eq!(cut_value(&s, &Labeling::new(vec![1, 2, 3], 3).unwrap()).unwrap(), 3.0);
    }

    #[test]
    fn trace_examples_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.random_range(2..11);
            let c = rng.random_range(1..4);
            let mut s = Array2::zeros((n, n));
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = rng.random::<f64>();
                    s[[i, j]] = v;
                    s[[j, i]] = v;
                }
            }
            let g = build_graph(&s).unwrap();
            let labels = Labeling::new((0..n).map(|_| rng.random_range(1..=c)).collect(), c).unwrap();
            let y = LabelIndicator::new(&labels);
            let t = trace_quadratic(y.matrix(), &g.laplacian).unwrap();
            assert!((t - 2.0 * cut_value(&g.s, &labels).unwrap()).abs() <= 1e-12);
            assert!(trace_quadratic(&Array2::ones((n, 2)), &g.laplacian).unwrap().abs() < 1e-12);
            assert_eq!(trace_quadratic(&Array2::zeros((n, 2)), &g.laplacian).unwrap(), 0.0);
            assert!(g.laplacian.sum_axis(ndarray::Axis(1)).iter().all(|v| v.abs() < 1e-10));
            let e = symmetric_eigen(&g.normalized).unwrap();
            assert!(e.values[0] >= -1e-8 && e.values[n - 1] <= 2.0 + 1e-8);
        }
    }

    #[test]
    fn cut_ignores_class_names() {
        let s = array![[0.0, 0.3, 0.5], [0.3, 0.0, 0.2], [0.5, 0.2, 0.0]];
        let a = Labeling::new(vec![1, 2, 2], 2).unwrap();
        let b = Labeling::new(vec![2, 1, 1], 2).unwrap();
        assert_eq!(cut_value(&s, &a).unwrap(), cut_value(&s, &b).unwrap());
    }
}
