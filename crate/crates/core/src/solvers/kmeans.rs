use ndarray::{Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::Labeling;
use crate::error::{Error, Result};

const MAX_LLOYD_ITERS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct KmeansResult {
    pub labels: Labeling,
    pub centroids: Array2<f64>,
    /// Within-cluster sum of squares of the returned partition.
    pub inertia: f64,
    /// Inertia after each Lloyd update of the winning restart.
    pub inertia_trace: Vec<f64>,
}

fn sq(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means with k-means++ seeding and Lloyd iterations to an assignment fixed
/// point, keeping the restart with the smallest inertia (earliest on ties).
///
/// A cluster that empties out is re-seeded at the point farthest from its own
/// centroid. All randomness comes from one ChaCha8 stream seeded by `seed`.
pub fn kmeans(rows: &Array2<f64>, c: usize, seed: u64, restarts: usize) -> Result<KmeansResult> {
    let n = rows.nrows();
    if c == 0 || c > n {
        return Err(Error::InvalidArgument(format!("need 1 <= c <= n = {n}, got c = {c}")));
    }
    if rows.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("k-means input".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KmeansResult> = None;
    for _ in 0..restarts.max(1) {
        let run = lloyd(rows, c, &mut rng)?;
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn seed_plus_plus(rows: &Array2<f64>, c: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let n = rows.nrows();
    let mut centroids = Array2::zeros((c, rows.ncols()));
    let first = rng.random_range(0..n);
    centroids.row_mut(0).assign(&rows.row(first));
    let mut d2: Vec<f64> = (0..n).map(|i| sq(rows.row(i), rows.row(first))).collect();
    for k in 1..c {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut idx = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    idx = i;
                    break;
                }
                u -= w;
            }
            idx
        } else {
            rng.random_range(0..n)
        };
        centroids.row_mut(k).assign(&rows.row(pick));
        for (i, di) in d2.iter_mut().enumerate() {
            *di = di.min(sq(rows.row(i), rows.row(pick)));
        }
    }
    centroids
}

fn assign(rows: &Array2<f64>, centroids: &Array2<f64>, out: &mut [usize]) -> bool {
    let mut changed = false;
    for (i, slot) in out.iter_mut().enumerate() {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for k in 0..centroids.nrows() {
            let d = sq(rows.row(i), centroids.row(k));
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        if *slot != best {
            *slot = best;
            changed = true;
        }
    }
    changed
}

fn update(rows: &Array2<f64>, assignment: &mut [usize], centroids: &mut Array2<f64>) {
    let c = centroids.nrows();
    loop {
        let mut counts = vec![0usize; c];
        centroids.fill(0.0);
        for (i, &k) in assignment.iter().enumerate() {
            counts[k] += 1;
            let mut row = centroids.row_mut(k);
            row += &rows.row(i);
        }
        for (k, &cnt) in counts.iter().enumerate() {
            if cnt > 0 {
                centroids.row_mut(k).mapv_inplace(|v| v / cnt as f64);
            }
        }
        let Some(empty) = counts.iter().position(|&cnt| cnt == 0) else {
            return;
        };
        // move the worst-fitting point from a cluster that can spare it
        let mut far = None;
        let mut far_d = -1.0;
        for (i, &k) in assignment.iter().enumerate() {
            if counts[k] < 2 {
                continue;
            }
            let d = sq(rows.row(i), centroids.row(k));
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        match far {
            Some(i) => assignment[i] = empty,
            None => return,
        }
    }
}

fn inertia(rows: &Array2<f64>, assignment: &[usize], centroids: &Array2<f64>) -> f64 {
    assignment
        .iter()
        .enumerate()
        .map(|(i, &k)| sq(rows.row(i), centroids.row(k)))
        .sum()
}

fn lloyd(rows: &Array2<f64>, c: usize, rng: &mut ChaCha8Rng) -> Result<KmeansResult> {
    let n = rows.nrows();
    let mut centroids = seed_plus_plus(rows, c, rng);
    let mut assignment = vec![usize::MAX; n];
    assign(rows, &centroids, &mut assignment);
    update(rows, &mut assignment, &mut centroids);
    let mut trace = vec![inertia(rows, &assignment, &centroids)];
    for _ in 0..MAX_LLOYD_ITERS {
        if !assign(rows, &centroids, &mut assignment) {
            break;
        }
        update(rows, &mut assignment, &mut centroids);
        trace.push(inertia(rows, &assignment, &centroids));
    }
    let labels = Labeling::new(assignment.iter().map(|k| k + 1).collect(), c)?;
    Ok(KmeansResult {
        labels,
        centroids,
        inertia: *trace.last().unwrap(),
        inertia_trace: trace,
    })
}
