//! Clustering accuracy under the best class matching, and NMI.

use serde::Serialize;

use crate::data::Labeling;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub ac: f64,
    pub nmi: f64,
    /// `confusion[p][t]`: samples predicted `p + 1` with truth `t + 1`.
    pub confusion: Vec<Vec<usize>>,
    /// Truth class assigned to each predicted class, `None` when a predicted
    /// class has no partner (more predicted than true classes).
    pub matching: Vec<Option<usize>>,
}

fn check(a: &Labeling, b: &Labeling) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(format!("{} vs {} labels", a.n(), b.n())));
    }
    Ok(())
}

pub fn confusion(pred: &Labeling, truth: &Labeling) -> Result<Vec<Vec<usize>>> {
    check(pred, truth)?;
    let mut m = vec![vec![0; truth.c()]; pred.c()];
    for (&p, &t) in pred.labels().iter().zip(truth.labels()) {
        m[p - 1][t - 1] += 1;
    }
    Ok(m)
}

/// Minimum-cost perfect assignment on a square matrix (Hungarian method with
/// potentials, O(k³)). Returns `col[row]`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let k = cost.len();
    let inf = f64::INFINITY;
    // 1-based arrays; index 0 is the virtual root
    let mut u = vec![0.0; k + 1];
    let mut v = vec![0.0; k + 1];
    let mut owner = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for row in 1..=k {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![inf; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0; k];
    for j in 1..=k {
        if owner[j] > 0 {
            col[owner[j] - 1] = j - 1;
        }
    }
    col
}

fn best_matching(conf: &[Vec<usize>], ct: usize) -> (usize, Vec<Option<usize>>) {
    let cp = conf.len();
    let k = cp.max(ct);
    let count = |p: usize, t: usize| if p < cp && t < ct { conf[p][t] } else { 0 };
    let cost: Vec<Vec<f64>> = (0..k)
        .map(|p| (0..k).map(|t| -(count(p, t) as f64)).collect())
        .collect();
    let col = min_cost_assignment(&cost);
    let hits = (0..cp).map(|p| count(p, col[p])).sum();
    let matching = (0..cp).map(|p| (col[p] < ct).then_some(col[p] + 1)).collect();
    (hits, matching)
}

/// Fraction of samples correct under the best one-to-one class matching.
pub fn accuracy(pred: &Labeling, truth: &Labeling) -> Result<f64> {
    let conf = confusion(pred, truth)?;
    let (hits, _) = best_matching(&conf, truth.c());
    Ok(hits as f64 / pred.n() as f64)
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&k| k > 0)
        .map(|k| {
            let p = k as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information over `√(H(a) H(b))`. When either entropy is zero the
/// value is 1 for identical partitions and 0 otherwise.
pub fn nmi(a: &Labeling, b: &Labeling) -> Result<f64> {
    let conf = confusion(a, b)?;
    let n = a.n() as f64;
    let ra: Vec<usize> = conf.iter().map(|r| r.iter().sum()).collect();
    let rb: Vec<usize> = (0..b.c()).map(|t| conf.iter().map(|r| r[t]).sum()).collect();
    let ha = entropy(ra.iter().copied(), n);
    let hb = entropy(rb.iter().copied(), n);
    if ha <= 0.0 || hb <= 0.0 {
        return Ok(if same_partition(a, b) { 1.0 } else { 0.0 });
    }
    let mut mi = 0.0;
    for (p, row) in conf.iter().enumerate() {
        for (t, &k) in row.iter().enumerate() {
            if k > 0 {
                let pij = k as f64 / n;
                mi += pij * (pij * n * n / (ra[p] as f64 * rb[t] as f64)).ln();
            }
        }
    }
    Ok((mi / (ha * hb).sqrt()).clamp(0.0, 1.0))
}

fn same_partition(a: &Labeling, b: &Labeling) -> bool {
    let mut ab = std::collections::HashMap::new();
    let mut ba = std::collections::HashMap::new();
    a.labels()
        .iter()
        .zip(b.labels())
        .all(|(x, y)| *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x)
}

pub fn metric_report(pred: &Labeling, truth: &Labeling) -> Result<MetricReport> {
    let conf = confusion(pred, truth)?;
    let (hits, matching) = best_matching(&conf, truth.c());
    Ok(MetricReport {
        ac: hits as f64 / pred.n() as f64,
        nmi: nmi(pred, truth)?,
        confusion: conf,
        matching,
    })
}
