//! Gaussian kernel, gram matrices and bandwidth selection.
//!
//! Two normalizations are in play. The classifier uses the bare kernel
//! `K_h(u) = exp(−‖u‖² / 2h²)` with `K_h(0) = 1`. Density estimates scale it by
//! `τ0 = 1 / ((2π)^{d/2} h^d)`, which makes it a unit-mass density; `τ1` is the
//! same constant at bandwidth `√2·h`, the width of the convolution of two
//! `K_h` bumps.

use std::f64::consts::{PI, SQRT_2};

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Positive, finite kernel bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(h: f64) -> Result<Self> {
        if h > 0.0 && h.is_finite() {
            Ok(Self(h))
        } else {
            Err(Error::InvalidArgument(format!(
                "bandwidth must be positive and finite, got {h}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn scaled(self, factor: f64) -> Result<Self> {
        Self::new(self.0 * factor)
    }
}

#[inline]
pub(crate) fn sq_dist(x: ArrayView1<'_, f64>, t: ArrayView1<'_, f64>) -> f64 {
    x.iter().zip(t.iter()).map(|(a, b)| (a - b) * (a - b)).sum()
}

#[inline]
pub(crate) fn kernel_from_sq_dist(d2: f64, h: Bandwidth) -> f64 {
    (-d2 / (2.0 * h.0 * h.0)).exp()
}

/// `exp(−‖x − t‖² / 2h²)`.
pub fn gaussian_kernel(x: ArrayView1<'_, f64>, t: ArrayView1<'_, f64>, h: Bandwidth) -> Result<f64> {
    if x.len() != t.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", x.len(), t.len())));
    }
    Ok(kernel_from_sq_dist(sq_dist(x, t), h))
}

/// Symmetric `n × n` kernel evaluations on a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: Array2<f64>,
    bandwidth: Bandwidth,
}

impl GramMatrix {
    /// Wraps precomputed kernel values; they must form a finite symmetric matrix.
    pub fn from_entries(entries: Array2<f64>, bandwidth: Bandwidth) -> Result<Self> {
        let entries = crate::solvers::symmetrized(&entries, 1e-12)?;
        Ok(Self { entries, bandwidth })
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn bandwidth(&self) -> Bandwidth {
        self.bandwidth
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn into_entries(self) -> Array2<f64> {
        self.entries
    }
}

/// `K_ij = K_h(x_i − x_j)`; only `i ≤ j` is evaluated and mirrored, so the
/// result is exactly symmetric with unit diagonal.
pub fn gram(ds: &Dataset, h: Bandwidth) -> GramMatrix {
    let n = ds.n();
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        entries[[i, i]] = 1.0;
        for j in (i + 1)..n {
            let k = kernel_from_sq_dist(sq_dist(ds.row(i), ds.row(j)), h);
            entries[[i, j]] = k;
            entries[[j, i]] = k;
        }
    }
    GramMatrix { entries, bandwidth: h }
}

/// Gram matrix at bandwidth `√2·h`.
pub fn gram_scaled_sqrt2(ds: &Dataset, h: Bandwidth) -> GramMatrix {
    gram(ds, Bandwidth(h.0 * SQRT_2))
}

/// Normalizing constants of the weighted KDE in `d` dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KdeConstants {
    /// `1 / ((2π)^{d/2} h^d)`.
    pub tau0: f64,
    /// `1 / ((2π)^{d/2} (√2 h)^d)`.
    pub tau1: f64,
}

impl KdeConstants {
    pub fn new(d: usize, h: Bandwidth) -> Self {
        let d = d as f64;
        let base = (2.0 * PI).powf(d / 2.0);
        Self {
            tau0: 1.0 / (base * h.0.powf(d)),
            tau1: 1.0 / (base * (SQRT_2 * h.0).powf(d)),
        }
    }
}

/// Gaussian kernel normalized to unit integral over `R^d`.
pub fn normalized_gaussian_kernel(x: ArrayView1<'_, f64>, t: ArrayView1<'_, f64>, h: Bandwidth) -> Result<f64> {
    Ok(KdeConstants::new(x.len(), h).tau0 * gaussian_kernel(x, t, h)?)
}

/// Scale statistic over all pairwise Euclidean distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandwidthMode {
    #[default]
    Median,
    MeanDist,
    /// Standard deviation of the pairwise distances.
    Variance,
}

impl std::str::FromStr for BandwidthMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(Self::Median),
            "mean-dist" => Ok(Self::MeanDist),
            "variance" => Ok(Self::Variance),
            other => Err(Error::InvalidArgument(format!("unknown bandwidth mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for BandwidthMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Median => "median",
            Self::MeanDist => "mean-dist",
            Self::Variance => "variance",
        })
    }
}

/// Bandwidth from the pairwise-distance distribution. The median of an even
/// number of distances is the mean of the two middle ones.
pub fn bandwidth_heuristic(ds: &Dataset, mode: BandwidthMode) -> Result<Bandwidth> {
    let n = ds.n();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "bandwidth heuristic needs at least 2 points".into(),
        ));
    }
    let mut dists = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            dists.push(sq_dist(ds.row(i), ds.row(j)).sqrt());
        }
    }
    let m = dists.len() as f64;
    let h = match mode {
        BandwidthMode::Median => {
            dists.sort_by(f64::total_cmp);
            let k = dists.len();
            if k % 2 == 1 {
                dists[k / 2]
            } else {
                0.5 * (dists[k / 2 - 1] + dists[k / 2])
            }
        }
        BandwidthMode::MeanDist => dists.iter().sum::<f64>() / m,
        BandwidthMode::Variance => {
            let mean = dists.iter().sum::<f64>() / m;
            (dists.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m).sqrt()
        }
    };
    if h > 0.0 && h.is_finite() {
        Ok(Bandwidth(h))
    } else {
        Err(Error::ZeroScale(format!("{mode} of pairwise distances is {h}")))
    }
}
