//! Discriminative similarities and the regularizers they come from.
//!
//! For simplex weights `α`, a labeling `y` and a gram matrix `K`, the
//! bound-minimization objective
//!
//! ```text
//! Σ_{i<j} 2(α_i + α_j) K_ij 1{y_i ≠ y_j} − Σ_{i,j} (α_i + α_j)/2 K_ij + λ Ω(α),
//! Ω(α) = Σ_y α^(y)ᵀ K α^(y)
//! ```
//!
//! is rewritten with `λ αᵀKα` as regularizer by moving the cross-class part of
//! `Ω` into the pairwise term, which yields `S^ker_ij = 2(α_i + α_j − λ α_i α_j) K_ij`.
//! [`regularized_objective`] and [`similarity_objective`] evaluate both forms.

use log::warn;
use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::data::Labeling;
use crate::error::{Error, Result};
use crate::kernel::GramMatrix;
use crate::solvers::{symmetric_eigen, QpProblem};

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights(Array1<f64>);

impl Weights {
    pub fn new(alpha: Array1<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::Empty("weights".into()));
        }
        if let Some((i, v)) = alpha.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "weight {i} = {v} is not a finite nonnegative number"
            )));
        }
        let s = alpha.sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {s}, expected 1")));
        }
        Ok(Self(alpha))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform weights need n > 0");
        Self(Array1::from_elem(n, 1.0 / n as f64))
    }

    pub fn one_hot(n: usize, i: usize) -> Self {
        let mut a = Array1::zeros(n);
        a[i] = 1.0;
        Self(a)
    }

    /// Wraps the output of a simplex projection.
    pub(crate) fn from_projection(alpha: Array1<f64>) -> Self {
        debug_assert!(alpha.iter().all(|&v| v >= 0.0));
        debug_assert!((alpha.sum() - 1.0).abs() <= 1e-10);
        Self(alpha)
    }

    pub fn as_array(&self) -> &Array1<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array1<f64> {
        self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Convex combination `(1 − t)·self + t·other`.
    pub fn lerp(&self, other: &Weights, t: f64) -> Weights {
        let v = &self.0 * (1.0 - t) + &other.0 * t;
        let s = v.sum();
        Self(v / s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityKind {
    Ker,
    Ise,
    Sim,
}

/// Symmetric pairwise similarity produced by one of the constructors below.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    entries: Array2<f64>,
    kind: SimilarityKind,
}

impl SimilarityMatrix {
    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn kind(&self) -> SimilarityKind {
        self.kind
    }

    pub fn into_entries(self) -> Array2<f64> {
        self.entries
    }
}

/// `S = S⁺ − S⁻` with both parts PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSplit {
    pub s_plus: Array2<f64>,
    pub s_minus: Array2<f64>,
    /// Spectrum of the symmetrized input, ascending.
    pub eigenvalues: Array1<f64>,
}

impl KernelSplit {
    /// `‖S − (S⁺ − S⁻)‖∞` (max absolute entry).
    pub fn reconstruction_error(&self, s: &Array2<f64>) -> f64 {
        (s - &self.s_plus + &self.s_minus)
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Smallest eigenvalues of `S⁺` and `S⁻`.
    pub fn min_eigenvalues(&self) -> Result<(f64, f64)> {
        let p = symmetric_eigen(&self.s_plus)?.values[0];
        let m = symmetric_eigen(&self.s_minus)?.values[0];
        Ok((p, m))
    }

    /// `R²`-style bound on the diagonals: `max_i max(S⁺_ii, S⁻_ii)`.
    pub fn diag_sup(&self) -> f64 {
        self.s_plus
            .diag()
            .iter()
            .chain(self.s_minus.diag().iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

fn check_square(m: &Array2<f64>, n: usize, what: &str) -> Result<()> {
    if m.dim() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {:?}, expected {n}x{n}",
            m.dim()
        )));
    }
    Ok(())
}

/// `α^(y)`: entry `i` is `α_i` when `y_i = y`, else 0.
pub fn class_masked_weights(alpha: &Weights, labels: &Labeling, y: usize) -> Result<Array1<f64>> {
    labels.check_len(alpha.len())?;
    if y == 0 || y > labels.c() {
        return Err(Error::ClassOutOfRange {
            class: y,
            classes: labels.c(),
        });
    }
    Ok(Array1::from_iter(
        alpha
            .0
            .iter()
            .zip(labels.labels())
            .map(|(&a, &yi)| if yi == y { a } else { 0.0 }),
    ))
}

/// `Σ_y α^(y)ᵀ M α^(y) = Σ_{i,j: y_i = y_j} α_i α_j M_ij`.
pub fn class_quadratic(alpha: &Weights, labels: &Labeling, m: &Array2<f64>) -> Result<f64> {
    let n = alpha.len();
    labels.check_len(n)?;
    check_square(m, n, "matrix")?;
    let mut total = 0.0;
    for y in 1..=labels.c() {
        let ay = class_masked_weights(alpha, labels, y)?;
        total += ay.dot(&m.dot(&ay));
    }
    Ok(total)
}

/// `Ω(α) = Σ_y α^(y)ᵀ K α^(y)`.
pub fn omega(alpha: &Weights, labels: &Labeling, k: &GramMatrix) -> Result<f64> {
    class_quadratic(alpha, labels, k.entries())
}

fn pairwise(
    alpha: &Weights,
    k: &Array2<f64>,
    scale: f64,
    lambda: f64,
    kind: SimilarityKind,
) -> Result<SimilarityMatrix> {
    let n = alpha.len();
    check_square(k, n, "gram matrix")?;
    let a = &alpha.0;
    let mut s = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = scale * (a[i] + a[j] - lambda * a[i] * a[j]) * k[[i, j]];
            s[[i, j]] = v;
            s[[j, i]] = v;
        }
    }
    Ok(SimilarityMatrix { entries: s, kind })
}

/// `S^ker_ij = 2(α_i + α_j − λ α_i α_j) K_ij`. Rejects `λ > 2`, beyond which
/// entries can turn negative; see [`discriminative_similarity_ker_unchecked`].
pub fn discriminative_similarity_ker(alpha: &Weights, k: &GramMatrix, lambda: f64) -> Result<SimilarityMatrix> {
    if lambda > 2.0 || !lambda.is_finite() {
        return Err(Error::LambdaTooLarge(lambda));
    }
    pairwise(alpha, k.entries(), 2.0, lambda, SimilarityKind::Ker)
}

/// As [`discriminative_similarity_ker`] but accepts any `λ`, logging a
/// warning when `λ > 2`.
pub fn discriminative_similarity_ker_unchecked(
    alpha: &Weights,
    k: &GramMatrix,
    lambda: f64,
) -> Result<SimilarityMatrix> {
    if lambda > 2.0 {
        warn!("lambda = {lambda} > 2: S^ker may have negative entries");
    }
    pairwise(alpha, k.entries(), 2.0, lambda, SimilarityKind::Ker)
}

/// `S^ise_ij = 4(α_i + α_j − λ1 α_i α_j) K_ij`, the similarity read off the
/// ISE bound of the weighted KDE classifier.
pub fn discriminative_similarity_ise(alpha: &Weights, k: &GramMatrix, lambda1: f64) -> Result<SimilarityMatrix> {
    if !(lambda1 >= 0.0) || !lambda1.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda1 must be >= 0, got {lambda1}")));
    }
    pairwise(alpha, k.entries(), 4.0, lambda1, SimilarityKind::Ise)
}

/// Splits a symmetric matrix into PSD parts through its spectrum:
/// `S⁺ = U max(Λ, 0) Uᵀ`, `S⁻ = U max(−Λ, 0) Uᵀ`. Eigenvalues within
/// `1e-10 · ‖S‖₂` of zero are dropped, so roundoff never leaks into `S⁻`.
pub fn decompose_similarity(s: &Array2<f64>) -> Result<KernelSplit> {
    let eig = symmetric_eigen(s)?;
    let n = s.nrows();
    let spectral = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cutoff = 1e-10 * spectral;
    let mut s_plus = Array2::zeros((n, n));
    let mut s_minus = Array2::zeros((n, n));
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam.abs() <= cutoff {
            continue;
        }
        let target = if lam > 0.0 { &mut s_plus } else { &mut s_minus };
        let w = lam.abs();
        let v = eig.vectors.column(k);
        for i in 0..n {
            let wi = w * v[i];
            for j in i..n {
                target[[i, j]] += wi * v[j];
            }
        }
    }
    for m in [&mut s_plus, &mut s_minus] {
        for i in 0..n {
            for j in 0..i {
                m[[i, j]] = m[[j, i]];
            }
        }
    }
    Ok(KernelSplit {
        s_plus,
        s_minus,
        eigenvalues: eig.values,
    })
}

/// `S^sim_ij = 2(α_i + α_j) S_ij − 2λ α_i α_j S⁺_ij − 2λ α_i α_j S⁻_ij`.
pub fn discriminative_similarity_sim(
    alpha: &Weights,
    s: &Array2<f64>,
    split: &KernelSplit,
    lambda: f64,
) -> Result<SimilarityMatrix> {
    let n = alpha.len();
    check_square(s, n, "similarity")?;
    check_square(&split.s_plus, n, "S+")?;
    check_square(&split.s_minus, n, "S-")?;
    let scale = s.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let err = split.reconstruction_error(s);
    if err > 1e-8 * scale {
        return Err(Error::InvalidArgument(format!(
            "split does not reconstruct S (error {err})"
        )));
    }
    let a = &alpha.0;
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = 2.0 * (a[i] + a[j]) * s[[i, j]]
                - 2.0 * lambda * a[i] * a[j] * (split.s_plus[[i, j]] + split.s_minus[[i, j]]);
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
    }
    Ok(SimilarityMatrix {
        entries: out,
        kind: SimilarityKind::Sim,
    })
}

/// `(Ω⁺, Ω⁻)`: the class-masked quadratic forms of `S⁺` and `S⁻`.
pub fn omega_plus_minus(alpha: &Weights, labels: &Labeling, split: &KernelSplit) -> Result<(f64, f64)> {
    Ok((
        class_quadratic(alpha, labels, &split.s_plus)?,
        class_quadratic(alpha, labels, &split.s_minus)?,
    ))
}

/// `Σ_{i,j} (α_i + α_j)/2 K_ij`.
pub fn kernel_mass(alpha: &Weights, k: &GramMatrix) -> f64 {
    -mass_term(&alpha.0, k.entries())
}

/// `−Σ_{i,j} (α_i + α_j)/2 K_ij`, the term shared by both objective forms.
fn mass_term(a: &Array1<f64>, k: &Array2<f64>) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += 0.5 * (a[i] + a[j]) * k[[i, j]];
        }
    }
    -s
}

/// Bound objective with the class-masked regularizer:
/// `Σ_{i<j} 2(α_i+α_j) K_ij 1{y_i≠y_j} − Σ_{i,j} (α_i+α_j)/2 K_ij + λ Ω(α)`.
pub fn regularized_objective(alpha: &Weights, labels: &Labeling, k: &GramMatrix, lambda: f64) -> Result<f64> {
    let n = alpha.len();
    labels.check_len(n)?;
    let (a, km, y) = (&alpha.0, k.entries(), labels.labels());
    check_square(km, n, "gram matrix")?;
    let mut cut = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            if y[i] != y[j] {
                cut += 2.0 * (a[i] + a[j]) * km[[i, j]];
            }
        }
    }
    Ok(cut + mass_term(a, km) + lambda * omega(alpha, labels, k)?)
}

/// The same objective written with `S^ker` and `λ αᵀKα`:
/// `Σ_{i<j} S^ker_ij 1{y_i≠y_j} − Σ_{i,j} (α_i+α_j)/2 K_ij + λ αᵀKα`.
pub fn similarity_objective(alpha: &Weights, labels: &Labeling, k: &GramMatrix, lambda: f64) -> Result<f64> {
    let n = alpha.len();
    labels.check_len(n)?;
    let s = pairwise(alpha, k.entries(), 2.0, lambda, SimilarityKind::Ker)?;
    let (a, km, y) = (&alpha.0, k.entries(), labels.labels());
    let mut cut = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            if y[i] != y[j] {
                cut += s.entries[[i, j]];
            }
        }
    }
    Ok(cut + mass_term(a, km) + lambda * a.dot(&km.dot(a)))
}

/// The objective at fixed labels as a simplex QP in `α`:
/// quadratic term `λ K ∘ 1{y_i = y_j}` and linear term
/// `c_i = 2 Σ_{j: y_j ≠ y_i} K_ij − Σ_j K_ij`.
pub fn labeled_objective_qp(labels: &Labeling, k: &GramMatrix, lambda: f64) -> Result<QpProblem> {
    let km = k.entries();
    let n = km.nrows();
    labels.check_len(n)?;
    let y = labels.labels();
    let mut q = Array2::zeros((n, n));
    let mut c = Array1::zeros(n);
    for i in 0..n {
        let mut cross = 0.0;
        let mut row = 0.0;
        for j in 0..n {
            row += km[[i, j]];
            if y[i] == y[j] {
                q[[i, j]] = lambda * km[[i, j]];
            } else {
                cross += km[[i, j]];
            }
        }
        c[i] = 2.0 * cross - row;
    }
    QpProblem::new(q, c)
}
