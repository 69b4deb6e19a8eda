//! # discsim
//!
//! Discriminative similarity learning for clustering and graph-based
//! semi-supervised learning.
//!
//! A weighted kernel classifier `f(x) = argmax_y Σ_{i: y_i = y} α_i K_h(x − x_i)`
//! trained on a hypothetical labeling has a generalization bound whose
//! data-dependent part is a sum of pairwise similarities across classes:
//!
//! ```text
//! S_ij = 2 (α_i + α_j − λ α_i α_j) K_h(x_i − x_j)
//! ```
//!
//! Minimizing that bound jointly over the labeling and the weights `α` gives
//! two algorithms:
//!
//! - [`pipelines::cdsk`]: spectral clustering on the learned similarity,
//!   alternating with a simplex-constrained QP over `α`.
//! - [`pipelines::lpdsk`]: harmonic label propagation on the learned
//!   similarity, alternating with the same QP.
//!
//! The [`classifier`] module evaluates the bound quantities themselves
//! (margins, both empirical-error forms, the Rademacher and ISE bounds, the
//! general-similarity and similarity-machine bounds), and [`similarity`]
//! covers the PSD split of an indefinite similarity.
//!
//! ## Modules
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`data`] | datasets, CSV I/O, standardization, synthetic generators |
//! | [`kernel`] | Gaussian kernel, gram matrices, bandwidth heuristics |
//! | [`similarity`] | weights, Ω regularizers, `S^ker` / `S^ise` / `S^sim`, PSD split |
//! | [`graph`] | degree, Laplacians, cut values |
//! | [`classifier`] | kernel and KDE classifiers, bound evaluators |
//! | [`solvers`] | simplex projection, simplex QP, Jacobi eigensolver, k-means |
//! | [`pipelines`] | CDSK and LPDSK |
//! | [`eval`] | Hungarian-matched accuracy and NMI |

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod data;
pub mod error;
pub mod eval;
pub mod graph;
pub mod kernel;
pub mod pipelines;
pub mod similarity;
pub mod solvers;

pub use error::{Error, Result};
