//! CDSK clustering and LPDSK label propagation.
//!
//! Both alternate a `Y`-step on the graph of `S^ker(α)` with a simplex QP in
//! `α` at hard labels. The objective tracked is
//!
//! ```text
//! G(α) = min_Y Tr(Yᵀ L(α) Y) − Σ_{i,j} (α_i+α_j)/2 K_ij + λ αᵀKα
//! ```
//!
//! where the inner minimum is over `YᵀDY = I_c` (CDSK, the sum of the `c`
//! smallest eigenvalues of the normalized Laplacian) or over `Y` with the
//! labeled rows fixed (LPDSK, the harmonic solution). The QP solves the
//! hard-label surrogate, so its minimizer is taken as a search direction:
//! `α ← α + t(α_qp − α)` with `t` halved from 1 until `G` does not increase.
//! When no step size helps the iteration stops.

use log::debug;
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Labeling, PartialLabeling};
use crate::error::{Error, Result};
use crate::graph::{build_graph, GraphBundle};
use crate::kernel::{bandwidth_heuristic, gram, Bandwidth, BandwidthMode, GramMatrix};
use crate::similarity::{
    discriminative_similarity_ker, discriminative_similarity_ker_unchecked, kernel_mass, labeled_objective_qp, Weights,
};
use crate::solvers::{cholesky_solve, kmeans, smallest_eigenvectors, solve_simplex_qp_from, QpOptions};

/// Step-halving budget of the `α` line search.
const MAX_HALVINGS: usize = 30;
/// Ridge added to `L_uu` before the Cholesky solve.
pub const HARMONIC_RIDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandwidthChoice {
    Fixed(f64),
    Heuristic(BandwidthMode),
}

impl Default for BandwidthChoice {
    fn default() -> Self {
        Self::Heuristic(BandwidthMode::Median)
    }
}

impl BandwidthChoice {
    pub fn resolve(self, ds: &Dataset) -> Result<Bandwidth> {
        match self {
            Self::Fixed(h) => Bandwidth::new(h),
            Self::Heuristic(mode) => bandwidth_heuristic(ds, mode),
        }
    }
}

/// Settings shared by both pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DskOptions {
    pub lambda: f64,
    pub bandwidth: BandwidthChoice,
    pub max_outer_iters: usize,
    pub qp: QpOptions,
    /// Stop once `G` improves by less than this fraction of its magnitude.
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
    /// Accept `λ > 2` (with a logged warning) instead of failing.
    pub allow_large_lambda: bool,
}

impl Default for DskOptions {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            bandwidth: BandwidthChoice::default(),
            max_outer_iters: 30,
            qp: QpOptions::default(),
            tol: 1e-8,
            seed: 0,
            restarts: 10,
            allow_large_lambda: false,
        }
    }
}

impl DskOptions {
    fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if self.lambda > 2.0 && !self.allow_large_lambda {
            return Err(Error::LambdaTooLarge(self.lambda));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be >= 0, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdskConfig {
    pub c: usize,
    pub options: DskOptions,
}

impl CdskConfig {
    pub fn new(c: usize) -> Self {
        Self {
            c,
            options: DskOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdskResult {
    pub labels: Labeling,
    pub alpha: Weights,
    /// `Y = D^{-1/2} V` at the final `α`.
    pub embedding: Array2<f64>,
    /// The `c` smallest eigenvalues of the normalized Laplacian at the final `α`.
    pub eigenvalues: Array1<f64>,
    /// `G(α)` at the start and after every accepted outer step.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub bandwidth: Bandwidth,
}

fn similarity(alpha: &Weights, k: &GramMatrix, opts: &DskOptions) -> Result<Array2<f64>> {
    let s = if opts.allow_large_lambda {
        discriminative_similarity_ker_unchecked(alpha, k, opts.lambda)?
    } else {
        discriminative_similarity_ker(alpha, k, opts.lambda)?
    };
    Ok(s.into_entries())
}

/// `−Σ (α_i+α_j)/2 K_ij + λ αᵀKα`.
fn weight_terms(alpha: &Weights, k: &GramMatrix, lambda: f64) -> f64 {
    let a = alpha.as_array();
    -kernel_mass(alpha, k) + lambda * a.dot(&k.entries().dot(a))
}

struct SpectralState {
    value: f64,
    eigenvalues: Array1<f64>,
    embedding: Array2<f64>,
}

fn spectral_state(alpha: &Weights, k: &GramMatrix, c: usize, opts: &DskOptions) -> Result<SpectralState> {
    let g = build_graph(&similarity(alpha, k, opts)?)?;
    let eig = smallest_eigenvectors(&g.normalized, c)?;
    let inv = g.inv_sqrt_degree();
    let mut embedding = eig.vectors;
    for (i, mut row) in embedding.rows_mut().into_iter().enumerate() {
        row *= inv[i];
    }
    let value = eig.values.sum() + weight_terms(alpha, k, opts.lambda);
    Ok(SpectralState {
        value,
        eigenvalues: eig.values,
        embedding,
    })
}

fn row_normalized(y: &Array2<f64>) -> Array2<f64> {
    let mut out = y.clone();
    for mut row in out.rows_mut() {
        let norm = row.dot(&row).sqrt();
        if norm > 0.0 {
            row /= norm;
        }
    }
    out
}

/// Line search along `α → α_qp` on a profile objective. Returns the first
/// step (from `t = 1`, halving) that does not increase it.
fn line_search<S>(
    alpha: &Weights,
    target: &Weights,
    current: f64,
    mut eval: impl FnMut(&Weights) -> Result<(f64, S)>,
) -> Result<Option<(Weights, f64, S)>> {
    let mut t = 1.0;
    for _ in 0..MAX_HALVINGS {
        let cand = alpha.lerp(target, t);
        let (v, state) = eval(&cand)?;
        if v <= current {
            return Ok(Some((cand, v, state)));
        }
        t *= 0.5;
    }
    Ok(None)
}

fn improved_enough(prev: f64, next: f64, tol: f64) -> bool {
    prev - next >= tol * prev.abs().max(f64::MIN_POSITIVE)
}

/// Clustering by coordinate descent on the learned similarity.
pub fn cdsk(ds: &Dataset, cfg: &CdskConfig) -> Result<CdskResult> {
    let opts = &cfg.options;
    opts.validate()?;
    let (n, c) = (ds.n(), cfg.c);
    if c < 2 || n <= c {
        return Err(Error::InvalidArgument(format!("need 2 <= c < n, got c = {c}, n = {n}")));
    }
    let h = opts.bandwidth.resolve(ds)?;
    let k = gram(ds, h);

    let mut alpha = Weights::uniform(n);
    let mut state = spectral_state(&alpha, &k, c, opts)?;
    let mut trace = vec![state.value];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_outer_iters {
        let labels = kmeans(&row_normalized(&state.embedding), c, opts.seed, opts.restarts)?.labels;
        let qp = labeled_objective_qp(&labels, &k, opts.lambda)?;
        let sol = solve_simplex_qp_from(&qp, &alpha, opts.qp)?;
        let step = line_search(&alpha, &sol.alpha, state.value, |a| {
            let s = spectral_state(a, &k, c, opts)?;
            Ok((s.value, s))
        })?;
        let Some((next, value, next_state)) = step else {
            debug!("cdsk: no descent along the QP direction at iteration {iterations}");
            converged = true;
            break;
        };
        iterations += 1;
        let enough = improved_enough(state.value, value, opts.tol);
        alpha = next;
        state = next_state;
        trace.push(value);
        if !enough {
            converged = true;
            break;
        }
    }

    let labels = kmeans(&row_normalized(&state.embedding), c, opts.seed, opts.restarts)?.labels;
    Ok(CdskResult {
        labels,
        alpha,
        embedding: state.embedding,
        eigenvalues: state.eigenvalues,
        objective_trace: trace,
        iterations,
        converged,
        bandwidth: h,
    })
}

/// Harmonic extension of the labeled rows over a similarity graph.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSolution {
    pub unlabeled: Vec<usize>,
    /// Soft labels of the unlabeled points, one row each in `unlabeled` order.
    pub y_u: Array2<f64>,
    /// Row argmax of `y_u`, ties to the smallest class id.
    pub labels: Vec<usize>,
    /// `Tr(Yᵀ L Y)` with the labeled rows set to their indicators.
    pub trace: f64,
    pub ridge: f64,
}

/// Connected components of the graph with edges where `S_ij > 0`.
fn components(s: &Array2<f64>) -> Vec<usize> {
    let n = s.nrows();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = next;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if j != i && s[[i, j]] > 0.0 && comp[j] == usize::MAX {
                    comp[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    comp
}

fn harmonic_on_graph(g: &GraphBundle, pl: &PartialLabeling) -> Result<HarmonicSolution> {
    let n = g.n();
    if pl.n() != n {
        return Err(Error::DimensionMismatch(format!("{} labels for {n} points", pl.n())));
    }
    let c = pl.c();
    let lab = pl.labeled_indices();
    let unl = pl.unlabeled_indices();

    let comp = components(&g.s);
    for &u in &unl {
        if !lab.iter().any(|&l| comp[l] == comp[u]) {
            let members: Vec<usize> = (0..n).filter(|&i| comp[i] == comp[u]).collect();
            return Err(Error::Singular(format!(
                "unlabeled component {members:?} has no labeled point"
            )));
        }
    }

    let mut f = Array2::zeros((lab.len(), c));
    for (r, &i) in lab.iter().enumerate() {
        f[[r, pl.labels()[i].expect("labeled") - 1]] = 1.0;
    }
    let l = &g.laplacian;
    let mut l_uu = Array2::zeros((unl.len(), unl.len()));
    for (a, &i) in unl.iter().enumerate() {
        for (b, &j) in unl.iter().enumerate() {
            l_uu[[a, b]] = l[[i, j]];
        }
        l_uu[[a, a]] += HARMONIC_RIDGE;
    }
    let mut rhs = Array2::zeros((unl.len(), c));
    for (a, &i) in unl.iter().enumerate() {
        for (r, &j) in lab.iter().enumerate() {
            let w = l[[i, j]];
            if w != 0.0 {
                for k in 0..c {
                    rhs[[a, k]] -= w * f[[r, k]];
                }
            }
        }
    }
    let y_u = cholesky_solve(&l_uu, &rhs)?;

    let mut y = Array2::zeros((n, c));
    for (r, &i) in lab.iter().enumerate() {
        y.row_mut(i).assign(&f.row(r));
    }
    for (a, &i) in unl.iter().enumerate() {
        y.row_mut(i).assign(&y_u.row(a));
    }
    let trace = (&y * &l.dot(&y)).sum();
    let labels = y_u
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for k in 1..c {
                if row[k] > row[best] {
                    best = k;
                }
            }
            best + 1
        })
        .collect();
    Ok(HarmonicSolution {
        unlabeled: unl,
        y_u,
        labels,
        trace,
        ridge: HARMONIC_RIDGE,
    })
}

/// Solves `(L_uu + ridge·I) Y_u = −L_ul F_l` on the graph of `s`. Fails,
/// naming the component, when some unlabeled point cannot reach a labeled one.
pub fn harmonic_solution(s: &Array2<f64>, pl: &PartialLabeling) -> Result<HarmonicSolution> {
    harmonic_on_graph(&build_graph(s)?, pl)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpdskResult {
    /// Indices of the unlabeled points.
    pub unlabeled: Vec<usize>,
    /// Predicted labels of the unlabeled points, in `unlabeled` order.
    pub labels: Vec<usize>,
    pub y_u: Array2<f64>,
    /// Given labels with the predictions filled in.
    pub full_labels: Labeling,
    pub alpha: Weights,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub bandwidth: Bandwidth,
    pub ridge: f64,
}

fn filled(pl: &PartialLabeling, h: &HarmonicSolution) -> Result<Labeling> {
    let mut out: Vec<usize> = pl.labels().iter().map(|y| y.unwrap_or(0)).collect();
    for (&i, &y) in h.unlabeled.iter().zip(&h.labels) {
        out[i] = y;
    }
    Labeling::new(out, pl.c())
}

/// Semi-supervised labeling by coordinate descent on the learned similarity.
pub fn lpdsk(ds: &Dataset, pl: &PartialLabeling, opts: &DskOptions) -> Result<LpdskResult> {
    opts.validate()?;
    if pl.n() != ds.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} points",
            pl.n(),
            ds.n()
        )));
    }
    let h = opts.bandwidth.resolve(ds)?;
    let k = gram(ds, h);
    let evaluate = |a: &Weights| -> Result<(f64, HarmonicSolution)> {
        let g = build_graph(&similarity(a, &k, opts)?)?;
        let sol = harmonic_on_graph(&g, pl)?;
        Ok((sol.trace + weight_terms(a, &k, opts.lambda), sol))
    };

    let mut alpha = Weights::uniform(ds.n());
    let (mut value, mut sol) = evaluate(&alpha)?;
    let mut trace = vec![value];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_outer_iters {
        let labels = filled(pl, &sol)?;
        let qp = labeled_objective_qp(&labels, &k, opts.lambda)?;
        let target = solve_simplex_qp_from(&qp, &alpha, opts.qp)?.alpha;
        let Some((next, v, next_sol)) = line_search(&alpha, &target, value, &evaluate)? else {
            debug!("lpdsk: no descent along the QP direction at iteration {iterations}");
            converged = true;
            break;
        };
        iterations += 1;
        let enough = improved_enough(value, v, opts.tol);
        alpha = next;
        value = v;
        sol = next_sol;
        trace.push(v);
        if !enough {
            converged = true;
            break;
        }
    }

    Ok(LpdskResult {
        full_labels: filled(pl, &sol)?,
        unlabeled: sol.unlabeled,
        labels: sol.labels,
        y_u: sol.y_u,
        alpha,
        objective_trace: trace,
        iterations,
        converged,
        bandwidth: h,
        ridge: sol.ridge,
    })
}
