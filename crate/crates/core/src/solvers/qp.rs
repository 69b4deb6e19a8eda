use ndarray::{Array1, Array2};

use super::simplex::project_raw;
use crate::error::{Error, Result};
use crate::similarity::Weights;

/// `min xᵀQx + cᵀx` over the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    q: Array2<f64>,
    c: Array1<f64>,
}

impl QpProblem {
    /// `q` is symmetrized on construction (asymmetry up to `1e-8` relative is
    /// tolerated).
    pub fn new(q: Array2<f64>, c: Array1<f64>) -> Result<Self> {
        let q = super::symmetrized(&q, 1e-8)?;
        if c.len() != q.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "linear term has {} entries, Q is {}x{}",
                c.len(),
                q.nrows(),
                q.ncols()
            )));
        }
        if q.nrows() == 0 {
            return Err(Error::Empty("QP has no variables".into()));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("QP linear term".into()));
        }
        Ok(Self { q, c })
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn q(&self) -> &Array2<f64> {
        &self.q
    }

    pub fn c(&self) -> &Array1<f64> {
        &self.c
    }

    pub fn objective(&self, x: &Array1<f64>) -> f64 {
        x.dot(&self.q.dot(x)) + self.c.dot(x)
    }

    pub fn gradient(&self, x: &Array1<f64>) -> Array1<f64> {
        self.q.dot(x) * 2.0 + &self.c
    }

    /// `‖x − P(x − ∇f(x))‖∞`, zero exactly at KKT points.
    pub fn kkt_residual(&self, x: &Array1<f64>) -> f64 {
        let g = self.gradient(x);
        let p = project_raw((x - &g).view());
        (x - &p).iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for QpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub alpha: Weights,
    pub objective: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every accepted step, starting with the initial point.
    pub objective_trace: Vec<f64>,
}

/// Projected gradient descent from the uniform point `1/n`.
pub fn solve_simplex_qp(p: &QpProblem, opts: QpOptions) -> Result<QpSolution> {
    let start = Weights::uniform(p.n());
    solve_simplex_qp_from(p, &start, opts)
}

/// Projected gradient descent with backtracking from a given feasible start.
///
/// The first trial step is `1/L` with `L = 2‖Q‖_F`, an upper bound on the
/// gradient's Lipschitz constant; each iteration retries at twice the last
/// accepted step and halves until the sufficient-decrease test
/// `f(x⁺) ≤ f(x) + ∇f·(x⁺ − x) + ‖x⁺ − x‖²/2t` passes. Accepted steps never
/// increase the objective.
pub fn solve_simplex_qp_from(p: &QpProblem, start: &Weights, opts: QpOptions) -> Result<QpSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    if start.len() != p.n() {
        return Err(Error::DimensionMismatch(format!(
            "start has {} entries, QP has {}",
            start.len(),
            p.n()
        )));
    }
    let lip = 2.0 * p.q.iter().map(|v| v * v).sum::<f64>().sqrt();
    // halved so the first trial step is exactly 1/L
    let mut step = if lip > 0.0 { 0.5 / lip } else { 0.5 };

    let mut x = start.as_array().clone();
    let mut f = p.objective(&x);
    if !f.is_finite() {
        return Err(Error::NonFinite(format!("QP objective {f} at start")));
    }
    let mut trace = vec![f];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let g = p.gradient(&x);
        let full = project_raw((&x - &g).view());
        let residual = (&x - &full).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual <= opts.tol {
            converged = true;
            break;
        }
        iterations += 1;

        let slack = 1e-14 * (1.0 + f.abs());
        let mut t = step * 2.0;
        let mut accepted = None;
        for _ in 0..200 {
            let cand = project_raw((&x - &(&g * t)).view());
            let d = &cand - &x;
            let dd = d.dot(&d);
            if dd == 0.0 {
                break;
            }
            let fc = p.objective(&cand);
            if !fc.is_finite() {
                return Err(Error::NonFinite(format!("QP objective {fc} at iteration {iterations}")));
            }
            // f(x + d) − f(x) − ∇f·d is exactly dᵀQd for a quadratic; testing
            // it directly avoids cancellation near the optimum
            let curvature = d.dot(&p.q.dot(&d));
            if curvature <= dd / (2.0 * t) && fc <= f + slack {
                accepted = Some((cand, fc));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((cand, fc)) => {
                x = cand;
                f = fc.min(f);
                step = t;
                trace.push(f);
            }
            // no representable descent step remains
            None => break,
        }
    }
    let kkt_residual = p.kkt_residual(&x);
    converged = converged || kkt_residual <= opts.tol;
    Ok(QpSolution {
        alpha: Weights::from_projection(x),
        objective: f,
        kkt_residual,
        iterations,
        converged,
        objective_trace: trace,
    })
}
