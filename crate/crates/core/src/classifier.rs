//! Kernel and KDE classifiers and the bound evaluators built on them.
//!
//! The kernel classifier scores class `y` at `x` by
//! `h(x, y) = Σ_{i: y_i = y} α_i K_h(x − x_i)` and predicts the argmax. The
//! bounds are closed forms in the margins, the class-masked regularizers and
//! the sample size; none of them is clipped to `[0, 1]`.

use log::warn;
use ndarray::{Array1, Array2, ArrayView1};
use serde::Serialize;

use crate::data::{Dataset, Labeling};
use crate::error::{Error, Result};
use crate::kernel::{gaussian_kernel, gram, gram_scaled_sqrt2, Bandwidth, GramMatrix, KdeConstants};
use crate::similarity::{class_quadratic, decompose_similarity, omega, KernelSplit, Weights};

/// `Φ(t)`: 1 for `t ≤ 0`, `1 − t` on `(0, 1)`, 0 for `t ≥ 1`.
pub fn phi(t: f64) -> f64 {
    if t <= 0.0 {
        1.0
    } else if t < 1.0 {
        1.0 - t
    } else {
        0.0
    }
}

/// Margin cost with scale `γ`: `Φ(t / γ)`.
pub fn ramp(t: f64, gamma: f64) -> f64 {
    phi(t / gamma)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {delta}")))
    }
}

fn check_cap(name: &'static str, value: f64, cap: f64) -> Result<()> {
    let cap2 = cap * cap;
    if value > cap2 + 1e-12 * cap2.max(1.0) {
        return Err(Error::CapViolated { name, value, cap: cap2 });
    }
    Ok(())
}

/// Per-sample arguments `(h(x_i, y_i) − Σ_{y ≠ y_i} h(x_i, y)) / γ` for a
/// similarity matrix over the training points.
fn sample_arguments(s: &Array2<f64>, labels: &Labeling, alpha: &Weights, gamma: f64) -> Vec<f64> {
    let y = labels.labels();
    let a = alpha.as_array();
    (0..y.len())
        .map(|i| {
            let mut v = 0.0;
            for j in 0..y.len() {
                let w = a[j] * s[[i, j]];
                if y[j] == y[i] {
                    v += w;
                } else {
                    v -= w;
                }
            }
            v / gamma
        })
        .collect()
}

/// `1 − (1/nγ) Σ_{i,j} (α_i+α_j)/2 S_ij + (1/nγ) Σ_{i<j} 2(α_i+α_j) S_ij 1{y_i≠y_j}`.
fn similarity_form(s: &Array2<f64>, labels: &Labeling, alpha: &Weights, gamma: f64) -> f64 {
    let y = labels.labels();
    let a = alpha.as_array();
    let n = y.len();
    let mut mass = 0.0;
    let mut cut = 0.0;
    for i in 0..n {
        for j in 0..n {
            mass += 0.5 * (a[i] + a[j]) * s[[i, j]];
            if i < j && y[i] != y[j] {
                cut += 2.0 * (a[i] + a[j]) * s[[i, j]];
            }
        }
    }
    let scale = n as f64 * gamma;
    1.0 - mass / scale + cut / scale
}

/// Weighted kernel classifier trained on a (possibly hypothetical) labeling.
#[derive(Debug, Clone)]
pub struct KernelClassifier {
    data: Dataset,
    labels: Labeling,
    alpha: Weights,
    gram: GramMatrix,
}

impl KernelClassifier {
    pub fn new(data: Dataset, labels: Labeling, alpha: Weights, h: Bandwidth) -> Result<Self> {
        labels.check_len(data.n())?;
        if alpha.len() != data.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} points",
                alpha.len(),
                data.n()
            )));
        }
        let gram = gram(&data, h);
        Ok(Self {
            data,
            labels,
            alpha,
            gram,
        })
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn labels(&self) -> &Labeling {
        &self.labels
    }

    pub fn alpha(&self) -> &Weights {
        &self.alpha
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn c(&self) -> usize {
        self.labels.c()
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    /// `h(x, y)` for every class, indexed by `y − 1`.
    pub fn hypotheses(&self, x: ArrayView1<'_, f64>) -> Result<Vec<f64>> {
        let h = self.gram.bandwidth();
        let mut out = vec![0.0; self.c()];
        for (i, &y) in self.labels.labels().iter().enumerate() {
            out[y - 1] += self.alpha.get(i) * gaussian_kernel(x, self.data.row(i), h)?;
        }
        Ok(out)
    }

    pub fn hypothesis(&self, x: ArrayView1<'_, f64>, y: usize) -> Result<f64> {
        if y == 0 || y > self.c() {
            return Err(Error::ClassOutOfRange {
                class: y,
                classes: self.c(),
            });
        }
        Ok(self.hypotheses(x)?[y - 1])
    }

    /// Argmax of `h(x, ·)`; ties go to the smallest class id.
    pub fn predict(&self, x: ArrayView1<'_, f64>) -> Result<usize> {
        Ok(argmax(&self.hypotheses(x)?))
    }

    /// `h(x, y) − max_{y' ≠ y} h(x, y')`.
    pub fn margin(&self, x: ArrayView1<'_, f64>, y: usize) -> Result<f64> {
        if self.c() < 2 {
            return Err(Error::InvalidArgument("margin needs at least two classes".into()));
        }
        let hs = self.hypotheses(x)?;
        if y == 0 || y > hs.len() {
            return Err(Error::ClassOutOfRange {
                class: y,
                classes: hs.len(),
            });
        }
        let other = hs
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != y - 1)
            .fold(f64::NEG_INFINITY, |m, (_, v)| m.max(*v));
        Ok(hs[y - 1] - other)
    }

    /// Per-sample arguments of `Φ` on the training set.
    pub fn sample_arguments(&self, gamma: f64) -> Result<Vec<f64>> {
        check_positive("gamma", gamma)?;
        Ok(sample_arguments(self.gram.entries(), &self.labels, &self.alpha, gamma))
    }

    pub fn empirical_error_phi(&self, gamma: f64) -> Result<f64> {
        let t = self.sample_arguments(gamma)?;
        Ok(t.iter().map(|&v| phi(v)).sum::<f64>() / t.len() as f64)
    }

    /// Closed form in pairwise kernel sums. It upper-bounds
    /// [`empirical_error_phi`](Self::empirical_error_phi) once `γ ≥ c − 1`,
    /// with equality when every per-sample argument is in `[0, 1]`.
    pub fn empirical_error_similarity(&self, gamma: f64) -> Result<f64> {
        check_positive("gamma", gamma)?;
        if gamma < (self.c() as f64 - 1.0) {
            warn!(
                "gamma = {gamma} < c - 1 = {}: similarity form may undercut the Phi form",
                self.c() - 1
            );
        }
        Ok(similarity_form(self.gram.entries(), &self.labels, &self.alpha, gamma))
    }

    /// Fraction of training points not predicted as their own label.
    pub fn training_error(&self) -> f64 {
        let k = self.gram.entries();
        let y = self.labels.labels();
        let wrong = (0..self.n())
            .filter(|&i| {
                let mut hs = vec![0.0; self.c()];
                for (j, &yj) in y.iter().enumerate() {
                    hs[yj - 1] += self.alpha.get(j) * k[[i, j]];
                }
                argmax(&hs) != y[i]
            })
            .count();
        wrong as f64 / self.n() as f64
    }

    pub fn omega(&self) -> f64 {
        omega(&self.alpha, &self.labels, &self.gram).expect("sizes checked on construction")
    }
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (k, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = k;
        }
    }
    best + 1
}

/// Confidence and capacity parameters for the bound evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    pub gamma: f64,
    pub delta: f64,
    /// Cap on `√Ω`.
    pub b: f64,
    pub b_plus: f64,
    pub b_minus: f64,
    /// Bound on `√|S^±(x, x)|`; taken from the split diagonals when absent.
    pub r: Option<f64>,
    pub epsilon: f64,
}

impl BoundParams {
    /// `B⁺ = B`, `B⁻ = 0`, `R` from the data, `ε = 0.1`.
    pub fn new(gamma: f64, delta: f64, b: f64) -> Self {
        Self {
            gamma,
            delta,
            b,
            b_plus: b,
            b_minus: 0.0,
            r: None,
            epsilon: 0.1,
        }
    }
}

/// A bound split into its empirical, capacity and confidence parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundTerms {
    pub empirical: f64,
    pub complexity: f64,
    pub confidence: f64,
    pub total: f64,
}

impl BoundTerms {
    fn new(empirical: f64, complexity: f64, confidence: f64) -> Self {
        Self {
            empirical,
            complexity,
            confidence,
            total: empirical + complexity + confidence,
        }
    }

    /// Empirical error plus the `1/√n` capacity term.
    pub fn dominant(&self) -> f64 {
        self.empirical + self.complexity
    }
}

/// Rademacher complexity bound of the kernel hypothesis class:
/// `(2c−1)cB/√n + √2·Bc(2c−1)·√(ln(2/δ)/2n)`.
pub fn rademacher_bound(b: f64, c: usize, n: usize, delta: f64) -> Result<f64> {
    check_positive("B", b)?;
    check_delta(delta)?;
    if c == 0 || n == 0 {
        return Err(Error::InvalidArgument("c and n must be positive".into()));
    }
    let (cf, nf) = (c as f64, n as f64);
    let k = (2.0 * cf - 1.0) * cf * b;
    Ok(k / nf.sqrt() + std::f64::consts::SQRT_2 * k * ((2.0 / delta).ln() / (2.0 * nf)).sqrt())
}

/// Generalization bound of the kernel classifier with the `Φ`-form empirical
/// error. Fails when `Ω(α) > B²`.
pub fn theorem1_bound(clf: &KernelClassifier, params: &BoundParams) -> Result<BoundTerms> {
    check_positive("gamma", params.gamma)?;
    check_delta(params.delta)?;
    check_positive("B", params.b)?;
    check_cap("omega", clf.omega(), params.b)?;
    let (c, n) = (clf.c() as f64, clf.n() as f64);
    let k = (2.0 * c - 1.0) * c * params.b;
    let complexity = 8.0 * k / (params.gamma * n.sqrt());
    let confidence =
        (8.0 * std::f64::consts::SQRT_2 * k / params.gamma + 1.0) * ((4.0 / params.delta).ln() / (2.0 * n)).sqrt();
    Ok(BoundTerms::new(
        clf.empirical_error_phi(params.gamma)?,
        complexity,
        confidence,
    ))
}

/// Classifier driven by a general symmetric similarity on the training set.
#[derive(Debug, Clone)]
pub struct SimilarityClassifier {
    s: Array2<f64>,
    split: KernelSplit,
    labels: Labeling,
    alpha: Weights,
}

impl SimilarityClassifier {
    pub fn new(s: Array2<f64>, labels: Labeling, alpha: Weights) -> Result<Self> {
        labels.check_len(s.nrows())?;
        if alpha.len() != s.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} points",
                alpha.len(),
                s.nrows()
            )));
        }
        let split = decompose_similarity(&s)?;
        Ok(Self {
            s,
            split,
            labels,
            alpha,
        })
    }

    pub fn split(&self) -> &KernelSplit {
        &self.split
    }

    pub fn c(&self) -> usize {
        self.labels.c()
    }

    pub fn n(&self) -> usize {
        self.labels.n()
    }

    pub fn omega_plus_minus(&self) -> (f64, f64) {
        (
            class_quadratic(&self.alpha, &self.labels, &self.split.s_plus).expect("sizes checked"),
            class_quadratic(&self.alpha, &self.labels, &self.split.s_minus).expect("sizes checked"),
        )
    }

    pub fn empirical_error_phi(&self, gamma: f64) -> Result<f64> {
        check_positive("gamma", gamma)?;
        let t = sample_arguments(&self.s, &self.labels, &self.alpha, gamma);
        Ok(t.iter().map(|&v| phi(v)).sum::<f64>() / t.len() as f64)
    }

    pub fn empirical_error_similarity(&self, gamma: f64) -> Result<f64> {
        check_positive("gamma", gamma)?;
        Ok(similarity_form(&self.s, &self.labels, &self.alpha, gamma))
    }

    /// `R` from the split: `√(max_i max(S⁺_ii, S⁻_ii))`.
    pub fn r_from_split(&self) -> f64 {
        self.split.diag_sup().sqrt()
    }
}

/// Generalization bound of the general-similarity classifier. The empirical
/// term uses the pairwise closed form when `γ ≥ c` and the `Φ` form otherwise.
pub fn theorem5_bound(clf: &SimilarityClassifier, params: &BoundParams) -> Result<BoundTerms> {
    check_positive("gamma", params.gamma)?;
    check_delta(params.delta)?;
    if !(params.b_plus >= 0.0 && params.b_minus >= 0.0) || params.b_plus + params.b_minus <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "caps must be nonnegative and not both zero, got B+ = {}, B- = {}",
            params.b_plus, params.b_minus
        )));
    }
    let (op, om) = clf.omega_plus_minus();
    check_cap("omega_plus", op, params.b_plus)?;
    check_cap("omega_minus", om, params.b_minus)?;
    let r = params.r.unwrap_or_else(|| clf.r_from_split());
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("R must be nonnegative, got {r}")));
    }
    let (c, n) = (clf.c() as f64, clf.n() as f64);
    let bsum = params.b_plus + params.b_minus;
    let complexity = 8.0 * r * (2.0 * c - 1.0) * c * bsum / (params.gamma * n.sqrt());
    let confidence = (16.0 * c * (2.0 * c - 1.0) * bsum * r * r / params.gamma + 1.0)
        * ((4.0 / params.delta).ln() / (2.0 * n)).sqrt();
    let empirical = if params.gamma >= c {
        clf.empirical_error_similarity(params.gamma)?
    } else {
        clf.empirical_error_phi(params.gamma)?
    };
    Ok(BoundTerms::new(empirical, complexity, confidence))
}

/// Margin bound for a similarity machine `f = Σ α_i s(·, x_i)` with
/// `s = s⁺ − s⁻`: mean ramp loss of the margins, plus
/// `(4/nγ)(B1·√Σ s⁺(x_i,x_i) + B2·√Σ s⁻(x_i,x_i))` plus
/// `(8/γ + 1)√(ln(4/δ)/2n)`.
pub fn similarity_machine_bound(
    margins: &[f64],
    gamma: f64,
    b1: f64,
    b2: f64,
    diag_plus: &[f64],
    diag_minus: &[f64],
    delta: f64,
) -> Result<f64> {
    check_positive("gamma", gamma)?;
    check_delta(delta)?;
    let n = margins.len();
    if n == 0 {
        return Err(Error::Empty("margins".into()));
    }
    if diag_plus.iter().chain(diag_minus).any(|&d| !(d >= 0.0)) {
        return Err(Error::InvalidArgument("diagonals must be nonnegative".into()));
    }
    if !(b1 >= 0.0 && b2 >= 0.0) {
        return Err(Error::InvalidArgument("B1 and B2 must be nonnegative".into()));
    }
    let nf = n as f64;
    let empirical = margins.iter().map(|&m| ramp(m, gamma)).sum::<f64>() / nf;
    let capacity =
        4.0 / (nf * gamma) * (b1 * diag_plus.iter().sum::<f64>().sqrt() + b2 * diag_minus.iter().sum::<f64>().sqrt());
    Ok(empirical + capacity + (8.0 / gamma + 1.0) * ((4.0 / delta).ln() / (2.0 * nf)).sqrt())
}

/// Margin bound for a kernel machine with `Σ α_i α_j k(x_i, x_j) ≤ B²`.
pub fn kernel_svm_bound(margins: &[f64], gamma: f64, b: f64, diag: &[f64], delta: f64) -> Result<f64> {
    check_positive("gamma", gamma)?;
    check_delta(delta)?;
    let n = margins.len();
    if n == 0 {
        return Err(Error::Empty("margins".into()));
    }
    if diag.iter().any(|&d| !(d >= 0.0)) || !(b >= 0.0) {
        return Err(Error::InvalidArgument("B and the diagonal must be nonnegative".into()));
    }
    let nf = n as f64;
    let empirical = margins.iter().map(|&m| ramp(m, gamma)).sum::<f64>() / nf;
    let capacity = 4.0 * b / (nf * gamma) * diag.iter().sum::<f64>().sqrt();
    Ok(empirical + capacity + (8.0 / gamma + 1.0) * ((4.0 / delta).ln() / (2.0 * nf)).sqrt())
}

/// Two-class weighted KDE classifier,
/// `r̂(x) = τ0 (Σ_{y_i=1} α_i K_h(x − x_i) − Σ_{y_i=2} α_i K_h(x − x_i))`.
#[derive(Debug, Clone)]
pub struct KdeClassifier {
    data: Dataset,
    labels: Labeling,
    alpha: Weights,
    consts: KdeConstants,
    gram: GramMatrix,
    gram2: GramMatrix,
}

impl KdeClassifier {
    pub fn new(data: Dataset, labels: Labeling, alpha: Weights, h: Bandwidth) -> Result<Self> {
        if labels.c() != 2 {
            return Err(Error::InvalidArgument(format!(
                "KDE classifier needs c = 2, got {}",
                labels.c()
            )));
        }
        labels.check_len(data.n())?;
        if alpha.len() != data.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} points",
                alpha.len(),
                data.n()
            )));
        }
        let consts = KdeConstants::new(data.d(), h);
        let gram = gram(&data, h);
        let gram2 = gram_scaled_sqrt2(&data, h);
        Ok(Self {
            data,
            labels,
            alpha,
            consts,
            gram,
            gram2,
        })
    }

    pub fn constants(&self) -> KdeConstants {
        self.consts
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    fn sign(&self, i: usize) -> f64 {
        if self.labels.get(i) == 1 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn kde_decision(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        let h = self.gram.bandwidth();
        let mut v = 0.0;
        for i in 0..self.n() {
            v += self.sign(i) * self.alpha.get(i) * gaussian_kernel(x, self.data.row(i), h)?;
        }
        Ok(self.consts.tau0 * v)
    }

    /// Class 1 when the decision value is `≥ 0`, else class 2.
    pub fn classify(&self, x: ArrayView1<'_, f64>) -> Result<usize> {
        Ok(if self.kde_decision(x)? >= 0.0 { 1 } else { 2 })
    }

    /// `4 Σ_{i<j} (α_i+α_j) K_ij 1{y_i≠y_j} − Σ_{i,j} (α_i+α_j) K_ij`.
    pub fn hat_ise(&self) -> f64 {
        let k = self.gram.entries();
        let a = self.alpha.as_array();
        let y = self.labels.labels();
        let n = self.n();
        let mut cross = 0.0;
        let mut all = 0.0;
        for i in 0..n {
            for j in 0..n {
                let w = (a[i] + a[j]) * k[[i, j]];
                all += w;
                if i < j && y[i] != y[j] {
                    cross += w;
                }
            }
        }
        4.0 * cross - all
    }

    /// `αᵀ K̃ α − 4 Σ_{i<j} α_i α_j K̃_ij 1{y_i≠y_j}` with `K̃` at bandwidth `√2 h`.
    pub fn k_alpha(&self) -> f64 {
        let k = self.gram2.entries();
        let a = self.alpha.as_array();
        let y = self.labels.labels();
        let n = self.n();
        let mut cross = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                if y[i] != y[j] {
                    cross += a[i] * a[j] * k[[i, j]];
                }
            }
        }
        a.dot(&k.dot(a)) - 4.0 * cross
    }

    /// Closed form of `∫ r̂(x)² dx`:
    /// `τ1 (Σ_y α^(y)ᵀ K̃ α^(y) − 2 Σ_{i<j} α_i α_j K̃_ij 1{y_i≠y_j})`.
    pub fn decision_sq_integral(&self) -> f64 {
        let k = self.gram2.entries();
        let a = self.alpha.as_array();
        let s = Array1::from_iter((0..self.n()).map(|i| self.sign(i) * a[i]));
        self.consts.tau1 * s.dot(&k.dot(&s))
    }

    /// `(τ0/n)·hat_ise + τ1·k_alpha + 2τ0 (1/(n−1) + ε)`.
    pub fn theorem2_bound(&self, epsilon: f64) -> Result<f64> {
        check_positive("epsilon", epsilon)?;
        let n = self.n();
        if n < 2 {
            return Err(Error::InvalidArgument("ISE bound needs n >= 2".into()));
        }
        let KdeConstants { tau0, tau1 } = self.consts;
        Ok(tau0 / n as f64 * self.hat_ise() + tau1 * self.k_alpha() + 2.0 * tau0 * (1.0 / (n as f64 - 1.0) + epsilon))
    }
}

/// Probability that the ISE bound fails: `2n e^{−2(n−1)ε²} + 2n e^{−2nε²}`.
pub fn theorem2_failure_probability(n: usize, epsilon: f64) -> f64 {
    let nf = n as f64;
    let e2 = epsilon * epsilon;
    2.0 * nf * (-2.0 * (nf - 1.0) * e2).exp() + 2.0 * nf * (-2.0 * nf * e2).exp()
}

/// Slack `ε` at which the ISE bound's failure probability is at most `δ`:
/// `√(ln(4n/δ) / 2(n−1))`.
pub fn epsilon_for_delta(n: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if n < 2 {
        return Err(Error::InvalidArgument("need n >= 2".into()));
    }
    let nf = n as f64;
    Ok(((4.0 * nf / delta).ln() / (2.0 * (nf - 1.0))).sqrt())
}

/// Bound diagnostics for one labeled dataset and weight vector. KDE fields are
/// `None` unless `c = 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub empirical_error_phi: f64,
    pub empirical_error_similarity: f64,
    pub omega: f64,
    pub theorem1_bound: f64,
    pub hat_ise: Option<f64>,
    pub k_alpha: Option<f64>,
    pub theorem2_bound: Option<f64>,
    pub theorem2_failure_probability: Option<f64>,
    pub theorem5_bound: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub rademacher_bound: f64,
    pub training_error: f64,
    pub gamma: f64,
    pub delta: f64,
    pub b: f64,
    pub epsilon: f64,
    pub r: f64,
}

/// Evaluates every bound at `B = √Ω(α)` (or the supplied cap). The
/// general-similarity bound is taken with `S = K`.
#[allow(clippy::too_many_arguments)]
pub fn diagnostics(
    data: &Dataset,
    labels: &Labeling,
    alpha: &Weights,
    h: Bandwidth,
    gamma: f64,
    delta: f64,
    b: Option<f64>,
    epsilon: Option<f64>,
) -> Result<Diagnostics> {
    let clf = KernelClassifier::new(data.clone(), labels.clone(), alpha.clone(), h)?;
    let om = clf.omega();
    let b = b.unwrap_or(om.sqrt());
    let n = data.n();
    let epsilon = match epsilon {
        Some(e) => e,
        None if n >= 2 => epsilon_for_delta(n, delta)?,
        None => 0.1,
    };
    let params = BoundParams {
        epsilon,
        ..BoundParams::new(gamma, delta, b)
    };
    let t1 = theorem1_bound(&clf, &params)?;
    let sim = SimilarityClassifier::new(clf.gram().entries().clone(), labels.clone(), alpha.clone())?;
    let (op, omn) = sim.omega_plus_minus();
    let r = sim.r_from_split();
    let t5 = theorem5_bound(
        &sim,
        &BoundParams {
            b_plus: op.sqrt().max(b),
            b_minus: omn.sqrt(),
            ..params
        },
    )?;
    let kde = if labels.c() == 2 && n >= 2 {
        Some(KdeClassifier::new(data.clone(), labels.clone(), alpha.clone(), h)?)
    } else {
        None
    };
    Ok(Diagnostics {
        empirical_error_phi: clf.empirical_error_phi(gamma)?,
        empirical_error_similarity: clf.empirical_error_similarity(gamma)?,
        omega: om,
        theorem1_bound: t1.total,
        hat_ise: kde.as_ref().map(|k| k.hat_ise()),
        k_alpha: kde.as_ref().map(|k| k.k_alpha()),
        theorem2_bound: kde.as_ref().map(|k| k.theorem2_bound(epsilon)).transpose()?,
        theorem2_failure_probability: kde.as_ref().map(|_| theorem2_failure_probability(n, epsilon)),
        theorem5_bound: t5.total,
        omega_plus: op,
        omega_minus: omn,
        rademacher_bound: rademacher_bound(b, labels.c(), n, delta)?,
        training_error: clf.training_error(),
        gamma,
        delta,
        b,
        epsilon,
        r,
    })
}
