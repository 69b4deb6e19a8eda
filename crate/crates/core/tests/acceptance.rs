//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line; the
//! process exits non-zero if any fails. Every reference value is recomputed
//! here from first principles instead of through the library.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use discsim::classifier::{
    theorem1_bound, theorem5_bound, BoundParams, KdeClassifier, KernelClassifier, SimilarityClassifier,
};
use discsim::data::{generate_blobs, Dataset, Labeling, PartialLabeling};
use discsim::eval::{accuracy, nmi};
use discsim::graph::{build_graph, trace_quadratic, LabelIndicator};
use discsim::kernel::{Bandwidth, GramMatrix};
use discsim::pipelines::{cdsk, harmonic_solution, lpdsk, CdskConfig, DskOptions};
use discsim::similarity::{
    decompose_similarity, discriminative_similarity_ker, regularized_objective, similarity_objective, Weights,
};
use discsim::solvers::{solve_simplex_qp, symmetric_eigen, QpOptions, QpProblem};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    check(
        elapsed.as_secs_f64() < limit,
        format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64()),
    )
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn points(r: &mut ChaCha8Rng, n: usize, d: usize, spread: f64) -> Array2<f64> {
    Array2::from_shape_fn((n, d), |_| r.random_range(-spread..spread))
}

/// Random simplex point; every fifth draw is a vertex.
fn simplex(r: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
    if r.random_range(0..5) == 0 {
        let mut v = Array1::zeros(n);
        v[r.random_range(0..n)] = 1.0;
        return v;
    }
    let v = Array1::from_shape_fn(n, |_| -(1.0 - r.random::<f64>()).ln());
    let s = v.sum();
    v / s
}

fn labels(r: &mut ChaCha8Rng, n: usize, c: usize) -> Vec<usize> {
    (0..n).map(|_| r.random_range(1..=c)).collect()
}

fn gaussian_gram(x: &Array2<f64>, h: f64) -> Array2<f64> {
    let n = x.nrows();
    Array2::from_shape_fn((n, n), |(i, j)| {
        let d2: f64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
        (-d2 / (2.0 * h * h)).exp()
    })
}

fn max_abs(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn frob(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn random_symmetric(r: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
    let a = points(r, n, n, 1.0);
    (&a + &a.t()) * 0.5
}

/// Composite Simpson rule on `[a, b]` with `m` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for k in 1..m {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Accuracy maximized over every relabeling of the predicted classes.
fn brute_force_accuracy(pred: &[usize], truth: &[usize], c: usize) -> f64 {
    fn permutations(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(k - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }
    permutations(c)
        .into_iter()
        .map(|perm| pred.iter().zip(truth).filter(|&(&p, &t)| perm[p - 1] + 1 == t).count())
        .max()
        .unwrap() as f64
        / pred.len() as f64
}

fn objective_identity() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = r.random_range(2..=12);
        let c = r.random_range(2..=4);
        let x = points(&mut r, n, 2, 2.0);
        let h = r.random_range(0.3..3.0);
        let k = gaussian_gram(&x, h);
        let a = simplex(&mut r, n);
        let y = labels(&mut r, n, c);
        let lambda = r.random_range(0.0..2.0);

        // direct evaluation of the class-masked form
        let mut cut = 0.0;
        let mut mass = 0.0;
        let mut omega = 0.0;
        for i in 0..n {
            for j in 0..n {
                mass += 0.5 * (a[i] + a[j]) * k[[i, j]];
                if y[i] == y[j] {
                    omega += a[i] * a[j] * k[[i, j]];
                } else if i < j {
                    cut += 2.0 * (a[i] + a[j]) * k[[i, j]];
                }
            }
        }
        let oracle = cut - mass + lambda * omega;

        let gram = GramMatrix::from_entries(k, Bandwidth::new(h).unwrap()).map_err(|e| e.to_string())?;
        let alpha = Weights::new(a).map_err(|e| e.to_string())?;
        let lab = Labeling::new(y, c).map_err(|e| e.to_string())?;
        let e7 = regularized_objective(&alpha, &lab, &gram, lambda).map_err(|e| e.to_string())?;
        let e8 = similarity_objective(&alpha, &lab, &gram, lambda).map_err(|e| e.to_string())?;
        worst = worst.max((e7 - e8).abs()).max((e7 - oracle).abs());
    }
    check(worst <= 1e-10, format!("max deviation {worst:e}"))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!("max deviation {worst:.2e} over 100 instances"))
}

fn nonnegativity() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let mut min_entry = f64::INFINITY;
    for t in 0..1000 {
        let n = r.random_range(2..=15);
        let x = points(&mut r, n, 3, 2.0);
        let h = r.random_range(0.3..3.0);
        let gram =
            GramMatrix::from_entries(gaussian_gram(&x, h), Bandwidth::new(h).unwrap()).map_err(|e| e.to_string())?;
        let alpha = Weights::new(simplex(&mut r, n)).map_err(|e| e.to_string())?;
        let lambda = if t % 2 == 0 { 2.0 } else { 0.1 };
        let s = discriminative_similarity_ker(&alpha, &gram, lambda).map_err(|e| e.to_string())?;
        min_entry = min_entry.min(s.entries().iter().copied().fold(f64::INFINITY, f64::min));
    }
    check(min_entry >= 0.0, format!("negative entry {min_entry:e}"))?;
    within(start.elapsed(), 2.0)?;
    Ok(format!("min entry {min_entry:.2e} over 1000 draws"))
}

fn error_relation() -> Outcome {
    let start = Instant::now();
    let mut r = rng(3);
    let mut equality_cases = 0;
    let mut worst_eq = 0.0f64;
    for t in 0..500 {
        let c = r.random_range(2..=4);
        let n = r.random_range(c..=20);
        let h = r.random_range(0.5..3.0);
        // half the instances are separated clusters matching the labels, which
        // drives every argument into [0, 1]
        let (x, y) = if t % 2 == 0 {
            let y = labels(&mut r, n, c);
            let x = Array2::from_shape_fn((n, 2), |(i, j)| {
                let center = if j == 0 { 30.0 * y[i] as f64 } else { 0.0 };
                center + r.random_range(-0.2..0.2)
            });
            (x, y)
        } else {
            (points(&mut r, n, 2, 3.0), labels(&mut r, n, c))
        };
        let a = simplex(&mut r, n);
        let gamma = c as f64 - 1.0;
        let k = gaussian_gram(&x, h);

        let args: Vec<f64> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if y[j] == y[i] {
                            a[j] * k[[i, j]]
                        } else {
                            -a[j] * k[[i, j]]
                        }
                    })
                    .sum::<f64>()
                    / gamma
            })
            .collect();
        let phi = |v: f64| v.clamp(0.0, 1.0);
        let oracle_phi = args.iter().map(|&v| 1.0 - phi(v)).sum::<f64>() / n as f64;

        let clf = KernelClassifier::new(
            Dataset::new(x).map_err(|e| e.to_string())?,
            Labeling::new(y, c).map_err(|e| e.to_string())?,
            Weights::new(a).map_err(|e| e.to_string())?,
            Bandwidth::new(h).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        let e_phi = clf.empirical_error_phi(gamma).map_err(|e| e.to_string())?;
        let e_sim = clf.empirical_error_similarity(gamma).map_err(|e| e.to_string())?;
        check(
            (e_phi - oracle_phi).abs() <= 1e-12,
            format!("Phi error {e_phi} vs oracle {oracle_phi}"),
        )?;
        check(
            e_sim >= e_phi - 1e-12,
            format!("similarity error {e_sim} < Phi error {e_phi}"),
        )?;
        if args.iter().all(|&v| (0.0..=1.0).contains(&v)) {
            equality_cases += 1;
            worst_eq = worst_eq.max((e_sim - e_phi).abs());
        }
    }
    check(worst_eq <= 1e-12, format!("equality case off by {worst_eq:e}"))?;
    check(equality_cases >= 100, format!("only {equality_cases} equality cases"))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "500 instances, {equality_cases} equality cases within {worst_eq:.1e}"
    ))
}

fn cut_identity() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = r.random_range(2..=10);
        let c = r.random_range(2..=n.min(4));
        let mut s = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let v = r.random::<f64>();
                s[[i, j]] = v;
                s[[j, i]] = v;
            }
        }
        let y = labels(&mut r, n, c);
        let cut: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| y[i] != y[j])
            .map(|(i, j)| s[[i, j]])
            .sum();
        let g = build_graph(&s).map_err(|e| e.to_string())?;
        let ind = LabelIndicator::new(&Labeling::new(y, c).map_err(|e| e.to_string())?);
        let tr = trace_quadratic(ind.matrix(), &g.laplacian).map_err(|e| e.to_string())?;
        worst = worst.max((tr - 2.0 * cut).abs());
    }
    check(worst <= 1e-12, format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.2e} over 200 instances"))
}

fn min_eig(a: &Array2<f64>) -> Result<f64, String> {
    let e = symmetric_eigen(a).map_err(|e| e.to_string())?;
    Ok(e.values.iter().copied().fold(f64::INFINITY, f64::min))
}

fn decomposition() -> Outcome {
    let mut r = rng(5);
    let mut worst_rec = 0.0f64;
    let mut worst_eig = f64::INFINITY;
    for _ in 0..100 {
        let n = r.random_range(1..=20);
        let s = random_symmetric(&mut r, n);
        let split = decompose_similarity(&s).map_err(|e| e.to_string())?;
        worst_rec = worst_rec.max(max_abs(&(&s - &(&split.s_plus - &split.s_minus))));
        worst_eig = worst_eig.min(min_eig(&split.s_plus)?).min(min_eig(&split.s_minus)?);
    }
    let mut worst_neg = 0.0f64;
    for _ in 0..20 {
        let n = r.random_range(2..=20);
        let x = points(&mut r, n, 2, 3.0);
        let split = decompose_similarity(&gaussian_gram(&x, r.random_range(0.3..3.0))).map_err(|e| e.to_string())?;
        worst_neg = worst_neg.max(max_abs(&split.s_minus));
    }
    check(worst_rec <= 1e-8, format!("reconstruction {worst_rec:e}"))?;
    check(worst_eig >= -1e-8, format!("part eigenvalue {worst_eig:e}"))?;
    check(worst_neg <= 1e-8, format!("Gaussian gram S- entry {worst_neg:e}"))?;
    Ok(format!(
        "reconstruction {worst_rec:.1e}, min part eigenvalue {worst_eig:.1e}, gram S- {worst_neg:.1e}"
    ))
}

fn qp_oracle() -> Outcome {
    let mut r = rng(6);
    let step = 1e-3f64;
    let grid = (1.0 / step).round() as usize;
    let mut worst_gap = 0.0f64;
    let mut worst_kkt = 0.0f64;
    for t in 0..50 {
        let n = if t % 2 == 0 { 2 } else { 3 };
        let m = points(&mut r, n, n, 1.0);
        let q = m.t().dot(&m);
        let c = Array1::from_shape_fn(n, |_| r.random_range(-1.0..1.0));
        let f = |x: &[f64]| -> f64 {
            let mut v = 0.0;
            for i in 0..n {
                v += c[i] * x[i];
                for j in 0..n {
                    v += x[i] * q[[i, j]] * x[j];
                }
            }
            v
        };
        let mut best = f64::INFINITY;
        for i in 0..=grid {
            if n == 2 {
                let a = i as f64 * step;
                best = best.min(f(&[a, 1.0 - a]));
            } else {
                for j in 0..=(grid - i) {
                    let (a, b) = (i as f64 * step, j as f64 * step);
                    best = best.min(f(&[a, b, (1.0 - a - b).max(0.0)]));
                }
            }
        }
        let p = QpProblem::new(q.clone(), c.clone()).map_err(|e| e.to_string())?;
        let sol = solve_simplex_qp(&p, QpOptions::default()).map_err(|e| e.to_string())?;
        let x = sol.alpha.as_array();
        check(
            x.iter().all(|&v| v >= 0.0) && (x.sum() - 1.0).abs() <= 1e-12,
            "solution left the simplex",
        )?;
        let fx = f(x.as_slice().unwrap());
        worst_gap = worst_gap.max((fx - best).abs());
        worst_kkt = worst_kkt.max(sol.kkt_residual);
    }
    check(worst_gap <= 1e-3, format!("objective gap {worst_gap:e}"))?;
    check(worst_kkt <= 1e-6, format!("KKT residual {worst_kkt:e}"))?;
    Ok(format!("gap {worst_gap:.1e}, KKT {worst_kkt:.1e} on 50 problems"))
}

fn eigensolver() -> Outcome {
    let mut r = rng(7);
    let mut worst_rec = 0.0f64;
    let mut worst_orth = 0.0f64;
    for _ in 0..100 {
        let n = r.random_range(1..=30);
        let a = random_symmetric(&mut r, n);
        let e = symmetric_eigen(&a).map_err(|e| e.to_string())?;
        let v = &e.vectors;
        let rec = v.dot(&Array2::from_diag(&e.values)).dot(&v.t());
        worst_rec = worst_rec.max(frob(&(&a - &rec)) / frob(&a).max(f64::MIN_POSITIVE));
        worst_orth = worst_orth.max(max_abs(&(v.t().dot(v) - Array2::<f64>::eye(n))));
    }
    let mut worst_2x2 = 0.0f64;
    for _ in 0..100 {
        let (a, b, d) = (
            r.random_range(-5.0..5.0),
            r.random_range(-5.0..5.0),
            r.random_range(-5.0..5.0),
        );
        let e = symmetric_eigen(&ndarray::array![[a, b], [b, d]]).map_err(|e| e.to_string())?;
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        worst_2x2 = worst_2x2
            .max((e.values[0] - (mid - rad)).abs())
            .max((e.values[1] - (mid + rad)).abs());
    }
    check(worst_rec <= 1e-8, format!("relative reconstruction {worst_rec:e}"))?;
    check(worst_orth <= 1e-8, format!("orthonormality {worst_orth:e}"))?;
    check(worst_2x2 <= 1e-10, format!("2x2 closed form {worst_2x2:e}"))?;
    Ok(format!(
        "reconstruction {worst_rec:.1e}, orthonormality {worst_orth:.1e}, 2x2 {worst_2x2:.1e}"
    ))
}

fn convolution() -> Outcome {
    let mut r = rng(8);
    let k = |u: f64, h: f64| (-u * u / (2.0 * h * h)).exp();
    let mut worst_conv = 0.0f64;
    for _ in 0..20 {
        let (a, b, h): (f64, f64, f64) = (
            r.random_range(-2.0..2.0),
            r.random_range(-2.0..2.0),
            r.random_range(0.2..2.0),
        );
        let lo = a.min(b) - 12.0 * h;
        let hi = a.max(b) + 12.0 * h;
        let quad = simpson(|x| k(x - a, h) * k(x - b, h), lo, hi, 20_000);
        let closed = PI.sqrt() * h * k(a - b, 2f64.sqrt() * h);
        worst_conv = worst_conv.max((quad - closed).abs() / closed);
    }
    let mut worst_sq = 0.0f64;
    for _ in 0..10 {
        let n = r.random_range(2..=8);
        let h = r.random_range(0.3..1.5);
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let mut y = labels(&mut r, n, 2);
        y[0] = 1;
        y[1] = 2;
        let a = simplex(&mut r, n);
        let tau0 = 1.0 / ((2.0 * PI).sqrt() * h);
        let rhat = |t: f64| {
            tau0 * (0..n)
                .map(|i| if y[i] == 1 { a[i] } else { -a[i] } * k(t - x[i], h))
                .sum::<f64>()
        };
        let lo = x.iter().copied().fold(f64::INFINITY, f64::min) - 12.0 * h;
        let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 12.0 * h;
        let quad = simpson(|t| rhat(t).powi(2), lo, hi, 20_000);
        let ds = Dataset::new(Array2::from_shape_vec((n, 1), x).unwrap()).map_err(|e| e.to_string())?;
        let clf = KdeClassifier::new(
            ds,
            Labeling::new(y, 2).map_err(|e| e.to_string())?,
            Weights::new(a).map_err(|e| e.to_string())?,
            Bandwidth::new(h).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        let closed = clf.decision_sq_integral();
        worst_sq = worst_sq.max((quad - closed).abs() / quad.abs().max(1e-300));
    }
    check(worst_conv <= 1e-6, format!("convolution relative error {worst_conv:e}"))?;
    check(
        worst_sq <= 1e-6,
        format!("squared-integral relative error {worst_sq:e}"),
    )?;
    Ok(format!("convolution {worst_conv:.1e}, squared integral {worst_sq:.1e}"))
}

fn cdsk_blobs() -> Outcome {
    let (ds, truth) = generate_blobs(7, 50, 2, 2, 10.0, 1.0).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let res = cdsk(&ds, &CdskConfig::new(2)).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let ac = brute_force_accuracy(res.labels.labels(), truth.labels(), 2);
    check(ac == 1.0, format!("AC = {ac}"))?;
    for w in res.objective_trace.windows(2) {
        check(w[1] <= w[0] + 1e-8, format!("objective rose from {} to {}", w[0], w[1]))?;
    }
    within(elapsed, 10.0)?;
    Ok(format!(
        "AC = {ac}, {} trace entries, {:.2}s",
        res.objective_trace.len(),
        elapsed.as_secs_f64()
    ))
}

fn lpdsk_blobs() -> Outcome {
    let (ds, truth) = generate_blobs(7, 50, 2, 2, 10.0, 1.0).map_err(|e| e.to_string())?;
    // classes interleave, so the first four points carry two labels per class
    let pl = PartialLabeling::from_prefix(&truth.labels()[..4], ds.n(), 2).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let res = lpdsk(&ds, &pl, &DskOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let hits = res
        .unlabeled
        .iter()
        .zip(&res.labels)
        .filter(|&(&i, &y)| truth.labels()[i] == y)
        .count();
    let ac = hits as f64 / res.unlabeled.len() as f64;
    check(ac >= 0.95, format!("AC = {ac}"))?;
    for row in res.y_u.rows() {
        check(
            row.iter().all(|&v| (-1e-8..=1.0 + 1e-8).contains(&v)),
            "Y_u entry outside [0, 1]",
        )?;
        check(
            (row.sum() - 1.0).abs() <= 1e-8,
            format!("Y_u row sums to {}", row.sum()),
        )?;
    }
    let path = ndarray::array![[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]];
    let mid = harmonic_solution(
        &path,
        &PartialLabeling::new(vec![Some(1), None, Some(2)], 2).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let dev = (mid.y_u[[0, 0]] - 0.5).abs().max((mid.y_u[[0, 1]] - 0.5).abs());
    check(dev <= 1e-12, format!("path midpoint off by {dev:e}"))?;
    within(elapsed, 10.0)?;
    Ok(format!(
        "AC = {ac}, path midpoint within {dev:.1e}, {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn bound_sanity() -> Outcome {
    let mut r = rng(11);
    let mut min_slack = f64::INFINITY;
    let mut worst_formula = 0.0f64;
    for t in 0..50 {
        let c = 2 + t % 3;
        let per = r.random_range(5..=15);
        let (ds, lab) =
            generate_blobs(r.random(), per, c, 2, r.random_range(0.0..6.0), 1.0).map_err(|e| e.to_string())?;
        let n = ds.n();
        let h = r.random_range(0.5..3.0);
        let a = simplex(&mut r, n);
        let k = gaussian_gram(ds.points(), h);
        let y = lab.labels().to_vec();

        let mut wrong = 0;
        let mut omega = 0.0;
        for i in 0..n {
            let mut votes = vec![0.0; c];
            for j in 0..n {
                votes[y[j] - 1] += a[j] * k[[i, j]];
                if y[i] == y[j] {
                    omega += a[i] * a[j] * k[[i, j]];
                }
            }
            let best = (0..c).fold(0, |b, m| if votes[m] > votes[b] { m } else { b });
            if best + 1 != y[i] {
                wrong += 1;
            }
        }
        let train = wrong as f64 / n as f64;
        let b = omega.sqrt();
        let gamma = r.random_range(0.2..c as f64);
        let delta = 0.1;

        let clf = KernelClassifier::new(
            ds,
            lab.clone(),
            Weights::new(a.clone()).map_err(|e| e.to_string())?,
            Bandwidth::new(h).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        let terms = theorem1_bound(&clf, &BoundParams::new(gamma, delta, b)).map_err(|e| e.to_string())?;
        let (cf, nf) = (c as f64, n as f64);
        let complexity = 8.0 * (2.0 * cf - 1.0) * cf * b / (gamma * nf.sqrt());
        let confidence =
            (8.0 * 2f64.sqrt() * b * cf * (2.0 * cf - 1.0) / gamma + 1.0) * ((4.0 / delta).ln() / (2.0 * nf)).sqrt();
        worst_formula = worst_formula
            .max((terms.complexity - complexity).abs())
            .max((terms.confidence - confidence).abs());
        min_slack = min_slack.min(terms.total - train);
    }
    check(
        min_slack >= 0.0,
        format!("bound below training error by {}", -min_slack),
    )?;
    check(worst_formula <= 1e-10, format!("bound terms off by {worst_formula:e}"))?;

    // with a PSD similarity, R = 1 and no negative part the general-similarity
    // bound's leading terms reduce to the kernel bound's
    let mut worst_reduction = 0.0f64;
    for t in 0..20 {
        let c = 2 + t % 3;
        let (ds, lab) = generate_blobs(100 + t as u64, 8, c, 2, 3.0, 1.0).map_err(|e| e.to_string())?;
        let n = ds.n();
        let h = r.random_range(0.5..3.0);
        let a = Weights::new(simplex(&mut r, n)).map_err(|e| e.to_string())?;
        let k = gaussian_gram(ds.points(), h);
        let kc =
            KernelClassifier::new(ds, lab.clone(), a.clone(), Bandwidth::new(h).unwrap()).map_err(|e| e.to_string())?;
        let sc = SimilarityClassifier::new(k, lab, a).map_err(|e| e.to_string())?;
        let (op, _) = sc.omega_plus_minus();
        let b = kc.omega().max(op).sqrt() * (1.0 + 1e-9);
        let gamma = c as f64 - 1.0;
        let t1 = theorem1_bound(&kc, &BoundParams::new(gamma, 0.1, b)).map_err(|e| e.to_string())?;
        let params = BoundParams {
            r: Some(1.0),
            ..BoundParams::new(gamma, 0.1, b)
        };
        let t5 = theorem5_bound(&sc, &params).map_err(|e| e.to_string())?;
        worst_reduction = worst_reduction.max((t1.dominant() - t5.dominant()).abs());
    }
    check(
        worst_reduction <= 1e-10,
        format!("dominant terms differ by {worst_reduction:e}"),
    )?;
    Ok(format!("min slack {min_slack:.3}, reduction gap {worst_reduction:.1e}"))
}

fn metrics() -> Outcome {
    let mut r = rng(12);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let c = r.random_range(2..=5);
        let n = r.random_range(5..=40);
        let p = labels(&mut r, n, c);
        let t = labels(&mut r, n, c);
        let lib = accuracy(
            &Labeling::new(p.clone(), c).unwrap(),
            &Labeling::new(t.clone(), c).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        worst = worst.max((lib - brute_force_accuracy(&p, &t, c)).abs());
    }
    check(worst <= 1e-12, format!("Hungarian vs brute force {worst:e}"))?;
    let same = Labeling::new(vec![1, 2, 2, 3, 1, 3], 3).unwrap();
    let one = nmi(&same, &same).map_err(|e| e.to_string())?;
    check((one - 1.0).abs() <= 1e-12, format!("NMI(identical) = {one}"))?;
    let a = Labeling::new(vec![1, 1, 2, 2], 2).unwrap();
    let b = Labeling::new(vec![1, 2, 1, 2], 2).unwrap();
    let zero = nmi(&a, &b).map_err(|e| e.to_string())?;
    check(zero.abs() <= 1e-12, format!("NMI(independent) = {zero}"))?;
    Ok(format!(
        "Hungarian matches brute force on 100 pairs, NMI {one} / {zero}"
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("objective identity", objective_identity),
        ("similarity nonnegativity", nonnegativity),
        ("empirical-error relation", error_relation),
        ("cut/trace identity", cut_identity),
        ("decomposition", decomposition),
        ("QP oracle", qp_oracle),
        ("eigensolver", eigensolver),
        ("Gaussian convolution", convolution),
        ("CDSK end-to-end", cdsk_blobs),
        ("LPDSK end-to-end", lpdsk_blobs),
        ("bound sanity", bound_sanity),
        ("metrics", metrics),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
