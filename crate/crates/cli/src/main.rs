//! `discsim` command-line front end.
//!
//! Exit status: 0 on success, 1 for usage or input errors, 2 when the
//! numerical machinery fails.

mod json;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use discsim::classifier::{diagnostics, Diagnostics};
use discsim::data::{generate_blobs, generate_two_moons, load_csv, load_csv_partial, write_csv, Dataset, Labeling};
use discsim::eval::{metric_report, MetricReport};
use discsim::kernel::BandwidthMode;
use discsim::pipelines::{cdsk, lpdsk, BandwidthChoice, CdskConfig, DskOptions};
use discsim::similarity::{decompose_similarity, Weights};
use discsim::solvers::{symmetric_eigen, QpOptions};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(discsim::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<discsim::Error> for CliError {
    fn from(e: discsim::Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Bytes to write and the `--out` target (stdout when `None`).
type Output = (Vec<u8>, Option<PathBuf>);

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser)]
#[command(
    name = "discsim",
    version,
    about = "Clustering and label propagation with learned discriminative similarities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a CSV dataset (CDSK).
    Cluster(ClusterArgs),
    /// Propagate partial labels (LPDSK); blank label cells are unlabeled.
    Ssl(SslArgs),
    /// Bound diagnostics for a labeled dataset and weight vector.
    Diagnose(DiagnoseArgs),
    /// Split a symmetric matrix into positive semidefinite parts.
    Decompose(DecomposeArgs),
    /// Write a synthetic dataset as CSV with a trailing label column.
    Gen(GenArgs),
}

/// Pipeline flags shared by `cluster` and `ssl`.
#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct DskFlags {
    /// Weight of the quadratic regularizer (default 0.1).
    #[arg(long)]
    lambda: Option<f64>,
    /// Fixed kernel bandwidth h.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Bandwidth heuristic (default median).
    #[arg(long, value_enum)]
    bandwidth_mode: Option<Mode>,
    /// Outer coordinate-descent iterations (default 30).
    #[arg(long)]
    max_iter: Option<usize>,
    /// Relative objective improvement below which to stop (default 1e-8).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// k-means restarts (default 10).
    #[arg(long)]
    restarts: Option<usize>,
    /// Accept lambda > 2, where the similarity may turn negative.
    #[arg(long)]
    allow_large_lambda: bool,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct ClusterArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Number of clusters.
    #[arg(long)]
    c: Option<usize>,
    /// 0-based column holding ground-truth labels, used only for metrics.
    #[arg(long)]
    label_col: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    dsk: DskFlags,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file of option values; flags given on the command line win.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct SslArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// 0-based label column; blank cells mark unlabeled points.
    #[arg(long)]
    label_col: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    dsk: DskFlags,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct DiagnoseArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// 0-based label column.
    #[arg(long)]
    label_col: Option<usize>,
    /// One-column CSV of weights summing to 1 (uniform when omitted).
    #[arg(long)]
    alpha: Option<PathBuf>,
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long, value_enum)]
    bandwidth_mode: Option<Mode>,
    /// Margin scale (default c - 1).
    #[arg(long)]
    gamma: Option<f64>,
    /// Confidence parameter (default 0.1).
    #[arg(long)]
    delta: Option<f64>,
    /// Capacity cap B (default sqrt of the regularizer at alpha).
    #[arg(long)]
    b: Option<f64>,
    /// Slack of the ISE bound (default chosen from delta).
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct DecomposeArgs {
    /// Square symmetric matrix as CSV.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    #[default]
    Blobs,
    Moons,
}

#[derive(Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Median,
    MeanDist,
    Variance,
}

impl From<Mode> for BandwidthMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Median => BandwidthMode::Median,
            Mode::MeanDist => BandwidthMode::MeanDist,
            Mode::Variance => BandwidthMode::Variance,
        }
    }
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(default)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    seed: Option<u64>,
    /// Blobs: points per class (default 50).
    #[arg(long)]
    n_per_class: Option<usize>,
    /// Blobs: number of classes (default 2).
    #[arg(long)]
    c: Option<usize>,
    /// Blobs: dimension (default 2).
    #[arg(long)]
    d: Option<usize>,
    /// Blobs: distance between neighboring centers (default 10).
    #[arg(long)]
    separation: Option<f64>,
    /// Blobs: per-axis standard deviation (default 1).
    #[arg(long)]
    sigma: Option<f64>,
    /// Moons: total points (default 200).
    #[arg(long)]
    n: Option<usize>,
    /// Moons: jitter standard deviation (default 0.05).
    #[arg(long)]
    noise: Option<f64>,
    /// Keep labels on the first this many rows only; the rest are left blank.
    #[arg(long)]
    labeled: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

/// Option keys that exclude each other; a flag from one group clears the
/// whole group from the config file.
const EXCLUSIVE: &[&[&str]] = &[&["bandwidth", "bandwidth_mode"]];

/// Overlays the command-line flags on the JSON object in `config`.
fn layered<T: Serialize + DeserializeOwned>(flags: T, config: Option<&Path>) -> CliResult<T> {
    let Some(path) = config else { return Ok(flags) };
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let Value::Object(mut merged) =
        serde_json::from_str(&text).map_err(|e| usage(format!("config {} is not valid JSON: {e}", path.display())))?
    else {
        return Err(usage(format!("config {} must hold a JSON object", path.display())));
    };
    let Value::Object(given) = serde_json::to_value(&flags).map_err(|e| usage(e.to_string()))? else {
        unreachable!("argument structs serialize to objects")
    };
    if let Some(k) = merged.keys().find(|k| !given.contains_key(k.as_str())) {
        return Err(usage(format!("config {}: unknown option {k:?}", path.display())));
    }
    let set: Vec<(String, Value)> = given
        .into_iter()
        .filter(|(_, v)| !v.is_null() && *v != Value::Bool(false))
        .collect();
    for group in EXCLUSIVE {
        if set.iter().any(|(k, _)| group.contains(&k.as_str())) {
            for k in *group {
                merged.remove(*k);
            }
        }
    }
    merged.extend(set);
    serde_json::from_value(Value::Object(merged)).map_err(|e| usage(format!("config {}: {e}", path.display())))
}

fn required<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| usage(format!("missing required option --{flag}")))
}

fn bandwidth_choice(fixed: Option<f64>, mode: Option<Mode>) -> CliResult<BandwidthChoice> {
    match (fixed, mode) {
        (Some(_), Some(_)) => Err(usage("--bandwidth and --bandwidth-mode are mutually exclusive")),
        (Some(h), None) => Ok(BandwidthChoice::Fixed(h)),
        (None, m) => Ok(BandwidthChoice::Heuristic(m.map_or(BandwidthMode::Median, Into::into))),
    }
}

fn dsk_options(f: &DskFlags) -> CliResult<DskOptions> {
    let d = DskOptions::default();
    Ok(DskOptions {
        lambda: f.lambda.unwrap_or(d.lambda),
        bandwidth: bandwidth_choice(f.bandwidth, f.bandwidth_mode)?,
        max_outer_iters: f.max_iter.unwrap_or(d.max_outer_iters),
        qp: QpOptions::default(),
        tol: f.tol.unwrap_or(d.tol),
        seed: f.seed.unwrap_or(d.seed),
        restarts: f.restarts.unwrap_or(d.restarts),
        allow_large_lambda: f.allow_large_lambda,
    })
}

/// Every effective pipeline setting, echoed into the output.
#[derive(Serialize)]
struct Settings {
    lambda: f64,
    bandwidth_choice: BandwidthChoice,
    bandwidth: f64,
    max_iter: usize,
    tol: f64,
    qp_tol: f64,
    qp_max_iter: usize,
    seed: u64,
    restarts: usize,
    allow_large_lambda: bool,
}

impl Settings {
    fn new(o: &DskOptions, h: f64) -> Self {
        Self {
            lambda: o.lambda,
            bandwidth_choice: o.bandwidth,
            bandwidth: h,
            max_iter: o.max_outer_iters,
            tol: o.tol,
            qp_tol: o.qp.tol,
            qp_max_iter: o.qp.max_iter,
            seed: o.seed,
            restarts: o.restarts,
            allow_large_lambda: o.allow_large_lambda,
        }
    }
}

#[derive(Serialize)]
struct ClusterReport {
    command: &'static str,
    input: String,
    c: usize,
    settings: Settings,
    labels: Vec<usize>,
    alpha: Vec<f64>,
    objective_trace: Vec<f64>,
    eigenvalues: Vec<f64>,
    converged: bool,
    iterations: usize,
    metrics: Option<MetricReport>,
}

fn cluster(args: ClusterArgs) -> CliResult<Output> {
    let config = args.config.clone();
    let a = layered(args, config.as_deref())?;
    let input = required(a.input, "input")?;
    let c = required(a.c, "c")?;
    let options = dsk_options(&a.dsk)?;
    let (ds, truth) = load_csv(&input, a.label_col)?;
    let res = cdsk(&ds, &CdskConfig { c, options })?;
    let metrics = truth.map(|t| metric_report(&res.labels, &t)).transpose()?;
    let report = ClusterReport {
        command: "cluster",
        input: input.display().to_string(),
        c,
        settings: Settings::new(&options, res.bandwidth.get()),
        labels: res.labels.labels().to_vec(),
        alpha: res.alpha.as_array().to_vec(),
        objective_trace: res.objective_trace,
        eigenvalues: res.eigenvalues.to_vec(),
        converged: res.converged,
        iterations: res.iterations,
        metrics,
    };
    Ok((json_bytes(&report)?, a.out))
}

#[derive(Serialize)]
struct SslReport {
    command: &'static str,
    input: String,
    label_col: usize,
    c: usize,
    settings: Settings,
    /// All points, given labels kept and predictions filled in.
    labels: Vec<usize>,
    /// 0-based rows that had no label.
    unlabeled: Vec<usize>,
    y_u: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    objective_trace: Vec<f64>,
    converged: bool,
    iterations: usize,
    ridge: f64,
}

fn ssl(args: SslArgs) -> CliResult<Output> {
    let config = args.config.clone();
    let a = layered(args, config.as_deref())?;
    let input = required(a.input, "input")?;
    let label_col = required(a.label_col, "label-col")?;
    let options = dsk_options(&a.dsk)?;
    let (ds, pl) = load_csv_partial(&input, label_col).map_err(|e| match e {
        discsim::Error::InvalidArgument(m) => usage(m),
        other => other.into(),
    })?;
    let res = lpdsk(&ds, &pl, &options)?;
    let report = SslReport {
        command: "ssl",
        input: input.display().to_string(),
        label_col,
        c: pl.c(),
        settings: Settings::new(&options, res.bandwidth.get()),
        labels: res.full_labels.labels().to_vec(),
        unlabeled: res.unlabeled,
        y_u: rows(&res.y_u),
        alpha: res.alpha.as_array().to_vec(),
        objective_trace: res.objective_trace,
        converged: res.converged,
        iterations: res.iterations,
        ridge: res.ridge,
    };
    Ok((json_bytes(&report)?, a.out))
}

#[derive(Serialize)]
struct DiagnoseReport {
    command: &'static str,
    input: String,
    label_col: usize,
    alpha_source: String,
    bandwidth_choice: BandwidthChoice,
    bandwidth: f64,
    c: usize,
    n: usize,
    diagnostics: Diagnostics,
}

fn read_alpha(path: &Path, n: usize) -> CliResult<Weights> {
    let (ds, _) = load_csv(path, None)?;
    if ds.d() != 1 || ds.n() != n {
        return Err(usage(format!(
            "alpha file {} must be one column of {n} values, found {}x{}",
            path.display(),
            ds.n(),
            ds.d()
        )));
    }
    Ok(Weights::new(ds.points().column(0).to_owned())?)
}

fn diagnose(args: DiagnoseArgs) -> CliResult<Output> {
    let config = args.config.clone();
    let a = layered(args, config.as_deref())?;
    let input = required(a.input, "input")?;
    let label_col = required(a.label_col, "label-col")?;
    let choice = bandwidth_choice(a.bandwidth, a.bandwidth_mode)?;
    let (ds, labels) = load_csv(&input, Some(label_col))?;
    let labels: Labeling = labels.expect("label column requested");
    let alpha = match &a.alpha {
        Some(p) => read_alpha(p, ds.n())?,
        None => Weights::uniform(ds.n()),
    };
    let h = choice.resolve(&ds)?;
    let c = labels.c();
    let gamma = a.gamma.unwrap_or(c as f64 - 1.0);
    let delta = a.delta.unwrap_or(0.1);
    let d = diagnostics(&ds, &labels, &alpha, h, gamma, delta, a.b, a.epsilon)?;
    let report = DiagnoseReport {
        command: "diagnose",
        input: input.display().to_string(),
        label_col,
        alpha_source: a
            .alpha
            .map_or_else(|| "uniform".to_string(), |p| p.display().to_string()),
        bandwidth_choice: choice,
        bandwidth: h.get(),
        c,
        n: ds.n(),
        diagnostics: d,
    };
    Ok((json_bytes(&report)?, a.out))
}

#[derive(Serialize)]
struct DecomposeReport {
    command: &'static str,
    input: String,
    n: usize,
    eigenvalues: Vec<f64>,
    min_eigenvalue_plus: f64,
    min_eigenvalue_minus: f64,
    reconstruction_error: f64,
    max_abs_s_minus: f64,
    s_plus: Vec<Vec<f64>>,
    s_minus: Vec<Vec<f64>>,
}

fn decompose(args: DecomposeArgs) -> CliResult<Output> {
    let config = args.config.clone();
    let a = layered(args, config.as_deref())?;
    let input = required(a.input, "input")?;
    let (m, _) = load_csv(&input, None)?;
    let s = m.points();
    if s.nrows() != s.ncols() {
        return Err(usage(format!(
            "matrix in {} is {}x{}, not square",
            input.display(),
            s.nrows(),
            s.ncols()
        )));
    }
    let split = decompose_similarity(s)?;
    let min_eig = |a: &ndarray::Array2<f64>| -> CliResult<f64> {
        Ok(symmetric_eigen(a)?.values.iter().copied().fold(f64::INFINITY, f64::min))
    };
    let report = DecomposeReport {
        command: "decompose",
        input: input.display().to_string(),
        n: s.nrows(),
        eigenvalues: split.eigenvalues.to_vec(),
        min_eigenvalue_plus: min_eig(&split.s_plus)?,
        min_eigenvalue_minus: min_eig(&split.s_minus)?,
        reconstruction_error: split.reconstruction_error(s),
        max_abs_s_minus: split.s_minus.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        s_plus: rows(&split.s_plus),
        s_minus: rows(&split.s_minus),
    };
    Ok((json_bytes(&report)?, a.out))
}

fn gen(args: GenArgs) -> CliResult<Output> {
    let config = args.config.clone();
    let a = layered(args, config.as_deref())?;
    let seed = a.seed.unwrap_or(0);
    let (ds, labels): (Dataset, Labeling) = match a.kind.unwrap_or_default() {
        Kind::Blobs => generate_blobs(
            seed,
            a.n_per_class.unwrap_or(50),
            a.c.unwrap_or(2),
            a.d.unwrap_or(2),
            a.separation.unwrap_or(10.0),
            a.sigma.unwrap_or(1.0),
        )?,
        Kind::Moons => generate_two_moons(seed, a.n.unwrap_or(200), a.noise.unwrap_or(0.05))?,
    };
    let keep = a.labeled.unwrap_or(ds.n());
    let cells: Vec<Option<usize>> = labels
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &y)| (i < keep).then_some(y))
        .collect();
    let mut buf = Vec::new();
    write_csv(&mut buf, &ds, Some(&cells))?;
    Ok((buf, a.out))
}

fn rows(m: &ndarray::Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn json_bytes<T: Serialize>(v: &T) -> CliResult<Vec<u8>> {
    json::to_bytes(v).map_err(|e| usage(format!("cannot serialize output: {e}")))
}

fn run(cmd: Command) -> CliResult<()> {
    let (bytes, out) = match cmd {
        Command::Cluster(a) => cluster(a)?,
        Command::Ssl(a) => ssl(a)?,
        Command::Diagnose(a) => diagnose(a)?,
        Command::Decompose(a) => decompose(a)?,
        Command::Gen(a) => gen(a)?,
    };
    json::emit(&bytes, out.as_deref()).map_err(|e| {
        let target = out
            .as_ref()
            .map_or_else(|| "stdout".to_string(), |p| p.display().to_string());
        usage(format!("cannot write {target}: {e}"))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
