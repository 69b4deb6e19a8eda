//! Datasets, labelings, CSV ingestion and synthetic generators.
//!
//! CSV conventions: comma separated, one sample per row. The first row is a
//! header when none of its feature cells parses as a number. Label cells are
//! arbitrary strings remapped to dense class ids `1..=c` in order of first
//! appearance. Error positions are 1-based; the label column argument is a
//! 0-based index.
//!
//! Generators draw from a ChaCha8 stream seeded with `seed_from_u64`, so a
//! given seed produces the same samples on every platform.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// `n × d` matrix of finite samples, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Array2<f64>,
}

impl Dataset {
    pub fn new(points: Array2<f64>) -> Result<Self> {
        let (n, d) = points.dim();
        if n == 0 || d == 0 {
            return Err(Error::Empty(format!("dataset must be at least 1x1, got {n}x{d}")));
        }
        if let Some(((i, j), v)) = points.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sample ({i}, {j}) = {v}")));
        }
        Ok(Self { points })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::Ragged {
                row: i + 1,
                found: r.len(),
                expected: d,
            });
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let points = Array2::from_shape_vec((n, d), flat).map_err(|e| Error::DimensionMismatch(e.to_string()))?;
        Self::new(points)
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn d(&self) -> usize {
        self.points.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.points.row(i)
    }

    /// Rows selected by `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            points: self.points.select(Axis(0), indices),
        }
    }
}

/// Class ids `1..=c`, one per sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<usize>,
    c: usize,
}

impl Labeling {
    pub fn new(labels: Vec<usize>, c: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Empty("labeling has no entries".into()));
        }
        if c == 0 {
            return Err(Error::InvalidArgument("class count must be positive".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y == 0 || y > c) {
            return Err(Error::ClassOutOfRange { class: bad, classes: c });
        }
        Ok(Self { labels, c })
    }

    /// Remaps arbitrary values to dense ids `1..=c` in first-appearance order.
    pub fn from_values<T: Eq + std::hash::Hash + Clone>(values: &[T]) -> Result<Self> {
        let (labels, c) = dense_remap(values.iter().cloned());
        Self::new(labels, c)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of samples per class, indexed by `class − 1`.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.c];
        for &y in &self.labels {
            counts[y - 1] += 1;
        }
        counts
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.labels.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "labeling has {} entries, data has {n}",
                self.labels.len()
            )));
        }
        Ok(())
    }
}

/// Labels for a subset of the samples; `None` marks an unlabeled point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialLabeling {
    labels: Vec<Option<usize>>,
    c: usize,
}

impl PartialLabeling {
    /// Requires at least one labeled and one unlabeled point, and every class
    /// in `1..=c` present among the labeled ones.
    pub fn new(labels: Vec<Option<usize>>, c: usize) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidArgument("class count must be positive".into()));
        }
        let mut seen = vec![false; c];
        for y in labels.iter().flatten() {
            if *y == 0 || *y > c {
                return Err(Error::ClassOutOfRange { class: *y, classes: c });
            }
            seen[y - 1] = true;
        }
        let l = labels.iter().filter(|y| y.is_some()).count();
        if l == 0 {
            return Err(Error::InvalidArgument("no labeled points".into()));
        }
        if l == labels.len() {
            return Err(Error::InvalidArgument("no unlabeled points".into()));
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(format!(
                "class {} has no labeled point",
                missing + 1
            )));
        }
        Ok(Self { labels, c })
    }

    /// The first `prefix.len()` of `n` points are labeled.
    pub fn from_prefix(prefix: &[usize], n: usize, c: usize) -> Result<Self> {
        if prefix.len() > n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {n} points",
                prefix.len()
            )));
        }
        let mut labels: Vec<Option<usize>> = prefix.iter().map(|&y| Some(y)).collect();
        labels.resize(n, None);
        Self::new(labels, c)
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labeled_indices(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i].is_some()).collect()
    }

    pub fn unlabeled_indices(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i].is_none()).collect()
    }
}

fn dense_remap<T: Eq + std::hash::Hash>(values: impl Iterator<Item = T>) -> (Vec<usize>, usize) {
    let mut ids: HashMap<T, usize> = HashMap::new();
    let labels = values
        .map(|v| {
            let next = ids.len() + 1;
            *ids.entry(v).or_insert(next)
        })
        .collect();
    (labels, ids.len())
}

/// Parsed CSV contents before label interpretation.
#[derive(Debug, Clone)]
pub struct Table {
    pub points: Dataset,
    /// Raw label cells (trimmed); `None` for blank cells. Present only when a
    /// label column was requested.
    pub raw_labels: Option<Vec<Option<String>>>,
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses CSV text from any reader.
pub fn read_table<R: Read>(reader: R, label_column: Option<usize>) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
        // a lone empty field is a blank line
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        records.push(rec);
    }
    if records.is_empty() {
        return Err(Error::Empty("csv has no rows".into()));
    }
    let width = records[0].len();
    if let Some(lc) = label_column {
        if lc >= width {
            return Err(Error::InvalidArgument(format!(
                "label column {lc} out of range for {width} columns"
            )));
        }
    }
    let is_feature = |j: usize| Some(j) != label_column;
    if width == 0 || !(0..width).any(is_feature) {
        return Err(Error::Empty("csv has no feature columns".into()));
    }

    let header = (0..width)
        .filter(|&j| is_feature(j))
        .all(|j| parse_cell(&records[0][j]).is_none());
    let first = usize::from(header);

    let mut flat = Vec::new();
    let mut raw_labels = label_column.map(|_| Vec::new());
    for (r, rec) in records.iter().enumerate().skip(first) {
        let row = r + 1;
        if rec.len() != width {
            return Err(Error::Ragged {
                row,
                found: rec.len(),
                expected: width,
            });
        }
        for (j, cell) in rec.iter().enumerate() {
            if is_feature(j) {
                let v = parse_cell(cell).ok_or_else(|| Error::Parse {
                    row,
                    column: j + 1,
                    message: format!("cannot parse {cell:?} as a finite number"),
                })?;
                flat.push(v);
            } else if let Some(labels) = raw_labels.as_mut() {
                let t = cell.trim();
                labels.push((!t.is_empty()).then(|| t.to_string()));
            }
        }
    }
    let n = records.len() - first;
    if n == 0 {
        return Err(Error::Empty("csv has a header but no data rows".into()));
    }
    let d = width - usize::from(label_column.is_some());
    let points = Array2::from_shape_vec((n, d), flat).map_err(|e| Error::DimensionMismatch(e.to_string()))?;
    Ok(Table {
        points: Dataset::new(points)?,
        raw_labels,
    })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a dataset and, when `label_column` is given, a fully labeled
/// [`Labeling`]. Blank label cells are rejected here; see [`load_csv_partial`].
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<usize>) -> Result<(Dataset, Option<Labeling>)> {
    let table = read_table(open(path.as_ref())?, label_column)?;
    let labels = match table.raw_labels {
        None => None,
        Some(raw) => {
            if let Some(i) = raw.iter().position(Option::is_none) {
                return Err(Error::Parse {
                    row: i + 1,
                    column: label_column.unwrap_or(0) + 1,
                    message: "blank label".into(),
                });
            }
            let values: Vec<String> = raw.into_iter().flatten().collect();
            Some(Labeling::from_values(&values)?)
        }
    };
    Ok((table.points, labels))
}

/// Loads a dataset whose label column may contain blanks (unlabeled points).
pub fn load_csv_partial(path: impl AsRef<Path>, label_column: usize) -> Result<(Dataset, PartialLabeling)> {
    let table = read_table(open(path.as_ref())?, Some(label_column))?;
    let raw = table.raw_labels.unwrap_or_default();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let labels: Vec<Option<usize>> = raw
        .into_iter()
        .map(|cell| {
            cell.map(|v| {
                let next = ids.len() + 1;
                *ids.entry(v).or_insert(next)
            })
        })
        .collect();
    if ids.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "label column {label_column} is blank in every row"
        )));
    }
    let pl = PartialLabeling::new(labels, ids.len())?;
    Ok((table.points, pl))
}

/// Writes samples (and an optional trailing label column) without a header.
/// Values use Rust's shortest round-trip formatting, so reading the file back
/// reproduces every entry exactly.
pub fn write_csv<W: Write>(mut w: W, ds: &Dataset, labels: Option<&[Option<usize>]>) -> Result<()> {
    let io = |source| Error::Io {
        path: "<csv writer>".into(),
        source,
    };
    for (i, row) in ds.points.rows().into_iter().enumerate() {
        let mut line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        if let Some(labels) = labels {
            line.push(labels[i].map(|y| y.to_string()).unwrap_or_default());
        }
        writeln!(w, "{}", line.join(",")).map_err(io)?;
    }
    Ok(())
}

pub fn save_csv(path: impl AsRef<Path>, ds: &Dataset, labels: Option<&[Option<usize>]>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_csv(std::io::BufWriter::new(file), ds, labels)
}

/// Centers every column and scales it to unit population variance.
/// Columns with (numerically) zero variance are only centered.
pub fn standardize(ds: &Dataset) -> Dataset {
    let n = ds.n() as f64;
    let mut points = ds.points.clone();
    for mut col in points.columns_mut() {
        let mean = col.sum() / n;
        col.mapv_inplace(|v| v - mean);
        let var = col.iter().map(|v| v * v).sum::<f64>() / n;
        let sd = var.sqrt();
        if sd > 1e-12 * mean.abs().max(1.0) {
            col.mapv_inplace(|v| v / sd);
        }
    }
    Dataset { points }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `c` isotropic Gaussian blobs in `d` dimensions. Blob `k` (0-based) is
/// centered at `k · separation` along the first axis; sample `i` belongs to
/// class `i mod c + 1`, so any prefix of the data is class-balanced.
pub fn generate_blobs(
    seed: u64,
    n_per_class: usize,
    c: usize,
    d: usize,
    separation: f64,
    sigma: f64,
) -> Result<(Dataset, Labeling)> {
    if n_per_class == 0 || c == 0 || d == 0 {
        return Err(Error::InvalidArgument("blob counts must be at least 1".into()));
    }
    if !(sigma > 0.0 && sigma.is_finite()) || !separation.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need finite separation and sigma > 0, got {separation}, {sigma}"
        )));
    }
    let n = n_per_class * c;
    let mut r = rng(seed);
    let mut points = Array2::zeros((n, d));
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let k = i % c;
        for j in 0..d {
            let z: f64 = StandardNormal.sample(&mut r);
            let center = if j == 0 { k as f64 * separation } else { 0.0 };
            points[[i, j]] = center + sigma * z;
        }
        labels.push(k + 1);
    }
    Ok((Dataset::new(points)?, Labeling::new(labels, c)?))
}

/// Two interleaved half circles of radius 1: the upper one centered at the
/// origin (class 1) and the lower one centered at `(1, 0.5)` (class 2).
/// Samples alternate between the moons; `noise` is the standard deviation of
/// the Gaussian jitter added to both coordinates.
pub fn generate_two_moons(seed: u64, n: usize, noise: f64) -> Result<(Dataset, Labeling)> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("n must be even and >= 2, got {n}")));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise must be >= 0, got {noise}")));
    }
    let m = n / 2;
    let mut r = rng(seed);
    let mut points = Array2::zeros((n, 2));
    let mut labels = Vec::with_capacity(n);
    for k in 0..m {
        let t = if m == 1 {
            0.0
        } else {
            std::f64::consts::PI * k as f64 / (m - 1) as f64
        };
        let outer = [t.cos(), t.sin()];
        let inner = [1.0 - t.cos(), 0.5 - t.sin()];
        for (offset, (p, y)) in [(outer, 1), (inner, 2)].into_iter().enumerate() {
            let i = 2 * k + offset;
            for j in 0..2 {
                let z: f64 = StandardNormal.sample(&mut r);
                points[[i, j]] = p[j] + noise * z;
            }
            labels.push(y);
        }
    }
    Ok((Dataset::new(points)?, Labeling::new(labels, 2)?))
}
