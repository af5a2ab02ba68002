//! Finite metric data: validation, CSV I/O, point clouds and perturbations.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Entries `(i,j)` and `(j,i)` may differ by at most this much; they are averaged.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

const MAX_REPORTED_VIOLATIONS: usize = 64;

/// Symmetric, zero-diagonal, nonnegative `n × n` dissimilarity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
    labels: Option<Vec<String>>,
}

/// A triple with `d(i,k) > d(i,j) + d(j,k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub excess: f64,
}

/// Result of [`load_distance_matrix`]: the matrix plus triangle-inequality diagnostics.
#[derive(Debug, Clone)]
pub struct LoadedMatrix {
    pub matrix: DistanceMatrix,
    /// Total number of violating triples `(i, j, k)` with `i < k`.
    pub triangle_violation_count: usize,
    /// The first few violations, in lexicographic order.
    pub triangle_violations: Vec<TriangleViolation>,
}

/// Validate a square table as a dissimilarity matrix.
///
/// Triangle-inequality failures are reported in the result, not raised.
pub fn load_distance_matrix(table: &[Vec<f64>]) -> Result<LoadedMatrix> {
    let n = table.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    for (row, r) in table.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NonSquare { row, len: r.len(), expected: n });
        }
    }
    for (i, r) in table.iter().enumerate() {
        for (j, &value) in r.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeEntry { i, j, value });
            }
        }
        if table[i][i] != 0.0 {
            return Err(Error::NonzeroDiagonal { i, value: table[i][i] });
        }
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (table[i][j], table[j][i]);
            let diff = (a - b).abs();
            if diff > SYMMETRY_TOLERANCE {
                return Err(Error::AsymmetryBeyondTolerance { i, j, diff });
            }
            let v = if a == b { a } else { 0.5 * (a + b) };
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    let matrix = DistanceMatrix { n, entries, labels: None };
    let (triangle_violation_count, triangle_violations) = matrix.triangle_violations();
    Ok(LoadedMatrix { matrix, triangle_violation_count, triangle_violations })
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::SizeMismatch { left: self.n, right: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn to_table(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Largest off-diagonal entry (0 for a single point).
    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// Relabel points: entry `(i,j)` of the result is entry `(perm[i], perm[j])` here.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        let labels = self.labels.as_ref().map(|l| perm.iter().map(|&p| l[p].clone()).collect());
        Self { n, entries, labels }
    }

    fn triangle_violations(&self) -> (usize, Vec<TriangleViolation>) {
        let n = self.n;
        let mut count = 0;
        let mut first = Vec::new();
        for i in 0..n {
            for k in (i + 1)..n {
                let direct = self.get(i, k);
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    let excess = direct - (self.get(i, j) + self.get(j, k));
                    if excess > SYMMETRY_TOLERANCE {
                        count += 1;
                        if first.len() < MAX_REPORTED_VIOLATIONS {
                            first.push(TriangleViolation { i, j, k, excess });
                        }
                    }
                }
            }
        }
        (count, first)
    }

    /// Serialize as CSV: an optional label header row and column, then the entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(labels) = &self.labels {
            for l in labels {
                out.push(',');
                out.push_str(&csv_field(l));
            }
            out.push('\n');
        }
        for i in 0..self.n {
            let mut first = true;
            if let Some(labels) = &self.labels {
                out.push_str(&csv_field(&labels[i]));
                first = false;
            }
            for &v in self.row(i) {
                if !first {
                    out.push(',');
                }
                first = false;
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn read_records(text: &str) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(rows)
}

fn parse_num(s: &str) -> Option<f64> {
    s.parse::<f64>().ok()
}

/// Parse a distance CSV with optional header row and/or label column.
pub fn parse_distance_csv(text: &str) -> Result<LoadedMatrix> {
    let mut rows = read_records(text)?;
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let header_row = rows[0].iter().enumerate().any(|(j, c)| !(j == 0 && c.is_empty()) && parse_num(c).is_none());
    let header = if header_row { Some(rows.remove(0)) } else { None };
    let label_col = rows.iter().any(|r| r.first().is_some_and(|c| parse_num(c).is_none()));
    let mut labels: Option<Vec<String>> = None;
    let mut table = Vec::with_capacity(rows.len());
    let mut col_labels = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let cells = if label_col {
            col_labels.push(r[0].clone());
            &r[1..]
        } else {
            &r[..]
        };
        let parsed = cells
            .iter()
            .enumerate()
            .map(|(j, c)| parse_num(c).ok_or_else(|| Error::Parse(format!("row {i}, column {j}: '{c}' is not a number"))))
            .collect::<Result<Vec<f64>>>()?;
        table.push(parsed);
    }
    if let Some(h) = header {
        let names: Vec<String> = if label_col || h.len() == table.len() + 1 { h[1..].to_vec() } else { h };
        labels = Some(names);
    } else if label_col {
        labels = Some(col_labels);
    }
    let mut loaded = load_distance_matrix(&table)?;
    if let Some(l) = labels {
        loaded.matrix = loaded.matrix.with_labels(l)?;
    }
    Ok(loaded)
}

/// Metric used to turn coordinates into distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricName {
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl MetricName {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            MetricName::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            MetricName::Manhattan => diffs.sum(),
            MetricName::Chebyshev => diffs.fold(0.0, f64::max),
        }
    }
}

impl FromStr for MetricName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Self::Euclidean),
            "manhattan" => Ok(Self::Manhattan),
            "chebyshev" => Ok(Self::Chebyshev),
            other => Err(Error::InvalidParameter(format!("unknown metric '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Vec<f64>>,
    pub metric: MetricName,
}

pub fn distances_from_points(cloud: &PointCloud) -> Result<DistanceMatrix> {
    let points = &cloud.points;
    let dim = points.first().ok_or(Error::EmptyInput)?.len();
    if dim == 0 {
        return Err(Error::DimensionMismatch { index: 0, expected: 1, found: 0 });
    }
    for (index, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { index, expected: dim, found: p.len() });
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::Parse(format!("point {index} has a non-finite coordinate")));
        }
    }
    let n = points.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = cloud.metric.distance(&points[i], &points[j]);
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { n, entries, labels: None })
}

/// Parse a point CSV (one point per row, optional header row).
pub fn parse_point_csv(text: &str, metric: MetricName) -> Result<PointCloud> {
    let mut rows = read_records(text)?;
    if rows.first().is_some_and(|r| r.iter().any(|c| parse_num(c).is_none())) {
        rows.remove(0);
    }
    let points = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .map(|c| parse_num(c).ok_or_else(|| Error::Parse(format!("row {i}: '{c}' is not a number"))))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(PointCloud { points, metric })
}

/// Uniform noise on `[-epsilon, epsilon]`, reproducible from `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub epsilon: f64,
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be finite and >= 0, got {epsilon}")));
        }
        Ok(Self { epsilon, seed })
    }
}

/// Add independent uniform noise to every off-diagonal pair, clipping at 0.
///
/// The result satisfies `sup_deviation(d, result) <= spec.epsilon` exactly in
/// floating point: a sum that rounds past the band is stepped back toward the
/// original value.
pub fn perturb(d: &DistanceMatrix, spec: &PerturbationSpec) -> DistanceMatrix {
    let eps = spec.epsilon;
    if eps == 0.0 {
        return d.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = d.n;
    let mut out = d.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let original = d.get(i, j);
            let noise: f64 = rng.gen_range(-eps..=eps);
            let mut v = (original + noise).max(0.0);
            while (v - original).abs() > eps {
                v = if v > original { v.next_down() } else { v.next_up() };
            }
            out.entries[i * n + j] = v;
            out.entries[j * n + i] = v;
        }
    }
    out
}

/// Sup-norm distance between two matrices of the same size.
pub fn sup_deviation(a: &DistanceMatrix, b: &DistanceMatrix) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::SizeMismatch { left: a.n, right: b.n });
    }
    Ok(a.entries.iter().zip(&b.entries).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}
