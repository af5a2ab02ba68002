//! Density-link criterion: the threshold rule that generates the finite topologies.
//!
//! A point `x` is placed below `y` at scale `t` when
//! `max(d(x, y), lambda * (s_k(x) - s_k(y))) <= t`, where `s_k(x)` is the
//! distance from `x` to its `k`-th nearest other point. With `lambda = 0`
//! this is plain proximity (single linkage); with `lambda > 0` denser points
//! sit below sparser ones until the scale is large enough to reach back up.
//!
//! If `d'` is within `eps` of `d` in sup norm, every `s_k` moves by at most
//! `eps`, so every cost moves by at most `max(1, 2 * lambda) * eps`. That
//! constant is [`Criterion::lipschitz_constant`].

use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionConfig {
    pub k: usize,
    pub lambda: f64,
}

impl Default for CriterionConfig {
    fn default() -> Self {
        Self { k: 2, lambda: 2.0 }
    }
}

impl CriterionConfig {
    pub fn new(k: usize, lambda: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        Ok(Self { k, lambda })
    }

    /// `max(1, 2 * lambda)`.
    pub fn lipschitz_constant(&self) -> f64 {
        lipschitz_constant(self)
    }
}

pub fn lipschitz_constant(config: &CriterionConfig) -> f64 {
    f64::max(1.0, 2.0 * config.lambda)
}

/// Per-point k-NN distance; small means dense.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityVector(pub Vec<f64>);

/// `s(x)` = k-th smallest off-diagonal entry of row `x`.
pub fn knn_sparsity(d: &DistanceMatrix, k: usize) -> Result<SparsityVector> {
    let n = d.len();
    if k == 0 || k + 1 > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let mut scratch = Vec::with_capacity(n - 1);
    let s = (0..n)
        .map(|x| {
            scratch.clear();
            scratch.extend(d.row(x).iter().enumerate().filter(|&(y, _)| y != x).map(|(_, &v)| v));
            let (_, kth, _) = scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
            *kth
        })
        .collect();
    Ok(SparsityVector(s))
}

pub fn link_cost(d: &DistanceMatrix, s: &SparsityVector, lambda: f64, x: usize, y: usize) -> f64 {
    if x == y {
        return 0.0;
    }
    let gap = lambda * (s.0[x] - s.0[y]);
    f64::max(d.get(x, y), gap)
}

/// Any rule assigning a cost to each ordered pair, so that `x <= y` holds at
/// every scale `t >= cost(x, y)`.
pub trait Criterion: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cost(&self, x: usize, y: usize) -> f64;

    /// Costs move by at most this factor times the sup-norm change of the metric.
    fn lipschitz_constant(&self) -> f64;
}

/// The density-link rule evaluated on one distance matrix.
#[derive(Debug, Clone)]
pub struct DensityLink<'a> {
    d: &'a DistanceMatrix,
    sparsity: SparsityVector,
    config: CriterionConfig,
}

impl<'a> DensityLink<'a> {
    /// A single point has no neighbours; any `k` is accepted there.
    pub fn new(d: &'a DistanceMatrix, config: CriterionConfig) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::EmptyInput);
        }
        let sparsity = if d.len() == 1 {
            if config.k == 0 {
                return Err(Error::KOutOfRange { k: 0, n: 1 });
            }
            SparsityVector(vec![0.0])
        } else {
            knn_sparsity(d, config.k)?
        };
        Ok(Self { d, sparsity, config })
    }

    pub fn sparsity(&self) -> &SparsityVector {
        &self.sparsity
    }

    pub fn config(&self) -> &CriterionConfig {
        &self.config
    }
}

impl Criterion for DensityLink<'_> {
    fn len(&self) -> usize {
        self.d.len()
    }

    fn cost(&self, x: usize, y: usize) -> f64 {
        link_cost(self.d, &self.sparsity, self.config.lambda, x, y)
    }

    fn lipschitz_constant(&self) -> f64 {
        self.config.lipschitz_constant()
    }
}

/// Reflexive relation of all pairs with `cost <= t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRelation {
    pub t: f64,
    pub pairs: BitMatrix,
}

pub fn relation_at<C: Criterion + ?Sized>(criterion: &C, t: f64) -> StepRelation {
    let n = criterion.len();
    let pairs = BitMatrix::from_fn(n, |x, y| x == y || criterion.cost(x, y) <= t);
    StepRelation { t, pairs }
}

pub fn step_relation(d: &DistanceMatrix, config: &CriterionConfig, t: f64) -> Result<StepRelation> {
    Ok(relation_at(&DensityLink::new(d, *config)?, t))
}

/// Strictly ascending scales starting at 0; the step relation is constant on
/// each `[values[i], values[i + 1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid {
    values: Vec<f64>,
}

impl ThresholdGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.first() != Some(&0.0) {
            return Err(Error::InvalidParameter("threshold grid must start at 0".into()));
        }
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("threshold grid must be strictly ascending".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last_index(&self) -> usize {
        self.values.len() - 1
    }

    /// Index of the largest grid value `<= t`, or `None` when `t < 0`.
    pub fn index_at(&self, t: f64) -> Option<usize> {
        let count = self.values.partition_point(|&v| v <= t);
        count.checked_sub(1)
    }
}

pub fn thresholds_of<C: Criterion + ?Sized>(criterion: &C) -> ThresholdGrid {
    let n = criterion.len();
    let mut values = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let c = criterion.cost(x, y);
            if x != y && c > 0.0 && c.is_finite() {
                values.push(c);
            }
        }
    }
    values.sort_unstable_by(f64::total_cmp);
    values.dedup();
    values.insert(0, 0.0);
    ThresholdGrid { values }
}

pub fn critical_thresholds(d: &DistanceMatrix, config: &CriterionConfig) -> Result<ThresholdGrid> {
    Ok(thresholds_of(&DensityLink::new(d, *config)?))
}
