#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topofilt::criteria::CriterionConfig;
use topofilt::metric::{distances_from_points, DistanceMatrix, MetricName, PointCloud};
use topofilt::pipeline::PipelineConfig;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` uniform points in the unit square.
pub fn random_cloud(n: usize, seed: u64) -> DistanceMatrix {
    let mut r = rng(seed);
    let points = (0..n).map(|_| vec![r.gen::<f64>(), r.gen::<f64>()]).collect();
    distances_from_points(&PointCloud { points, metric: MetricName::Euclidean }).unwrap()
}

/// Like [`random_cloud`] but some points are exact copies of earlier ones.
pub fn cloud_with_duplicates(n: usize, seed: u64) -> DistanceMatrix {
    let mut r = rng(seed);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 && r.gen_bool(0.25) {
            let j = r.gen_range(0..i);
            points.push(points[j].clone());
        } else {
            points.push(vec![r.gen::<f64>(), r.gen::<f64>()]);
        }
    }
    distances_from_points(&PointCloud { points, metric: MetricName::Euclidean }).unwrap()
}

pub fn config(k: usize, lambda: f64, max_degree: usize) -> PipelineConfig {
    PipelineConfig { criterion: CriterionConfig::new(k, lambda).unwrap(), max_degree, ..PipelineConfig::default() }
}

/// Classes of points at mutual distance 0.
pub fn zero_distance_classes(d: &DistanceMatrix) -> usize {
    (0..d.len()).filter(|&i| (0..i).all(|j| d.get(i, j) != 0.0)).count()
}

/// Random centres in the unit square, each either a lone point or a tight
/// triple of side at most `spread`; mixes dense and sparse regions.
pub fn clustered_cloud(n: usize, seed: u64, spread: f64) -> DistanceMatrix {
    let mut r = rng(seed);
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n);
    while points.len() < n {
        let c = [r.gen::<f64>(), r.gen::<f64>()];
        let size = if r.gen_bool(0.5) { 1 } else { 3.min(n - points.len()) };
        for _ in 0..size {
            points.push(vec![c[0] + spread * r.gen::<f64>(), c[1] + spread * r.gen::<f64>()]);
        }
    }
    distances_from_points(&PointCloud { points, metric: MetricName::Euclidean }).unwrap()
}

/// The first `count` clustered clouds (scanning seeds from `first_seed`)
/// whose diagram has a degree-1 point under `cfg`.
pub fn clouds_with_loops(n: usize, count: usize, first_seed: u64, cfg: &PipelineConfig) -> Vec<DistanceMatrix> {
    let mut out = Vec::new();
    let mut seed = first_seed;
    while out.len() < count {
        let d = clustered_cloud(n, seed, 0.01);
        let r = topofilt::pipeline::persistence(&d, cfg).unwrap();
        if r.diagrams.degrees.get(1).is_some_and(|h1| !h1.is_empty()) {
            out.push(d);
        }
        seed += 1;
    }
    out
}
