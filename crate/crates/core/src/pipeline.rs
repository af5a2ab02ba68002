//! Metric → criterion → preorders → posets → cores → complexes → homology → barcodes.
//!
//! The step relation only changes at grid values, and its transitive closure
//! changes at even fewer of them. Stages with the same closure share one
//! [`StageCore`], and the structure map between them is the identity.

use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitMatrix;
use crate::complexes::{crosscut_complex_skeleton, order_complex_skeleton, SimplicialComplex, SimplicialVertexMap, DEFAULT_SIMPLEX_CAP};
use crate::criteria::{thresholds_of, Criterion, CriterionConfig, DensityLink, ThresholdGrid};
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::finite_space::{close_transitively, coarsening_map, t0_quotient, Preorder, QuotientResult};
use crate::homology::{build_chain_complex, homology_basis, induced_matrix, HomologyBasis, InducedMatrix};
use crate::metric::{perturb, DistanceMatrix, PerturbationSpec};
use crate::persistence::{bottleneck, diagram_of_module, PersistenceDiagram, PersistenceModule};
use crate::poset::{conjugate_map, core, crosscut_valid, maximal_elements, CoreResult, CrosscutValidity, Poset, DEFAULT_SUBSET_CHECK_CAP};

/// Slack on stability comparisons, absorbing floating-point grid arithmetic.
pub const STABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComplexMode {
    #[default]
    Order,
    /// Also compute crosscut Betti numbers per stage, falling back to order
    /// complexes alone (with a warning) where the crosscut is not valid.
    CrosscutAuto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub simplices: usize,
    pub subset_checks: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Self { simplices: DEFAULT_SIMPLEX_CAP, subset_checks: DEFAULT_SUBSET_CHECK_CAP }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub criterion: CriterionConfig,
    pub field: FieldSpec,
    pub max_degree: usize,
    pub mode: ComplexMode,
    /// Replace each quotient poset by its beat-point core before building complexes.
    pub reduce_cores: bool,
    pub caps: Caps,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            criterion: CriterionConfig::default(),
            field: FieldSpec::default(),
            max_degree: 2,
            mode: ComplexMode::Order,
            reduce_cores: true,
            caps: Caps::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscutReport {
    pub validity: CrosscutValidity,
    /// Present when the crosscut complex was built within the caps.
    pub betti: Option<Vec<usize>>,
}

/// Everything derived from one preorder.
#[derive(Debug, Clone)]
pub struct StageCore {
    pub preorder: Preorder,
    pub quotient: QuotientResult,
    pub core: CoreResult,
    /// Order complex of the core, truncated to dimension `max_degree + 1`.
    pub complex: SimplicialComplex,
    pub homology: HomologyBasis,
    pub crosscut: Option<CrosscutReport>,
}

impl StageCore {
    pub fn build(preorder: Preorder, cfg: &PipelineConfig) -> Result<Self> {
        let quotient = t0_quotient(&preorder);
        let core = if cfg.reduce_cores { core(&quotient.poset) } else { CoreResult::identity(&quotient.poset) };
        let complex = order_complex_skeleton(&core.core, Some(cfg.max_degree + 1), cfg.caps.simplices)?;
        let homology = homology_basis(&build_chain_complex(&complex, cfg.field), cfg.max_degree);
        let crosscut = match cfg.mode {
            ComplexMode::Order => None,
            ComplexMode::CrosscutAuto => Some(crosscut_report(&quotient.poset, cfg, false)?),
        };
        Ok(Self { preorder, quotient, core, complex, homology, crosscut })
    }

    pub fn betti(&self) -> Vec<usize> {
        self.homology.betti()
    }
}

/// Crosscut validity on `p`, plus crosscut Betti numbers when valid (or always, if `force`).
fn crosscut_report(p: &Poset, cfg: &PipelineConfig, force: bool) -> Result<CrosscutReport> {
    let cut = maximal_elements(p)?;
    let validity = crosscut_valid(p, &cut, cfg.caps.subset_checks)?;
    if !validity.is_valid() && !force {
        return Ok(CrosscutReport { validity, betti: None });
    }
    let betti = match crosscut_complex_skeleton(p, &cut, Some(cfg.max_degree + 1), cfg.caps.simplices) {
        Ok(k) => Some(homology_basis(&build_chain_complex(&k, cfg.field), cfg.max_degree).betti()),
        Err(Error::ComplexityCapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(CrosscutReport { validity, betti })
}

#[derive(Debug, Clone)]
pub struct FiltrationStage {
    pub t: f64,
    data: Arc<StageCore>,
}

impl FiltrationStage {
    pub fn data(&self) -> &StageCore {
        &self.data
    }

    /// Whether two stages were built from the same preorder.
    pub fn shares_data_with(&self, other: &FiltrationStage) -> bool {
        Arc::ptr_eq(&self.data, &other.data)
    }
}

#[derive(Debug, Clone)]
pub struct Filtration {
    pub config: PipelineConfig,
    pub grid: ThresholdGrid,
    pub stages: Vec<FiltrationStage>,
    pub warnings: Vec<String>,
}

impl Filtration {
    /// Index of the stage in effect at scale `t` (largest grid value `<= t`).
    pub fn stage_index_at(&self, t: f64) -> Option<usize> {
        self.grid.index_at(t)
    }

    pub fn distinct_stage_count(&self) -> usize {
        1 + self.stages.windows(2).filter(|w| !w[0].shares_data_with(&w[1])).count()
    }

    /// Simplices summed over the distinct stage complexes.
    pub fn total_simplices(&self) -> usize {
        let mut total = 0;
        for (i, s) in self.stages.iter().enumerate() {
            if i == 0 || !s.shares_data_with(&self.stages[i - 1]) {
                total += s.data.complex.total_count();
            }
        }
        total
    }
}

/// Transitive closures of the step relations at each grid value, with the
/// grid index where each distinct closure first appears.
fn closures_along_grid<C: Criterion>(criterion: &C, grid: &ThresholdGrid) -> Vec<(usize, Preorder)> {
    let n = criterion.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let c = criterion.cost(x, y);
            if x != y && c.is_finite() {
                pairs.push((c, x, y));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut closed = BitMatrix::identity(n);
    let mut next = 0;
    let mut out: Vec<(usize, Preorder)> = Vec::new();
    for (i, &t) in grid.values().iter().enumerate() {
        let mut changed = i == 0;
        while next < pairs.len() && pairs[next].0 <= t {
            let (_, x, y) = pairs[next];
            next += 1;
            if closed.get(x, y) {
                continue;
            }
            changed = true;
            for u in 0..n {
                if closed.get(u, x) {
                    closed.union_rows(u, y);
                }
            }
        }
        if changed {
            out.push((i, close_transitively(&closed)));
        }
    }
    out
}

pub fn build_stages(d: &DistanceMatrix, cfg: &PipelineConfig) -> Result<Filtration> {
    let criterion = DensityLink::new(d, cfg.criterion)?;
    let grid = thresholds_of(&criterion);
    let closures = closures_along_grid(&criterion, &grid);
    let cores: Vec<Arc<StageCore>> = closures
        .par_iter()
        .map(|(_, p)| StageCore::build(p.clone(), cfg).map(Arc::new))
        .collect::<Result<_>>()?;
    let mut stages = Vec::with_capacity(grid.len());
    let mut warnings = Vec::new();
    for (c, (start, _)) in closures.iter().enumerate() {
        let end = closures.get(c + 1).map_or(grid.len(), |(s, _)| *s);
        let data = &cores[c];
        if let Some(report) = &data.crosscut {
            let t = grid.values()[*start];
            match &report.validity {
                CrosscutValidity::Valid if report.betti.is_none() => {
                    warnings.push(format!("t={t}: crosscut complex exceeds the simplex cap, using the order complex only"))
                }
                CrosscutValidity::Valid => {}
                CrosscutValidity::Invalid { witness } => warnings.push(format!(
                    "t={t}: maximal-element crosscut is not valid (face {witness:?} has no meet), using the order complex only"
                )),
                CrosscutValidity::Indeterminate { required_checks } => warnings.push(format!(
                    "t={t}: crosscut validity needs {required_checks} subset checks, above the cap; using the order complex only"
                )),
            }
        }
        for i in *start..end {
            stages.push(FiltrationStage { t: grid.values()[i], data: Arc::clone(data) });
        }
    }
    Ok(Filtration { config: *cfg, grid, stages, warnings })
}

/// Homology matrices of the map between two stages induced by the identity on
/// points; requires the source preorder to be contained in the target's.
pub fn map_between(a: &StageCore, b: &StageCore) -> Result<InducedMatrix> {
    let coarsening = coarsening_map(&a.quotient, &b.quotient)?;
    let conjugated = conjugate_map(&coarsening, &a.core, &b.core)?;
    let vertex_map = SimplicialVertexMap::new(&a.complex, &b.complex, conjugated.assignment().to_vec())?;
    induced_matrix(&vertex_map, (&a.complex, &a.homology), (&b.complex, &b.homology))
}

/// Structure maps between consecutive stages.
pub fn structure_maps(f: &Filtration) -> Result<Vec<InducedMatrix>> {
    let field = f.config.field;
    (0..f.stages.len().saturating_sub(1))
        .into_par_iter()
        .map(|i| {
            let (a, b) = (&f.stages[i], &f.stages[i + 1]);
            if a.shares_data_with(b) {
                Ok(InducedMatrix::identity(&a.data.betti(), field))
            } else {
                map_between(&a.data, &b.data)
            }
        })
        .collect()
}

/// The map from stage `i` to stage `j >= i`, computed directly rather than by composition.
pub fn stage_map(f: &Filtration, i: usize, j: usize) -> Result<InducedMatrix> {
    if i > j || j >= f.stages.len() {
        return Err(Error::InvalidParameter(format!("no stage map from {i} to {j}")));
    }
    let (a, b) = (&f.stages[i], &f.stages[j]);
    if a.shares_data_with(b) {
        return Ok(InducedMatrix::identity(&a.data.betti(), f.config.field));
    }
    map_between(&a.data, &b.data)
}

/// One persistence module per degree `0..=max_degree`.
pub fn modules(f: &Filtration, maps: &[InducedMatrix]) -> Result<Vec<PersistenceModule>> {
    (0..=f.config.max_degree)
        .map(|n| {
            let dims = f.stages.iter().map(|s| s.data.homology.betti_at(n)).collect();
            let matrices = maps.iter().map(|m| m.degrees[n].clone()).collect();
            PersistenceModule::new(f.grid.clone(), dims, matrices, f.config.field)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub stages: usize,
    pub distinct_stages: usize,
    pub total_simplices: usize,
    pub points_per_degree: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PersistenceResult {
    pub diagrams: PersistenceDiagram,
    pub summary: Summary,
    pub warnings: Vec<String>,
}

pub fn persistence_of(f: &Filtration) -> Result<PersistenceResult> {
    let maps = structure_maps(f)?;
    let degrees = modules(f, &maps)?.iter().map(diagram_of_module).collect::<Result<Vec<_>>>()?;
    let summary = Summary {
        stages: f.stages.len(),
        distinct_stages: f.distinct_stage_count(),
        total_simplices: f.total_simplices(),
        points_per_degree: degrees.iter().map(|d| d.total()).collect(),
    };
    Ok(PersistenceResult {
        diagrams: PersistenceDiagram { field: f.config.field, degrees },
        summary,
        warnings: f.warnings.clone(),
    })
}

pub fn persistence(d: &DistanceMatrix, cfg: &PipelineConfig) -> Result<PersistenceResult> {
    persistence_of(&build_stages(d, cfg)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub epsilon: f64,
    pub lipschitz: f64,
    pub bound: f64,
    pub trials: usize,
    pub seed: u64,
    /// Largest bottleneck distance over all trials, per degree.
    pub max_distance: Vec<f64>,
    pub pass: bool,
}

impl StabilityReport {
    /// Recompute the pass flag against a (possibly different) bound.
    pub fn judged_against(mut self, bound: f64) -> Self {
        self.bound = bound;
        self.pass = self.max_distance.iter().all(|&d| d <= bound + STABILITY_TOLERANCE);
        self
    }
}

pub fn stability_experiment(d: &DistanceMatrix, cfg: &PipelineConfig, epsilon: f64, trials: usize, seed: u64) -> Result<StabilityReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trial_seeds: Vec<u64> = (0..trials).map(|_| rng.next_u64()).collect();
    let base = persistence(d, cfg)?.diagrams;
    let per_trial: Vec<Vec<f64>> = trial_seeds
        .par_iter()
        .map(|&s| {
            let moved = perturb(d, &PerturbationSpec::new(epsilon, s)?);
            let other = persistence(&moved, cfg)?.diagrams;
            Ok(base.degrees.iter().zip(&other.degrees).map(|(a, b)| bottleneck(a, b)).collect())
        })
        .collect::<Result<_>>()?;
    let mut max_distance = vec![0.0f64; cfg.max_degree + 1];
    for distances in &per_trial {
        for (m, &x) in max_distance.iter_mut().zip(distances) {
            *m = m.max(x);
        }
    }
    let lipschitz = cfg.criterion.lipschitz_constant();
    let report = StabilityReport { epsilon, lipschitz, bound: 0.0, trials, seed, max_distance, pass: false };
    Ok(report.judged_against(lipschitz * epsilon))
}

#[derive(Debug, Clone)]
pub struct SnapshotReport {
    pub t_requested: f64,
    pub t_stage: f64,
    pub stage_index: usize,
    pub quotient: QuotientResult,
    pub core: CoreResult,
    pub complex: SimplicialComplex,
    pub order_betti: Vec<usize>,
    pub crosscut: CrosscutReport,
    /// Crosscut and order-complex Betti numbers differ.
    pub disagreement: bool,
}

pub fn snapshot(d: &DistanceMatrix, cfg: &PipelineConfig, t: f64) -> Result<SnapshotReport> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("snapshot scale must be finite and >= 0, got {t}")));
    }
    let criterion = DensityLink::new(d, cfg.criterion)?;
    let grid = thresholds_of(&criterion);
    let stage_index = grid.index_at(t).expect("grid starts at 0");
    let t_stage = grid.values()[stage_index];
    let n = criterion.len();
    let rel = BitMatrix::from_fn(n, |x, y| x == y || criterion.cost(x, y) <= t_stage);
    let order_cfg = PipelineConfig { mode: ComplexMode::Order, ..*cfg };
    let stage = StageCore::build(close_transitively(&rel), &order_cfg)?;
    let crosscut = crosscut_report(&stage.quotient.poset, cfg, true)?;
    let order_betti = stage.betti();
    let disagreement = crosscut.betti.as_ref().is_some_and(|b| *b != order_betti);
    Ok(SnapshotReport {
        t_requested: t,
        t_stage,
        stage_index,
        quotient: stage.quotient,
        core: stage.core,
        complex: stage.complex,
        order_betti,
        crosscut,
        disagreement,
    })
}
