//! Persistence modules over a threshold grid, their rank invariant, and
//! barcodes read off by inclusion–exclusion.
//!
//! Runs of consecutive identity maps are common (most grid steps leave the
//! stage unchanged), so ranks are computed on blocks of indices joined by
//! identities. Ranks are constant on each block, so multiplicities can only
//! be nonzero for intervals starting at a block start and ending at a block
//! end.

mod bottleneck;
mod interleaving;
mod io;

pub use bottleneck::bottleneck;
pub use interleaving::{interleaving_witness, InterleavingReport, SquareViolation};
pub use io::{diagrams_from_csv, diagrams_from_json};

use rayon::prelude::*;

use crate::criteria::ThresholdGrid;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceModule {
    grid: ThresholdGrid,
    dims: Vec<usize>,
    maps: Vec<Matrix>,
    field: FieldSpec,
}

impl PersistenceModule {
    pub fn new(grid: ThresholdGrid, dims: Vec<usize>, maps: Vec<Matrix>, field: FieldSpec) -> Result<Self> {
        if dims.len() != grid.len() {
            return Err(Error::SizeMismatch { left: grid.len(), right: dims.len() });
        }
        if maps.len() + 1 != dims.len() {
            return Err(Error::SizeMismatch { left: dims.len() - 1, right: maps.len() });
        }
        for (i, m) in maps.iter().enumerate() {
            if m.rows() != dims[i + 1] || m.cols() != dims[i] || m.field() != field {
                return Err(Error::InvalidParameter(format!(
                    "map {i} is {}x{} over F_{}, expected {}x{} over F_{}",
                    m.rows(),
                    m.cols(),
                    m.field().prime(),
                    dims[i + 1],
                    dims[i],
                    field.prime()
                )));
            }
        }
        Ok(Self { grid, dims, maps, field })
    }

    pub fn grid(&self) -> &ThresholdGrid {
        &self.grid
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[Matrix] {
        &self.maps
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// `M_{j-1} · ... · M_i`, the structure map from index `i` to `j`.
    pub fn composite(&self, i: usize, j: usize) -> Matrix {
        assert!(i <= j && j < self.dims.len(), "bad index pair ({i}, {j})");
        self.maps[i..j].iter().fold(Matrix::identity(self.dims[i], self.field), |acc, m| m.mul(&acc))
    }
}

/// Rank invariant stored per block of identity-joined indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFunction {
    block_of: Vec<usize>,
    /// Inclusive index range of each block.
    blocks: Vec<(usize, usize)>,
    /// `ranks[a][b - a]` for blocks `a <= b`.
    ranks: Vec<Vec<usize>>,
}

impl RankFunction {
    /// Last grid index `m`.
    pub fn last_index(&self) -> usize {
        self.block_of.len() - 1
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    pub fn block_rank(&self, a: usize, b: usize) -> usize {
        self.ranks[a][b - a]
    }

    /// `r(i, j)` for `i <= j`.
    pub fn get(&self, i: usize, j: usize) -> usize {
        assert!(i <= j, "rank function is only defined for i <= j");
        self.block_rank(self.block_of[i], self.block_of[j])
    }
}

pub fn rank_function(module: &PersistenceModule) -> RankFunction {
    let n = module.dims.len();
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut block_of = vec![0; n];
    for i in 0..n {
        let joined = i > 0 && module.maps[i - 1].is_identity();
        if joined {
            blocks.last_mut().unwrap().1 = i;
        } else {
            blocks.push((i, i));
        }
        block_of[i] = blocks.len() - 1;
    }
    // the map leaving block b is the one after its last index
    let exits: Vec<&Matrix> = blocks[..blocks.len() - 1].iter().map(|&(_, end)| &module.maps[end]).collect();
    let ranks = (0..blocks.len())
        .into_par_iter()
        .map(|a| {
            let dim = module.dims[blocks[a].0];
            let mut row = vec![0; blocks.len() - a];
            row[0] = dim;
            let mut image = Matrix::identity(dim, module.field);
            for b in a + 1..blocks.len() {
                image = exits[b - 1].mul(&image).column_basis();
                row[b - a] = image.cols();
                if image.cols() == 0 {
                    break;
                }
            }
            row
        })
        .collect();
    RankFunction { block_of, blocks, ranks }
}

/// Index interval `[start, end]` with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexInterval {
    pub start: usize,
    pub end: usize,
    pub mult: usize,
}

pub fn interval_multiplicities(r: &RankFunction) -> Result<Vec<IndexInterval>> {
    let nb = r.blocks.len();
    let rank = |a: isize, b: usize| -> i64 {
        if a < 0 || b >= nb {
            0
        } else {
            r.block_rank(a as usize, b) as i64
        }
    };
    let mut out = Vec::new();
    for a in 0..nb {
        for b in a..nb {
            let ai = a as isize;
            let mu = rank(ai, b) - rank(ai - 1, b) - rank(ai, b + 1) + rank(ai - 1, b + 1);
            let (i, j) = (r.blocks[a].0, r.blocks[b].1);
            if mu < 0 {
                return Err(Error::NegativeMultiplicity { i, j, value: mu });
            }
            if mu > 0 {
                out.push(IndexInterval { start: i, end: j, mult: mu as usize });
            }
        }
    }
    Ok(out)
}

/// `Σ μ[i', j']` over intervals containing `[i, j]`.
pub fn reconstructed_rank(intervals: &[IndexInterval], i: usize, j: usize) -> usize {
    intervals.iter().filter(|iv| iv.start <= i && j <= iv.end).map(|iv| iv.mult).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramPoint {
    pub birth: f64,
    /// `None` is +∞.
    pub death: Option<f64>,
    pub mult: usize,
}

impl DiagramPoint {
    fn sort_key(&self) -> (f64, f64) {
        (self.birth, self.death.unwrap_or(f64::INFINITY))
    }
}

/// Multiset of points in one homology degree, sorted with repeated points merged.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagram {
    points: Vec<DiagramPoint>,
}

impl Diagram {
    pub fn new(points: impl IntoIterator<Item = DiagramPoint>) -> Result<Self> {
        let mut points: Vec<DiagramPoint> = points.into_iter().filter(|p| p.mult > 0).collect();
        for p in &points {
            let bad_death = p.death.is_some_and(|d| !(d > p.birth) || !d.is_finite());
            if !p.birth.is_finite() || bad_death {
                return Err(Error::InvalidParameter(format!("invalid diagram point ({}, {:?})", p.birth, p.death)));
            }
        }
        points.sort_by(|a, b| a.sort_key().partial_cmp(&b.sort_key()).unwrap());
        let mut merged: Vec<DiagramPoint> = Vec::with_capacity(points.len());
        for p in points {
            match merged.last_mut() {
                Some(last) if last.birth == p.birth && last.death == p.death => last.mult += p.mult,
                _ => merged.push(p),
            }
        }
        Ok(Self { points: merged })
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points counted with multiplicity.
    pub fn total(&self) -> usize {
        self.points.iter().map(|p| p.mult).sum()
    }

    pub fn infinite_count(&self) -> usize {
        self.points.iter().filter(|p| p.death.is_none()).map(|p| p.mult).sum()
    }

    /// Finite deaths repeated by multiplicity, ascending.
    pub fn finite_deaths(&self) -> Vec<f64> {
        let mut out: Vec<f64> =
            self.points.iter().filter_map(|p| p.death.map(|d| std::iter::repeat_n(d, p.mult))).flatten().collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

pub fn to_diagram(intervals: &[IndexInterval], grid: &ThresholdGrid) -> Diagram {
    let t = grid.values();
    let m = grid.last_index();
    let points = intervals.iter().map(|iv| DiagramPoint {
        birth: t[iv.start],
        death: (iv.end < m).then(|| t[iv.end + 1]),
        mult: iv.mult,
    });
    Diagram::new(points).expect("grid values are strictly increasing")
}

/// Diagrams in degrees `0..=max_degree` over one field.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub field: FieldSpec,
    pub degrees: Vec<Diagram>,
}

impl PersistenceDiagram {
    pub fn degree(&self, n: usize) -> Option<&Diagram> {
        self.degrees.get(n)
    }
}

pub fn diagram_of_module(module: &PersistenceModule) -> Result<Diagram> {
    let intervals = interval_multiplicities(&rank_function(module))?;
    Ok(to_diagram(&intervals, module.grid()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::new(2).unwrap()
    }

    fn grid(m: usize) -> ThresholdGrid {
        ThresholdGrid::new((0..=m).map(|i| i as f64).collect()).unwrap()
    }

    fn module(dims: Vec<usize>, maps: Vec<Matrix>) -> PersistenceModule {
        PersistenceModule::new(grid(dims.len() - 1), dims, maps, f2()).unwrap()
    }

    fn id_then_zero() -> PersistenceModule {
        module(vec![1, 1, 1], vec![Matrix::identity(1, f2()), Matrix::zeros(1, 1, f2())])
    }

    #[test]
    fn rank_examples() {
        let r = rank_function(&id_then_zero());
        assert_eq!((r.get(0, 1), r.get(1, 2), r.get(0, 2)), (1, 0, 0));
        assert_eq!((r.get(0, 0), r.get(1, 1), r.get(2, 2)), (1, 1, 1));

        let ids = module(vec![2; 4], vec![Matrix::identity(2, f2()); 3]);
        let r = rank_function(&ids);
        for i in 0..4 {
            for j in i..4 {
                assert_eq!(r.get(i, j), 2);
            }
        }

        let zeros = module(vec![2; 3], vec![Matrix::zeros(2, 2, f2()); 2]);
        let r = rank_function(&zeros);
        assert_eq!((r.get(0, 1), r.get(0, 2), r.get(1, 2)), (0, 0, 0));
    }

    #[test]
    fn multiplicity_examples() {
        let mu = interval_multiplicities(&rank_function(&id_then_zero())).unwrap();
        assert_eq!(mu, vec![IndexInterval { start: 0, end: 1, mult: 1 }, IndexInterval { start: 2, end: 2, mult: 1 }]);

        let ids = module(vec![1; 4], vec![Matrix::identity(1, f2()); 3]);
        assert_eq!(interval_multiplicities(&rank_function(&ids)).unwrap(), vec![IndexInterval { start: 0, end: 3, mult: 1 }]);

        let zeros = module(vec![2, 2], vec![Matrix::zeros(2, 2, f2())]);
        assert_eq!(
            interval_multiplicities(&rank_function(&zeros)).unwrap(),
            vec![IndexInterval { start: 0, end: 0, mult: 2 }, IndexInterval { start: 1, end: 1, mult: 2 }]
        );
    }

    #[test]
    fn diagram_examples() {
        let g = ThresholdGrid::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let ivs = [
            IndexInterval { start: 0, end: 0, mult: 1 },
            IndexInterval { start: 0, end: 1, mult: 1 },
            IndexInterval { start: 0, end: 3, mult: 1 },
        ];
        let d = to_diagram(&ivs, &g);
        let pts: Vec<(f64, Option<f64>)> = d.points().iter().map(|p| (p.birth, p.death)).collect();
        assert_eq!(pts, vec![(0.0, Some(1.0)), (0.0, Some(2.0)), (0.0, None)]);
        assert!(to_diagram(&[], &g).is_empty());
        assert_eq!(d.infinite_count(), 1);
        assert_eq!(d.finite_deaths(), vec![1.0, 2.0]);
    }

    #[test]
    fn composite_is_product() {
        let f3 = FieldSpec::new(3).unwrap();
        let a = Matrix::from_rows(&[vec![1, 2], vec![0, 1], vec![1, 1]], 2, f3);
        let b = Matrix::from_rows(&[vec![1, 0, 2], vec![2, 1, 1]], 3, f3);
        let m = PersistenceModule::new(grid(2), vec![2, 3, 2], vec![a.clone(), b.clone()], f3).unwrap();
        assert_eq!(m.composite(0, 2), b.mul(&a));
        assert!(m.composite(1, 1).is_identity());
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let err = PersistenceModule::new(grid(1), vec![1, 2], vec![Matrix::zeros(1, 1, f2())], f2());
        assert!(err.is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn random_module() -> impl Strategy<Value = PersistenceModule> {
            let p = prop::sample::select(vec![2u32, 3, 5]);
            (p, prop::collection::vec(0usize..4, 1..7)).prop_flat_map(|(p, dims)| {
                let field = FieldSpec::new(p).unwrap();
                let shapes: Vec<(usize, usize)> = dims.windows(2).map(|w| (w[1], w[0])).collect();
                let maps = shapes
                    .into_iter()
                    .map(move |(r, c)| {
                        // bias towards identities so blocks get exercised
                        let ident = if r == c { Just(true).boxed() } else { Just(false).boxed() };
                        (ident, prop::bool::ANY, prop::collection::vec(0..p, r * c)).prop_map(move |(sq, use_id, vals)| {
                            if sq && use_id {
                                Matrix::identity(r, field)
                            } else {
                                let rows: Vec<Vec<u32>> = (0..r).map(|i| vals[i * c..(i + 1) * c].to_vec()).collect();
                                Matrix::from_rows(&rows, c, field)
                            }
                        })
                    })
                    .collect::<Vec<_>>();
                let n = dims.len();
                (Just(dims), maps).prop_map(move |(dims, maps)| {
                    PersistenceModule::new(
                        ThresholdGrid::new((0..n).map(|i| i as f64 * 0.5).collect()).unwrap(),
                        dims,
                        maps,
                        field,
                    )
                    .unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn ranks_match_direct_products(m in random_module()) {
                let r = rank_function(&m);
                let n = m.dims().len();
                for i in 0..n {
                    for j in i..n {
                        prop_assert_eq!(r.get(i, j), m.composite(i, j).rank());
                    }
                }
            }

            #[test]
            fn decomposition_reconstructs_ranks(m in random_module()) {
                let r = rank_function(&m);
                let mu = interval_multiplicities(&r).unwrap();
                let n = m.dims().len();
                for i in 0..n {
                    for j in i..n {
                        prop_assert_eq!(reconstructed_rank(&mu, i, j), r.get(i, j));
                    }
                }
            }
        }
    }
}
