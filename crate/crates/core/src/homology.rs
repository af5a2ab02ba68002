//! Simplicial homology over `F_p` and maps induced by simplicial vertex maps.
//!
//! Boundary matrices are reduced column by column (sparse columns keyed by
//! their lowest nonzero row). A reduction `R = D V` of `D_n` yields a basis
//! of `n`-cycles `{V_j : R_j = 0}` with distinct lows `j`; the nonzero
//! columns of the reduced `D_{n+1}` form a basis of `n`-boundaries with
//! distinct lows, all of them among those `j`. The remaining cycles are the
//! homology representatives, and the union is a triangular basis of the
//! cycle space, so any cycle can be written in it by back-substitution.

use crate::complexes::{face_without, SimplicialComplex, SimplicialVertexMap};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Matrix};

/// Sparse chain: `(simplex index, nonzero coefficient)` sorted by index.
pub type Chain = Vec<(usize, u32)>;

fn low(c: &Chain) -> Option<usize> {
    c.last().map(|&(i, _)| i)
}

/// `a - factor * b`.
fn sub_scaled(f: &FieldSpec, a: &Chain, factor: u32, b: &Chain) -> Chain {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i]);
            i += 1;
        } else if take_b {
            out.push((b[j].0, f.neg(f.mul(factor, b[j].1))));
            j += 1;
        } else {
            let v = f.sub(a[i].1, f.mul(factor, b[j].1));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Accumulate `(index, coefficient)` terms into a sorted chain.
fn collect_chain(f: &FieldSpec, mut terms: Vec<(usize, u32)>) -> Chain {
    terms.sort_unstable_by_key(|&(i, _)| i);
    let mut out: Chain = Vec::with_capacity(terms.len());
    for (i, v) in terms {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 = f.add(last.1, v),
            _ => out.push((i, v)),
        }
    }
    out.retain(|&(_, v)| v != 0);
    out
}

/// Boundary matrices of a simplicial complex, stored by column.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    field: FieldSpec,
    counts: Vec<usize>,
    /// `boundaries[n][j]` = boundary of the `j`-th `n`-simplex; empty for `n = 0`.
    boundaries: Vec<Vec<Chain>>,
}

/// Boundary of an ascending simplex: alternating sum of its facets.
fn simplex_boundary(k: &SimplicialComplex, f: &FieldSpec, s: &[usize]) -> Chain {
    if s.len() < 2 {
        return Vec::new();
    }
    let terms = (0..s.len())
        .map(|skip| {
            let face = face_without(s, skip);
            let idx = k.index_of(&face).expect("complex is face-closed");
            (idx, f.sign(skip % 2 == 1))
        })
        .collect();
    collect_chain(f, terms)
}

pub fn build_chain_complex(k: &SimplicialComplex, field: FieldSpec) -> ChainComplex {
    let top = k.dimension().map_or(0, |d| d + 1);
    let counts: Vec<usize> = (0..top).map(|d| k.count(d)).collect();
    let boundaries = (0..top).map(|d| k.simplices(d).iter().map(|s| simplex_boundary(k, &field, s)).collect()).collect();
    let cc = ChainComplex { field, counts, boundaries };
    assert!(cc.boundary_squares_to_zero(), "boundary of a boundary must vanish");
    cc
}

impl ChainComplex {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn count(&self, dim: usize) -> usize {
        self.counts.get(dim).copied().unwrap_or(0)
    }

    pub fn top_dimension(&self) -> Option<usize> {
        self.counts.len().checked_sub(1)
    }

    pub fn boundary(&self, dim: usize) -> &[Chain] {
        self.boundaries.get(dim).map_or(&[], Vec::as_slice)
    }

    /// Dense copy of `D_dim` (rows = `(dim-1)`-simplices).
    pub fn boundary_matrix(&self, dim: usize) -> Matrix {
        let rows = if dim == 0 { 0 } else { self.count(dim - 1) };
        let mut m = Matrix::zeros(rows, self.count(dim), self.field);
        for (j, col) in self.boundary(dim).iter().enumerate() {
            for &(i, v) in col {
                m.set(i, j, v);
            }
        }
        m
    }

    /// `D_{n} ∘ D_{n+1} = 0` for every `n`.
    pub fn boundary_squares_to_zero(&self) -> bool {
        let f = &self.field;
        (2..self.boundaries.len()).all(|n| {
            self.boundaries[n].iter().all(|col| {
                let terms = col
                    .iter()
                    .flat_map(|&(i, a)| self.boundaries[n - 1][i].iter().map(move |&(r, b)| (r, f.mul(a, b))))
                    .collect();
                collect_chain(f, terms).is_empty()
            })
        })
    }
}

struct Reduction {
    /// Nonzero reduced columns (boundary basis of dimension `dim - 1`), distinct lows.
    reduced: Vec<Chain>,
    /// Cycles `V_j` for columns with `R_j = 0`; `low(V_j) = j`.
    cycles: Vec<Chain>,
}

fn reduce(cc: &ChainComplex, dim: usize, track_cycles: bool) -> Reduction {
    let f = &cc.field;
    if dim == 0 {
        let cycles = if track_cycles { (0..cc.count(0)).map(|j| vec![(j, 1)]).collect() } else { Vec::new() };
        return Reduction { reduced: Vec::new(), cycles };
    }
    let rows = cc.count(dim - 1);
    let mut owner: Vec<Option<usize>> = vec![None; rows];
    let mut r_cols: Vec<Chain> = Vec::with_capacity(cc.count(dim));
    let mut v_cols: Vec<Chain> = Vec::with_capacity(if track_cycles { cc.count(dim) } else { 0 });
    let mut cycles = Vec::new();
    for (j, col) in cc.boundary(dim).iter().enumerate() {
        let mut r = col.clone();
        let mut v: Chain = if track_cycles { vec![(j, 1)] } else { Vec::new() };
        while let Some(l) = low(&r) {
            let Some(other) = owner[l] else { break };
            let factor = f.mul(r.last().unwrap().1, f.inv(r_cols[other].last().unwrap().1));
            r = sub_scaled(f, &r, factor, &r_cols[other]);
            if track_cycles {
                v = sub_scaled(f, &v, factor, &v_cols[other]);
            }
        }
        if let Some(l) = low(&r) {
            owner[l] = Some(j);
        } else if track_cycles {
            cycles.push(v.clone());
        }
        r_cols.push(r);
        if track_cycles {
            v_cols.push(v);
        }
    }
    let reduced = r_cols.into_iter().filter(|c| !c.is_empty()).collect();
    Reduction { reduced, cycles }
}

#[derive(Debug, Clone)]
enum PivotKind {
    Boundary,
    Class(usize),
}

#[derive(Debug, Clone)]
struct DegreeBasis {
    reps: Vec<Chain>,
    /// Indexed by low: the basis vector of the cycle space with that low.
    pivots: Vec<Option<(PivotKind, Chain)>>,
}

/// Homology bases in degrees `0..=max_dim`.
#[derive(Debug, Clone)]
pub struct HomologyBasis {
    field: FieldSpec,
    degrees: Vec<DegreeBasis>,
}

pub fn homology_basis(cc: &ChainComplex, max_dim: usize) -> HomologyBasis {
    let mut degrees = Vec::with_capacity(max_dim + 1);
    let mut cycles = reduce(cc, 0, true).cycles;
    for n in 0..=max_dim {
        let next = reduce(cc, n + 1, n < max_dim);
        let mut pivots: Vec<Option<(PivotKind, Chain)>> = vec![None; cc.count(n)];
        for b in next.reduced {
            let l = low(&b).unwrap();
            debug_assert!(pivots[l].is_none());
            pivots[l] = Some((PivotKind::Boundary, b));
        }
        let mut reps = Vec::new();
        for z in cycles {
            let l = low(&z).expect("cycle basis vectors are nonzero");
            if pivots[l].is_none() {
                pivots[l] = Some((PivotKind::Class(reps.len()), z.clone()));
                reps.push(z);
            }
        }
        degrees.push(DegreeBasis { reps, pivots });
        cycles = next.cycles;
    }
    HomologyBasis { field: cc.field, degrees }
}

impl HomologyBasis {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn max_dim(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.reps.len()).collect()
    }

    pub fn betti_at(&self, dim: usize) -> usize {
        self.degrees.get(dim).map_or(0, |d| d.reps.len())
    }

    /// Cycle representatives of the homology classes in degree `dim`.
    pub fn representatives(&self, dim: usize) -> &[Chain] {
        self.degrees.get(dim).map_or(&[], |d| d.reps.as_slice())
    }

    /// Coordinates of a cycle's class in the representative basis, or `None`
    /// if `chain` is not a cycle.
    pub fn express(&self, dim: usize, chain: &Chain) -> Option<Vec<u32>> {
        let f = &self.field;
        let basis = &self.degrees[dim];
        let mut coords = vec![0u32; basis.reps.len()];
        let mut v = chain.clone();
        while let Some(l) = low(&v) {
            let (kind, pivot) = basis.pivots.get(l)?.as_ref()?;
            let factor = f.mul(v.last().unwrap().1, f.inv(pivot.last().unwrap().1));
            if let PivotKind::Class(i) = kind {
                coords[*i] = f.add(coords[*i], factor);
            }
            v = sub_scaled(f, &v, factor, pivot);
        }
        Some(coords)
    }
}

/// Image of an oriented simplex: `(target index, sign)` or `None` when degenerate.
fn push_simplex(map: &SimplicialVertexMap, target: &SimplicialComplex, f: &FieldSpec, s: &[usize]) -> Result<Option<(usize, u32)>> {
    let mut image: Vec<usize> = s.iter().map(|&v| map.assignment()[v]).collect();
    // insertion sort while counting transpositions
    let mut swaps = 0usize;
    for i in 1..image.len() {
        let mut j = i;
        while j > 0 && image[j - 1] > image[j] {
            image.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    if image.windows(2).any(|w| w[0] == w[1]) {
        return Ok(None);
    }
    let idx = target
        .index_of(&image)
        .ok_or_else(|| Error::InvalidParameter(format!("image {image:?} of {s:?} is not a simplex of the target")))?;
    Ok(Some((idx, f.sign(swaps % 2 == 1))))
}

fn push_chain(map: &SimplicialVertexMap, source: &SimplicialComplex, target: &SimplicialComplex, f: &FieldSpec, dim: usize, chain: &Chain) -> Result<Chain> {
    let simplices = source.simplices(dim);
    let mut terms = Vec::with_capacity(chain.len());
    for &(i, c) in chain {
        if let Some((j, sign)) = push_simplex(map, target, f, &simplices[i])? {
            terms.push((j, f.mul(c, sign)));
        }
    }
    Ok(collect_chain(f, terms))
}

/// Check `D^dst · f_n = f_{n-1} · D^src` on every simplex of dimension `1..=top`.
pub fn check_chain_map(map: &SimplicialVertexMap, source: &SimplicialComplex, target: &SimplicialComplex, field: FieldSpec, top: usize) -> Result<()> {
    let f = &field;
    for n in 1..=top.min(source.dimension().unwrap_or(0)) {
        for s in source.simplices(n) {
            let pushed_boundary = push_chain(map, source, target, f, n - 1, &simplex_boundary(source, f, s))?;
            let boundary_pushed = match push_simplex(map, target, f, s)? {
                None => Vec::new(),
                Some((j, sign)) => {
                    let b = simplex_boundary(target, f, &target.simplices(n)[j]);
                    b.into_iter().map(|(r, v)| (r, f.mul(v, sign))).collect()
                }
            };
            if pushed_boundary != boundary_pushed {
                return Err(Error::ChainMapNotCommuting { degree: n });
            }
        }
    }
    Ok(())
}

/// Matrices of the induced maps on homology, one per degree.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedMatrix {
    pub degrees: Vec<Matrix>,
}

impl InducedMatrix {
    pub fn identity(betti: &[usize], field: FieldSpec) -> Self {
        Self { degrees: betti.iter().map(|&b| Matrix::identity(b, field)).collect() }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &InducedMatrix) -> InducedMatrix {
        InducedMatrix { degrees: self.degrees.iter().zip(&next.degrees).map(|(a, b)| b.mul(a)).collect() }
    }
}

pub fn induced_matrix(
    map: &SimplicialVertexMap,
    source: (&SimplicialComplex, &HomologyBasis),
    target: (&SimplicialComplex, &HomologyBasis),
) -> Result<InducedMatrix> {
    let (src_k, src_h) = source;
    let (dst_k, dst_h) = target;
    let field = src_h.field;
    if dst_h.field != field {
        return Err(Error::InvalidParameter("homology bases over different fields".into()));
    }
    let max_dim = src_h.max_dim().min(dst_h.max_dim());
    check_chain_map(map, src_k, dst_k, field, max_dim + 1)?;
    let mut degrees = Vec::with_capacity(max_dim + 1);
    for n in 0..=max_dim {
        let mut m = Matrix::zeros(dst_h.betti_at(n), src_h.betti_at(n), field);
        for (col, rep) in src_h.representatives(n).iter().enumerate() {
            let image = push_chain(map, src_k, dst_k, &field, n, rep)?;
            let coords = dst_h.express(n, &image).ok_or(Error::ChainMapNotCommuting { degree: n })?;
            for (row, v) in coords.into_iter().enumerate() {
                m.set(row, col, v);
            }
        }
        degrees.push(m);
    }
    Ok(InducedMatrix { degrees })
}

/// Largest complex accepted by [`naive_betti_oracle`].
pub const ORACLE_CAP: usize = 1 << 12;

/// Betti numbers in every dimension of `k` by dense elimination of each
/// boundary matrix, built directly from the simplex lists.
pub fn naive_betti_oracle(k: &SimplicialComplex, field: FieldSpec) -> Result<Vec<usize>> {
    let count = k.total_count();
    if count > ORACLE_CAP {
        return Err(Error::OracleCapExceeded { cap: ORACLE_CAP, count });
    }
    let top = match k.dimension() {
        Some(d) => d,
        None => return Ok(Vec::new()),
    };
    let p = field.prime() as u64;
    let rank_of = |dim: usize| -> usize {
        if dim == 0 || dim > top {
            return 0;
        }
        let rows_list = k.simplices(dim - 1);
        let cols_list = k.simplices(dim);
        let mut dense = vec![vec![0u64; cols_list.len()]; rows_list.len()];
        for (c, s) in cols_list.iter().enumerate() {
            for skip in 0..s.len() {
                let face: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                let r = rows_list.iter().position(|t| *t == face).expect("face present");
                dense[r][c] = if skip % 2 == 0 { 1 } else { p - 1 };
            }
        }
        let mut rank = 0;
        let ncols = cols_list.len();
        for c in 0..ncols {
            let Some(pr) = (rank..dense.len()).find(|&r| dense[r][c] != 0) else { continue };
            dense.swap(rank, pr);
            let inv = (1..p).find(|x| x * dense[rank][c] % p == 1).unwrap();
            for r in 0..dense.len() {
                if r != rank && dense[r][c] != 0 {
                    let factor = dense[r][c] * inv % p;
                    for cc in 0..ncols {
                        dense[r][cc] = (dense[r][cc] + p * p - factor * dense[rank][cc] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    };
    let ranks: Vec<usize> = (0..=top + 1).map(rank_of).collect();
    Ok((0..=top).map(|d| k.count(d) - ranks[d] - ranks[d + 1]).collect())
}
