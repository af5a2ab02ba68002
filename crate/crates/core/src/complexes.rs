//! Order complexes and crosscut complexes of posets, and simplicial vertex maps.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::poset::{face_generators, require_maximal_crosscut, Crosscut, MonotoneMap, Poset};

/// Default cap on the number of simplices in a constructed complex.
pub const DEFAULT_SIMPLEX_CAP: usize = 5_000_000;

/// A face-closed family of simplices on vertices `0..vertex_count`.
///
/// Simplices are ascending vertex lists, grouped by dimension and sorted
/// lexicographically within each dimension. The ascending order is also the
/// orientation used for chains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    by_dim: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl SimplicialComplex {
    /// Build from a list that must already be face-closed and duplicate-free.
    pub fn from_simplices(vertex_count: usize, simplices: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut by_dim: Vec<Vec<Vec<usize>>> = Vec::new();
        for s in simplices {
            if s.is_empty() {
                return Err(Error::InvalidParameter("empty simplex".into()));
            }
            if s.windows(2).any(|w| w[0] >= w[1]) || *s.last().unwrap() >= vertex_count {
                return Err(Error::InvalidParameter(format!("simplex {s:?} is not an ascending list of valid vertices")));
            }
            let d = s.len() - 1;
            if by_dim.len() <= d {
                by_dim.resize(d + 1, Vec::new());
            }
            by_dim[d].push(s);
        }
        let complex = Self::from_parts(vertex_count, by_dim);
        complex.audit()?;
        Ok(complex)
    }

    /// The smallest complex containing the given simplices (all faces added),
    /// truncated above `max_dim` when given.
    pub fn closure_of(
        vertex_count: usize,
        facets: impl IntoIterator<Item = Vec<usize>>,
        max_dim: Option<usize>,
        cap: usize,
    ) -> Result<Self> {
        let mut sets: Vec<BTreeSet<Vec<usize>>> = Vec::new();
        let mut total = 0usize;
        for mut facet in facets {
            facet.sort_unstable();
            facet.dedup();
            if let Some(&v) = facet.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
            }
            let k = facet.len();
            if k == 0 {
                continue;
            }
            let top = max_dim.map_or(k, |d| k.min(d + 1));
            // enumerate subsets by size, skipping sizes above the truncation
            for size in 1..=top {
                for subset in Combinations::new(k, size) {
                    let face: Vec<usize> = subset.iter().map(|&i| facet[i]).collect();
                    if sets.len() < size {
                        sets.resize(size, BTreeSet::new());
                    }
                    if sets[size - 1].insert(face) {
                        total += 1;
                        if total > cap {
                            return Err(Error::ComplexityCapExceeded { cap });
                        }
                    }
                }
            }
        }
        let by_dim = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(Self::from_parts(vertex_count, by_dim))
    }

    fn from_parts(vertex_count: usize, mut by_dim: Vec<Vec<Vec<usize>>>) -> Self {
        while by_dim.last().is_some_and(Vec::is_empty) {
            by_dim.pop();
        }
        for level in &mut by_dim {
            level.sort_unstable();
        }
        let index = by_dim
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        Self { vertex_count, by_dim, index }
    }

    /// Check face closure, duplicates and that every vertex is a 0-simplex.
    pub fn audit(&self) -> Result<()> {
        for (d, level) in self.by_dim.iter().enumerate() {
            if self.index[d].len() != level.len() {
                return Err(Error::InvalidParameter(format!("duplicate simplices in dimension {d}")));
            }
            if d == 0 {
                continue;
            }
            for s in level {
                for skip in 0..s.len() {
                    let face: Vec<usize> = face_without(s, skip);
                    if !self.index[d - 1].contains_key(&face) {
                        return Err(Error::InvalidParameter(format!("face {face:?} of {s:?} is missing")));
                    }
                }
            }
        }
        let vertices = self.by_dim.first().map_or(0, Vec::len);
        if vertices != self.vertex_count {
            return Err(Error::InvalidParameter(format!(
                "{} vertices declared but {vertices} 0-simplices present",
                self.vertex_count
            )));
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Top dimension, or `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    pub fn simplices(&self, dim: usize) -> &[Vec<usize>] {
        self.by_dim.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, dim: usize) -> usize {
        self.simplices(dim).len()
    }

    pub fn total_count(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let d = simplex.len().checked_sub(1)?;
        self.index.get(d)?.get(simplex).copied()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim.iter().enumerate().map(|(d, l)| if d % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) }).sum()
    }

    /// Maximal simplices, sorted by dimension then lexicographically.
    pub fn facets(&self) -> Vec<Vec<usize>> {
        let mut covered: Vec<std::collections::HashSet<&[usize]>> = vec![Default::default(); self.by_dim.len()];
        for d in (1..self.by_dim.len()).rev() {
            for s in &self.by_dim[d] {
                for skip in 0..s.len() {
                    let face = face_without(s, skip);
                    if let Some(&i) = self.index[d - 1].get(&face) {
                        covered[d - 1].insert(self.by_dim[d - 1][i].as_slice());
                    }
                }
            }
        }
        let mut facets = Vec::new();
        for (d, level) in self.by_dim.iter().enumerate() {
            for s in level {
                if !covered[d].contains(s.as_slice()) {
                    facets.push(s.clone());
                }
            }
        }
        facets
    }

    /// One facet per line, vertices separated by spaces.
    pub fn to_facet_list(&self) -> String {
        let mut out = String::new();
        for f in self.facets() {
            let line: Vec<String> = f.iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

pub(crate) fn face_without(s: &[usize], skip: usize) -> Vec<usize> {
    s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect()
}

/// Lexicographic `size`-subsets of `0..n` as index vectors.
struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, size: usize) -> Self {
        let current = if size <= n { Some((0..size).collect()) } else { None };
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let c = self.current.as_mut().unwrap();
        let k = c.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if c[i] < self.n - k + i {
                c[i] += 1;
                for j in (i + 1)..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Chains of `p` with at most `max_dim + 1` elements (all chains when `None`).
pub fn order_complex_skeleton(p: &Poset, max_dim: Option<usize>, cap: usize) -> Result<SimplicialComplex> {
    let m = p.len();
    let max_len = max_dim.map_or(usize::MAX, |d| d + 1);
    let strictly_above: Vec<Vec<usize>> =
        (0..m).map(|x| p.up_set(x).iter().filter(|&y| y != x).collect()).collect();
    let mut by_dim: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut total = 0usize;
    let mut chain: Vec<usize> = Vec::new();

    // depth-first over chains x_0 < x_1 < ... < x_k
    fn extend(
        top: usize,
        chain: &mut Vec<usize>,
        above: &[Vec<usize>],
        max_len: usize,
        by_dim: &mut Vec<Vec<Vec<usize>>>,
        total: &mut usize,
        cap: usize,
    ) -> Result<()> {
        chain.push(top);
        let mut simplex = chain.clone();
        simplex.sort_unstable();
        let d = simplex.len() - 1;
        if by_dim.len() <= d {
            by_dim.resize(d + 1, Vec::new());
        }
        by_dim[d].push(simplex);
        *total += 1;
        if *total > cap {
            return Err(Error::ComplexityCapExceeded { cap });
        }
        if chain.len() < max_len {
            for &next in &above[top] {
                extend(next, chain, above, max_len, by_dim, total, cap)?;
            }
        }
        chain.pop();
        Ok(())
    }

    if max_len > 0 {
        for x in 0..m {
            extend(x, &mut chain, &strictly_above, max_len, &mut by_dim, &mut total, cap)?;
        }
    }
    Ok(SimplicialComplex::from_parts(m, by_dim))
}

/// All nonempty chains of `p`.
pub fn order_complex(p: &Poset, cap: usize) -> Result<SimplicialComplex> {
    order_complex_skeleton(p, None, cap)
}

/// Subsets of the maximal-element crosscut with a common lower bound.
///
/// Vertex `i` of the result is `crosscut.elements[i]`.
pub fn crosscut_complex_skeleton(
    p: &Poset,
    crosscut: &Crosscut,
    max_dim: Option<usize>,
    cap: usize,
) -> Result<SimplicialComplex> {
    require_maximal_crosscut(p, crosscut)?;
    let position: HashMap<usize, usize> = crosscut.elements.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let facets = face_generators(p, crosscut)
        .into_iter()
        .map(|g| g.iter().map(|c| position[c]).collect::<Vec<usize>>())
        .chain((0..crosscut.elements.len()).map(|i| vec![i]));
    SimplicialComplex::closure_of(crosscut.elements.len(), facets, max_dim, cap)
}

pub fn crosscut_complex(p: &Poset, crosscut: &Crosscut, cap: usize) -> Result<SimplicialComplex> {
    crosscut_complex_skeleton(p, crosscut, None, cap)
}

/// A vertex assignment sending simplices of one complex to simplices of another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialVertexMap {
    assignment: Vec<usize>,
    target_vertices: usize,
}

impl SimplicialVertexMap {
    /// Validate the simplicial condition against explicit complexes.
    pub fn new(source: &SimplicialComplex, target: &SimplicialComplex, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != source.vertex_count() {
            return Err(Error::SizeMismatch { left: source.vertex_count(), right: assignment.len() });
        }
        let map = Self { assignment, target_vertices: target.vertex_count() };
        for d in 0..=source.dimension().unwrap_or(0) {
            for s in source.simplices(d) {
                let image = map.image(s);
                if target.index_of(&image).is_none() {
                    return Err(Error::InvalidParameter(format!("image {image:?} of {s:?} is not a simplex")));
                }
            }
        }
        Ok(map)
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn target_vertices(&self) -> usize {
        self.target_vertices
    }

    /// Sorted, deduplicated image vertex set.
    pub fn image(&self, simplex: &[usize]) -> Vec<usize> {
        let mut img: Vec<usize> = simplex.iter().map(|&v| self.assignment[v]).collect();
        img.sort_unstable();
        img.dedup();
        img
    }

    /// Number of simplices of `source` whose image has lower dimension.
    pub fn degenerate_count(&self, source: &SimplicialComplex) -> usize {
        (1..=source.dimension().unwrap_or(0))
            .flat_map(|d| source.simplices(d))
            .filter(|s| self.image(s).len() < s.len())
            .count()
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &SimplicialVertexMap) -> SimplicialVertexMap {
        SimplicialVertexMap {
            assignment: self.assignment.iter().map(|&v| next.assignment[v]).collect(),
            target_vertices: next.target_vertices,
        }
    }
}

/// Monotone maps send chains to chains, so the vertex assignment is simplicial
/// between order complexes as is.
pub fn vertex_map_of_monotone(f: &MonotoneMap) -> SimplicialVertexMap {
    SimplicialVertexMap { assignment: f.assignment().to_vec(), target_vertices: f.target_len() }
}
