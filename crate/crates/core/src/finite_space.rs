//! Finite topologies, their specialization preorders, and T0 quotients.
//!
//! A finite topology is recorded by its minimal open sets `U_x`; `x <= y`
//! iff `x ∈ U_y`. Explicit topologies (families of open sets) are only used
//! at small sizes; the pipeline works on relations.

use crate::bits::{BitMatrix, BitSet};
use crate::error::{Error, Result};
use crate::poset::{MonotoneMap, Poset};

/// Largest point count for which open sets are enumerated explicitly.
pub const MAX_EXPLICIT_POINTS: usize = 16;

/// A topology on `{0..n}` given by its open sets as bit masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTopology {
    n: usize,
    opens: Vec<u32>,
}

impl FiniteTopology {
    pub fn new(n: usize, opens: impl IntoIterator<Item = u32>) -> Result<Self> {
        if n > MAX_EXPLICIT_POINTS {
            return Err(Error::InvalidParameter(format!("explicit topologies support at most {MAX_EXPLICIT_POINTS} points")));
        }
        let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut opens: Vec<u32> = opens.into_iter().collect();
        opens.sort_unstable();
        opens.dedup();
        if let Some(&bad) = opens.iter().find(|&&o| o & !full != 0) {
            return Err(Error::NotATopology(format!("open set {bad:#b} has points outside 0..{n}")));
        }
        if opens.binary_search(&0).is_err() {
            return Err(Error::NotATopology("missing the empty set".into()));
        }
        if opens.binary_search(&full).is_err() {
            return Err(Error::NotATopology("missing the whole space".into()));
        }
        for &a in &opens {
            for &b in &opens {
                if opens.binary_search(&(a | b)).is_err() {
                    return Err(Error::NotATopology(format!("union of {a:#b} and {b:#b} is not open")));
                }
                if opens.binary_search(&(a & b)).is_err() {
                    return Err(Error::NotATopology(format!("intersection of {a:#b} and {b:#b} is not open")));
                }
            }
        }
        Ok(Self { n, opens })
    }

    pub fn discrete(n: usize) -> Self {
        Self::new(n, 0..(1u32 << n)).expect("power set is a topology")
    }

    pub fn indiscrete(n: usize) -> Self {
        Self::new(n, [0, (1u32 << n) - 1]).expect("indiscrete topology")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn opens(&self) -> &[u32] {
        &self.opens
    }

    pub fn is_open(&self, set: u32) -> bool {
        self.opens.binary_search(&set).is_ok()
    }
}

/// `U_x`: the intersection of all open sets containing `x`, as a bit mask.
pub fn minimal_open(topology: &FiniteTopology, x: usize) -> u32 {
    let bit = 1u32 << x;
    topology.opens.iter().filter(|&&o| o & bit != 0).fold(u32::MAX, |acc, &o| acc & o)
}

/// Reflexive, transitive relation; `leq(x, y)` means `x <= y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Preorder {
    rel: BitMatrix,
}

impl Preorder {
    pub fn new(rel: BitMatrix) -> Result<Self> {
        let n = rel.size();
        if let Some(x) = (0..n).find(|&x| !rel.get(x, x)) {
            return Err(Error::InvalidParameter(format!("relation is not reflexive at {x}")));
        }
        for x in 0..n {
            for y in rel.row(x).iter() {
                if !rel.row(y).is_subset(rel.row(x)) {
                    return Err(Error::InvalidParameter(format!("relation is not transitive through ({x},{y})")));
                }
            }
        }
        Ok(Self { rel })
    }

    pub fn len(&self) -> usize {
        self.rel.size()
    }

    pub fn is_empty(&self) -> bool {
        self.rel.size() == 0
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.rel.get(x, y)
    }

    pub fn relation(&self) -> &BitMatrix {
        &self.rel
    }

    /// Points `y` with `x <= y`.
    pub fn up_set(&self, x: usize) -> &BitSet {
        self.rel.row(x)
    }
}

pub fn preorder_of_topology(topology: &FiniteTopology) -> Result<Preorder> {
    // re-validate: the fields are private but topologies may be hand-built in tests
    let topology = FiniteTopology::new(topology.n, topology.opens.iter().copied())?;
    let n = topology.n;
    let minimal: Vec<u32> = (0..n).map(|y| minimal_open(&topology, y)).collect();
    Ok(Preorder { rel: BitMatrix::from_fn(n, |x, y| minimal[y] >> x & 1 == 1) })
}

/// The Alexandrov topology whose minimal basis is `U_x = { y : y <= x }`.
pub fn topology_of_preorder(preorder: &Preorder) -> Result<FiniteTopology> {
    let n = preorder.len();
    if n > MAX_EXPLICIT_POINTS {
        return Err(Error::InvalidParameter(format!("explicit topologies support at most {MAX_EXPLICIT_POINTS} points")));
    }
    let basis: Vec<u32> =
        (0..n).map(|x| (0..n).filter(|&y| preorder.leq(y, x)).fold(0u32, |acc, y| acc | 1 << y)).collect();
    let mut opens = vec![0u32];
    for b in basis {
        let extended: Vec<u32> = opens.iter().map(|&o| o | b).collect();
        opens.extend(extended);
        opens.sort_unstable();
        opens.dedup();
    }
    FiniteTopology::new(n, opens)
}

/// Smallest preorder containing `rel`.
pub fn close_transitively(rel: &BitMatrix) -> Preorder {
    let n = rel.size();
    let mut closed = rel.clone();
    for x in 0..n {
        closed.set(x, x);
    }
    for k in 0..n {
        for i in 0..n {
            if i != k && closed.get(i, k) {
                closed.union_rows(i, k);
            }
        }
    }
    Preorder { rel: closed }
}

/// Strongly connected components of the digraph `x -> y` iff `rel(x, y)`,
/// numbered by their smallest member.
pub fn strongly_connected_components(rel: &BitMatrix) -> Vec<usize> {
    let n = rel.size();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut lowlink = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut raw_comp = vec![UNSEEN; n];
    let mut comp_count = 0;
    let mut counter = 0;
    let successors: Vec<Vec<usize>> = (0..n).map(|x| rel.row(x).iter().collect()).collect();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (vertex, next successor position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        lowlink[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = successors[v].get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    lowlink[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        raw_comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }

    // renumber by smallest member
    let mut renumber = vec![UNSEEN; comp_count];
    let mut next = 0;
    for x in 0..n {
        let c = raw_comp[x];
        if renumber[c] == UNSEEN {
            renumber[c] = next;
            next += 1;
        }
    }
    raw_comp.iter().map(|&c| renumber[c]).collect()
}

/// The T0 quotient `X/~` and the projection onto it.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientResult {
    pub poset: Poset,
    pub projection: Vec<usize>,
}

pub fn t0_quotient(preorder: &Preorder) -> QuotientResult {
    let n = preorder.len();
    let projection = strongly_connected_components(&preorder.rel);
    let m = projection.iter().map(|&c| c + 1).max().unwrap_or(0);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); m];
    for x in 0..n {
        members[projection[x]].push(x);
    }
    let reps: Vec<usize> = members.iter().map(|c| c[0]).collect();
    let leq = BitMatrix::from_fn(m, |a, b| preorder.leq(reps[a], reps[b]));
    let poset = Poset::new(leq, members).expect("condensation of a preorder is a partial order");
    QuotientResult { poset, projection }
}

/// The map `[x]_from -> [x]_to` between quotients of nested preorders.
pub fn coarsening_map(from: &QuotientResult, to: &QuotientResult) -> Result<MonotoneMap> {
    let m = from.poset.len();
    let mut assignment = vec![usize::MAX; m];
    for (x, &c) in from.projection.iter().enumerate() {
        let image = to.projection[x];
        if assignment[c] == usize::MAX {
            assignment[c] = image;
        } else if assignment[c] != image {
            return Err(Error::InvalidParameter(format!(
                "points of class {c} split under the coarser preorder"
            )));
        }
    }
    MonotoneMap::new(&from.poset, &to.poset, assignment)
}
