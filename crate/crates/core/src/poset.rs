//! Finite posets, beat-point cores, monotone maps and maximal-element crosscuts.
//!
//! A *down beat point* `x` is an element whose strict down-set `{y : y < x}`
//! has a maximum; an *up beat point* is one whose strict up-set has a
//! minimum. Removing a beat point (retracting it onto that maximum or
//! minimum, its *dominator*) does not change the homotopy type; a poset with
//! no beat points is a *core*.

use std::collections::HashSet;

use crate::bits::{BitMatrix, BitSet};
use crate::error::{Error, Result};

/// Default cap on subset checks in [`crosscut_valid`].
pub const DEFAULT_SUBSET_CHECK_CAP: u64 = 1 << 20;

#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    /// `up.row(x)` = `{ y : x <= y }`.
    up: BitMatrix,
    /// `down.row(x)` = `{ y : y <= x }`.
    down: BitMatrix,
    /// Original points represented by each element.
    tags: Vec<Vec<usize>>,
}

impl std::fmt::Debug for Poset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Poset").field("covers", &self.cover_pairs()).field("tags", &self.tags).finish()
    }
}

impl Poset {
    /// `leq.get(x, y)` means `x <= y`. Tags default to singletons when empty.
    pub fn new(leq: BitMatrix, tags: Vec<Vec<usize>>) -> Result<Self> {
        let m = leq.size();
        let tags = if tags.is_empty() { (0..m).map(|x| vec![x]).collect() } else { tags };
        if tags.len() != m {
            return Err(Error::SizeMismatch { left: m, right: tags.len() });
        }
        for x in 0..m {
            if !leq.get(x, x) {
                return Err(Error::InvalidParameter(format!("order is not reflexive at {x}")));
            }
            for y in leq.row(x).iter() {
                if y != x && leq.get(y, x) {
                    return Err(Error::InvalidParameter(format!("order is not antisymmetric at ({x},{y})")));
                }
                if !leq.row(y).is_subset(leq.row(x)) {
                    return Err(Error::InvalidParameter(format!("order is not transitive through ({x},{y})")));
                }
            }
        }
        let down = leq.transpose();
        Ok(Self { up: leq, down, tags })
    }

    /// Order generated by the given relations `a <= b` (transitively closed).
    pub fn from_relations(m: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut rel = BitMatrix::identity(m);
        for &(a, b) in pairs {
            rel.set(a, b);
        }
        let closed = crate::finite_space::close_transitively(&rel);
        Self::new(closed.relation().clone(), Vec::new())
    }

    pub fn chain(m: usize) -> Self {
        Self::new(BitMatrix::from_fn(m, |x, y| x <= y), Vec::new()).unwrap()
    }

    pub fn antichain(m: usize) -> Self {
        Self::new(BitMatrix::identity(m), Vec::new()).unwrap()
    }

    pub fn len(&self) -> usize {
        self.up.size()
    }

    pub fn is_empty(&self) -> bool {
        self.up.size() == 0
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up.get(x, y)
    }

    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.up.get(x, y)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    pub fn up_set(&self, x: usize) -> &BitSet {
        self.up.row(x)
    }

    pub fn down_set(&self, x: usize) -> &BitSet {
        self.down.row(x)
    }

    pub fn order(&self) -> &BitMatrix {
        &self.up
    }

    pub fn tags(&self) -> &[Vec<usize>] {
        &self.tags
    }

    /// Sub-poset on `keep` (ascending), with tags carried along.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let up = BitMatrix::from_fn(keep.len(), |a, b| self.leq(keep[a], keep[b]));
        let tags = keep.iter().map(|&x| self.tags[x].clone()).collect();
        Self::new(up, tags).expect("induced sub-order is a partial order")
    }

    /// Hasse diagram edges `(x, y)` with `x` covered by `y`, in lexicographic order.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let m = self.len();
        let mut covers = Vec::new();
        for x in 0..m {
            for y in self.up.row(x).iter() {
                if y == x {
                    continue;
                }
                // x < z < y for some z?
                let mut between = self.up.row(x).clone();
                between.intersect_with(self.down.row(y));
                if between.count() == 2 {
                    covers.push((x, y));
                }
            }
        }
        covers
    }

    pub fn is_maximal(&self, x: usize) -> bool {
        self.up.row(x).count() == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BeatKind {
    Down,
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BeatPoint {
    pub element: usize,
    pub kind: BeatKind,
    pub dominator: usize,
}

/// Maximum of `set`, if it has one.
fn maximum_of(p: &Poset, set: &BitSet) -> Option<usize> {
    set.iter().find(|&z| set.is_subset(p.down_set(z)))
}

fn minimum_of(p: &Poset, set: &BitSet) -> Option<usize> {
    set.iter().find(|&z| set.is_subset(p.up_set(z)))
}

/// Classify `x` within the sub-poset on `alive`; down beats take precedence.
fn beat_within(p: &Poset, alive: &BitSet, x: usize) -> Option<BeatPoint> {
    let mut below = p.down_set(x).clone();
    below.intersect_with(alive);
    below.remove(x);
    if !below.is_empty() {
        if let Some(dominator) = maximum_of(p, &below) {
            return Some(BeatPoint { element: x, kind: BeatKind::Down, dominator });
        }
    }
    let mut above = p.up_set(x).clone();
    above.intersect_with(alive);
    above.remove(x);
    if !above.is_empty() {
        if let Some(dominator) = minimum_of(p, &above) {
            return Some(BeatPoint { element: x, kind: BeatKind::Up, dominator });
        }
    }
    None
}

/// Every beat point of `p`, one entry per element (down beats reported first).
pub fn beat_points(p: &Poset) -> Vec<BeatPoint> {
    let alive = BitSet::full(p.len());
    (0..p.len()).filter_map(|x| beat_within(p, &alive, x)).collect()
}

/// Order-preserving map between two posets, stored as its vertex assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneMap {
    assignment: Vec<usize>,
    target_len: usize,
}

impl MonotoneMap {
    pub fn new(source: &Poset, target: &Poset, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::SizeMismatch { left: source.len(), right: assignment.len() });
        }
        if let Some(&bad) = assignment.iter().find(|&&v| v >= target.len()) {
            return Err(Error::InvalidParameter(format!("image {bad} outside target of size {}", target.len())));
        }
        for x in 0..source.len() {
            for y in source.up_set(x).iter() {
                let (fx, fy) = (assignment[x], assignment[y]);
                if !target.leq(fx, fy) {
                    return Err(Error::NotMonotone { x, y, fx, fy });
                }
            }
        }
        Ok(Self { assignment, target_len: target.len() })
    }

    pub fn identity(p: &Poset) -> Self {
        Self { assignment: (0..p.len()).collect(), target_len: p.len() }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn source_len(&self) -> usize {
        self.assignment.len()
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &MonotoneMap) -> MonotoneMap {
        assert_eq!(self.target_len, next.source_len(), "maps are not composable");
        MonotoneMap {
            assignment: self.assignment.iter().map(|&y| next.assignment[y]).collect(),
            target_len: next.target_len,
        }
    }
}

/// A beat-point core with the maps tying it to the original poset.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreResult {
    pub core: Poset,
    /// core element -> original element.
    pub inclusion: MonotoneMap,
    /// original element -> core element.
    pub retraction: MonotoneMap,
    pub removal_log: Vec<BeatPoint>,
}

impl CoreResult {
    /// The trivial reduction: the poset is its own core.
    pub fn identity(p: &Poset) -> Self {
        Self {
            core: p.clone(),
            inclusion: MonotoneMap::identity(p),
            retraction: MonotoneMap::identity(p),
            removal_log: Vec::new(),
        }
    }
}

/// Remove the lowest-indexed beat point until none remain.
pub fn core(p: &Poset) -> CoreResult {
    let m = p.len();
    let mut alive = BitSet::full(m);
    let mut parent: Vec<usize> = (0..m).collect();
    let mut removal_log = Vec::new();
    loop {
        let next = alive.iter().find_map(|x| beat_within(p, &alive, x));
        let Some(beat) = next else { break };
        alive.remove(beat.element);
        parent[beat.element] = beat.dominator;
        removal_log.push(beat);
    }
    let keep: Vec<usize> = alive.iter().collect();
    let core = p.induced(&keep);
    let mut position = vec![usize::MAX; m];
    for (i, &x) in keep.iter().enumerate() {
        position[x] = i;
    }
    let retraction = (0..m)
        .map(|mut x| {
            while !alive.contains(x) {
                x = parent[x];
            }
            position[x]
        })
        .collect();
    let inclusion = MonotoneMap::new(&core, p, keep).expect("inclusion of a sub-poset is monotone");
    let retraction = MonotoneMap::new(p, &core, retraction).expect("beat-point retraction is monotone");
    CoreResult { core, inclusion, retraction, removal_log }
}

/// `cq.retraction ∘ f ∘ cp.inclusion`: the map `f` seen between cores.
pub fn conjugate_map(f: &MonotoneMap, cp: &CoreResult, cq: &CoreResult) -> Result<MonotoneMap> {
    let composed = cp.inclusion.then(f).then(&cq.retraction);
    MonotoneMap::new(&cp.core, &cq.core, composed.assignment)
}

/// An antichain of a poset, given by ascending element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crosscut {
    pub elements: Vec<usize>,
}

pub fn maximal_elements(p: &Poset) -> Result<Crosscut> {
    if p.is_empty() {
        return Err(Error::EmptyPoset);
    }
    Ok(Crosscut { elements: (0..p.len()).filter(|&x| p.is_maximal(x)).collect() })
}

/// Outcome of checking the meet condition on a maximal-element crosscut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrosscutValidity {
    Valid,
    /// A face (as poset elements) whose common lower bounds have no maximum.
    Invalid { witness: Vec<usize> },
    /// More subset checks would be needed than the cap allows.
    Indeterminate { required_checks: u64 },
}

impl CrosscutValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, CrosscutValidity::Valid)
    }
}

/// Distinct maximal face generators `M(p) = { c ∈ C : p <= c }`, as sorted element lists.
pub(crate) fn face_generators(p: &Poset, crosscut: &Crosscut) -> Vec<Vec<usize>> {
    let mut in_cut = BitSet::new(p.len());
    for &c in &crosscut.elements {
        in_cut.insert(c);
    }
    let mut gens: Vec<BitSet> = Vec::new();
    for x in 0..p.len() {
        // minimal elements generate every face
        if p.down_set(x).count() != 1 {
            continue;
        }
        let mut g = p.up_set(x).clone();
        g.intersect_with(&in_cut);
        if !gens.contains(&g) {
            gens.push(g);
        }
    }
    let maximal: Vec<&BitSet> =
        gens.iter().filter(|g| !gens.iter().any(|h| h != *g && g.is_subset(h))).collect();
    maximal.into_iter().map(|g| g.iter().collect()).collect()
}

pub(crate) fn require_maximal_crosscut(p: &Poset, crosscut: &Crosscut) -> Result<()> {
    if maximal_elements(p)? != *crosscut {
        return Err(Error::UnsupportedCrosscut);
    }
    Ok(())
}

/// Check that every face of the crosscut complex with at least two elements
/// has a meet (its common lower bounds have a maximum).
pub fn crosscut_valid(p: &Poset, crosscut: &Crosscut, cap: u64) -> Result<CrosscutValidity> {
    require_maximal_crosscut(p, crosscut)?;
    let generators = face_generators(p, crosscut);
    let mut required: u64 = 0;
    for g in &generators {
        let k = g.len() as u32;
        let subsets = if k >= 63 { u64::MAX } else { (1u64 << k) - 1 - k as u64 };
        required = required.saturating_add(subsets);
    }
    if required > cap {
        return Ok(CrosscutValidity::Indeterminate { required_checks: required });
    }
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for g in &generators {
        let k = g.len();
        for mask in 1u64..(1u64 << k) {
            if mask.count_ones() < 2 {
                continue;
            }
            let face: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| g[i]).collect();
            if !seen.insert(face.clone()) {
                continue;
            }
            let mut lower = BitSet::full(p.len());
            for &c in &face {
                lower.intersect_with(p.down_set(c));
            }
            if maximum_of(p, &lower).is_none() {
                return Ok(CrosscutValidity::Invalid { witness: face });
            }
        }
    }
    Ok(CrosscutValidity::Valid)
}
