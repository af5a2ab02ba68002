//! Exact bottleneck distance between diagrams.
//!
//! The optimum is one of finitely many candidate values (sup-distances
//! between points, half-persistences), so binary search over the sorted
//! candidates with a perfect-matching test at each probe is exact.

use std::collections::VecDeque;

use super::Diagram;

fn sup_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn half_persistence(p: (f64, f64)) -> f64 {
    (p.1 - p.0) / 2.0
}

fn expand(d: &Diagram) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut finite = Vec::new();
    let mut births = Vec::new();
    for p in d.points() {
        for _ in 0..p.mult {
            match p.death {
                Some(death) => finite.push((p.birth, death)),
                None => births.push(p.birth),
            }
        }
    }
    births.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (finite, births)
}

/// Bipartite graph given by adjacency lists from left to right vertices.
fn has_perfect_matching(adj: &[Vec<usize>], right: usize) -> bool {
    hopcroft_karp(adj, right) == adj.len()
}

fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> usize {
    const NONE: usize = usize::MAX;
    let left = adj.len();
    let mut match_l = vec![NONE; left];
    let mut match_r = vec![NONE; right];
    let mut dist = vec![0usize; left];
    let mut matched = 0;
    loop {
        // layered BFS from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..left {
            if match_l[u] == NONE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = NONE;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NONE {
                    found = true;
                } else if dist[w] == NONE {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return matched;
        }
        for u in 0..left {
            if match_l[u] == NONE && augment(u, adj, &mut match_l, &mut match_r, &mut dist) {
                matched += 1;
            }
        }
    }
}

fn augment(u: usize, adj: &[Vec<usize>], match_l: &mut [usize], match_r: &mut [usize], dist: &mut [usize]) -> bool {
    const NONE: usize = usize::MAX;
    for &v in &adj[u] {
        let w = match_r[v];
        if w == NONE || (dist[w] == dist[u] + 1 && augment(w, adj, match_l, match_r, dist)) {
            match_l[u] = v;
            match_r[v] = u;
            return true;
        }
    }
    dist[u] = NONE;
    false
}

/// Can `a` and `b` be matched with every pair (or diagonal projection) within `r`?
///
/// Left vertices: points of `a`, then diagonal copies of `b`. Right vertices:
/// points of `b`, then diagonal copies of `a`.
fn feasible(a: &[(f64, f64)], b: &[(f64, f64)], r: f64) -> bool {
    let (p, q) = (a.len(), b.len());
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(p + q);
    for (i, &x) in a.iter().enumerate() {
        let mut row: Vec<usize> = (0..q).filter(|&j| sup_distance(x, b[j]) <= r).collect();
        if half_persistence(x) <= r {
            row.push(q + i);
        }
        adj.push(row);
    }
    for (j, &y) in b.iter().enumerate() {
        let mut row = Vec::with_capacity(p + 1);
        if half_persistence(y) <= r {
            row.push(j);
        }
        row.extend(q..q + p);
        adj.push(row);
    }
    has_perfect_matching(&adj, p + q)
}

pub fn bottleneck(a: &Diagram, b: &Diagram) -> f64 {
    let (fa, ia) = expand(a);
    let (fb, ib) = expand(b);
    if ia.len() != ib.len() {
        return f64::INFINITY;
    }
    let infinite_part = ia.iter().zip(&ib).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);

    let mut candidates: Vec<f64> = vec![0.0];
    candidates.extend(fa.iter().chain(&fb).map(|&x| half_persistence(x)));
    for &x in &fa {
        candidates.extend(fb.iter().map(|&y| sup_distance(x, y)));
    }
    candidates.sort_by(|x, y| x.partial_cmp(y).unwrap());
    candidates.dedup();
    // matching everything to the diagonal is always feasible at the largest half-persistence
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(&fa, &fb, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo].max(infinite_part)
}
