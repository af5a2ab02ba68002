//! Checking a candidate δ-interleaving between two filtrations of the same points.
//!
//! The cross maps `φ_t : A(t) → B(t + δ)` and `ψ_t : B(t) → A(t + δ)` are
//! induced by the identity on points. Both modules are piecewise constant, so
//! the triangles and naturality squares only need checking at the event
//! scales `g − kδ` (`g` a grid value of either side, `k = 0, 1, 2`).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::homology::InducedMatrix;
use crate::pipeline::{map_between, structure_maps, Filtration};

/// Scales are looked up slightly to the right, so costs that agree up to
/// rounding land in the same stage.
const LOOKUP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SquareViolation {
    /// Which diagram failed, e.g. `"psi(t+delta) . phi(t) = A(t -> t+2delta)"`.
    pub square: String,
    pub t: f64,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterleavingReport {
    pub delta: f64,
    pub events: usize,
    pub squares_checked: usize,
    pub first_violation: Option<SquareViolation>,
}

impl InterleavingReport {
    pub fn success(&self) -> bool {
        self.first_violation.is_none()
    }
}

struct Side<'a> {
    f: &'a Filtration,
    maps: Vec<InducedMatrix>,
}

impl Side<'_> {
    fn at(&self, t: f64) -> usize {
        self.f.grid.index_at(t + LOOKUP_SLACK).expect("event scales are non-negative")
    }

    /// Product of consecutive structure matrices from stage `i` to `j`.
    fn composite(&self, i: usize, j: usize) -> InducedMatrix {
        let start = InducedMatrix::identity(&self.f.stages[i].data().betti(), self.f.config.field);
        self.maps[i..j].iter().fold(start, |acc, m| acc.then(m))
    }
}

struct CrossMaps<'a> {
    from: &'a Side<'a>,
    to: &'a Side<'a>,
    cache: HashMap<(usize, usize), InducedMatrix>,
}

impl CrossMaps<'_> {
    fn get(&mut self, t: f64, delta: f64) -> Result<InducedMatrix> {
        let (i, j) = (self.from.at(t), self.to.at(t + delta));
        if let Some(m) = self.cache.get(&(i, j)) {
            return Ok(m.clone());
        }
        let (a, b) = (self.from.f.stages[i].data(), self.to.f.stages[j].data());
        if let Some((x, y)) = a.preorder.relation().first_pair_not_in(b.preorder.relation()) {
            return Err(Error::RelationInclusionFails { t, shifted: t + delta, x, y });
        }
        let m = map_between(a, b)?;
        self.cache.insert((i, j), m.clone());
        Ok(m)
    }
}

fn first_difference(lhs: &InducedMatrix, rhs: &InducedMatrix) -> Option<usize> {
    lhs.degrees.iter().zip(&rhs.degrees).position(|(l, r)| l != r)
}

pub fn interleaving_witness(a: &Filtration, b: &Filtration, delta: f64) -> Result<InterleavingReport> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("delta must be finite and >= 0, got {delta}")));
    }
    if a.stages[0].data().preorder.len() != b.stages[0].data().preorder.len() {
        return Err(Error::SizeMismatch { left: a.stages[0].data().preorder.len(), right: b.stages[0].data().preorder.len() });
    }
    if a.config.field != b.config.field || a.config.max_degree != b.config.max_degree {
        return Err(Error::InvalidParameter("filtrations use different fields or degrees".into()));
    }
    let sa = Side { f: a, maps: structure_maps(a)? };
    let sb = Side { f: b, maps: structure_maps(b)? };

    let mut events: Vec<f64> = vec![0.0];
    for &g in a.grid.values().iter().chain(b.grid.values()) {
        for k in 0..3 {
            let e = g - k as f64 * delta;
            if e >= 0.0 {
                events.push(e);
            }
        }
    }
    events.sort_by(f64::total_cmp);
    events.dedup();

    let mut phi = CrossMaps { from: &sa, to: &sb, cache: HashMap::new() };
    let mut psi = CrossMaps { from: &sb, to: &sa, cache: HashMap::new() };
    let mut report = InterleavingReport { delta, events: events.len(), squares_checked: 0, first_violation: None };
    let mut seen = std::collections::HashSet::new();
    let check = |report: &mut InterleavingReport, square: &str, t: f64, lhs: &InducedMatrix, rhs: &InducedMatrix| {
        report.squares_checked += 1;
        if report.first_violation.is_none() {
            if let Some(degree) = first_difference(lhs, rhs) {
                report.first_violation = Some(SquareViolation { square: square.to_string(), t, degree });
            }
        }
    };

    for (n, &e) in events.iter().enumerate() {
        let key = (sa.at(e), sb.at(e), sa.at(e + delta), sb.at(e + delta), sa.at(e + 2.0 * delta), sb.at(e + 2.0 * delta));
        let next = events.get(n + 1).copied();
        let next_key = next.map(|e2| (sa.at(e2), sb.at(e2), sa.at(e2 + delta), sb.at(e2 + delta)));
        if !seen.insert((key, next_key)) {
            continue;
        }
        let phi_e = phi.get(e, delta)?;
        let psi_e = psi.get(e, delta)?;
        let phi_shift = phi.get(e + delta, delta)?;
        let psi_shift = psi.get(e + delta, delta)?;
        let a_2d = sa.composite(sa.at(e), sa.at(e + 2.0 * delta));
        let b_2d = sb.composite(sb.at(e), sb.at(e + 2.0 * delta));
        check(&mut report, "psi(t+delta) . phi(t) = A(t -> t+2delta)", e, &phi_e.then(&psi_shift), &a_2d);
        check(&mut report, "phi(t+delta) . psi(t) = B(t -> t+2delta)", e, &psi_e.then(&phi_shift), &b_2d);
        if let Some(e2) = next {
            let phi_2 = phi.get(e2, delta)?;
            let psi_2 = psi.get(e2, delta)?;
            let a_step = sa.composite(sa.at(e), sa.at(e2));
            let b_step = sb.composite(sb.at(e), sb.at(e2));
            let a_shift = sa.composite(sa.at(e + delta), sa.at(e2 + delta));
            let b_shift = sb.composite(sb.at(e + delta), sb.at(e2 + delta));
            check(&mut report, "phi(s) . A(t -> s) = B(t+delta -> s+delta) . phi(t)", e, &a_step.then(&phi_2), &phi_e.then(&b_shift));
            check(&mut report, "psi(s) . B(t -> s) = A(t+delta -> s+delta) . psi(t)", e, &b_step.then(&psi_2), &psi_e.then(&a_shift));
        }
    }
    Ok(report)
}
