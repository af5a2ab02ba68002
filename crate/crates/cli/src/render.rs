//! Text renderings of stages, diagrams and reports.

use serde_json::{json, Value};
use topofilt::persistence::PersistenceDiagram;
use topofilt::pipeline::{SnapshotReport, StabilityReport};
use topofilt::poset::{BeatKind, CrosscutValidity, Poset};

/// Comma-joined point names of each poset element.
pub fn element_names(poset: &Poset, point_labels: Option<&[String]>) -> Vec<String> {
    poset
        .tags()
        .iter()
        .map(|members| {
            let names: Vec<String> = members
                .iter()
                .map(|&x| point_labels.map_or_else(|| x.to_string(), |l| l[x].clone()))
                .collect();
            names.join(",")
        })
        .collect()
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Hasse diagram, minimal elements at the bottom.
pub fn hasse_dot(name: &str, poset: &Poset, names: &[String]) -> String {
    let mut out = format!("digraph {name} {{\n  rankdir=BT;\n  node [shape=box];\n");
    for (i, label) in names.iter().enumerate() {
        out.push_str(&format!("  n{i} [label=\"{}\"];\n", dot_escape(label)));
    }
    for (a, b) in poset.cover_pairs() {
        out.push_str(&format!("  n{a} -> n{b};\n"));
    }
    out.push_str("}\n");
    out
}

const DEGREE_COLOURS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Scatter of (birth, death) with the diagonal; points dying at +∞ sit on a dashed top line.
pub fn diagram_svg(diagrams: &PersistenceDiagram) -> String {
    let (size, margin) = (400.0, 40.0);
    let plot = size - 2.0 * margin;
    let mut top: f64 = 0.0;
    for d in &diagrams.degrees {
        for p in d.points() {
            top = top.max(p.birth).max(p.death.unwrap_or(0.0));
        }
    }
    let top = if top > 0.0 { top * 1.1 } else { 1.0 };
    // the infinity line sits a little above the finite range
    let inf_y = margin - 15.0;
    let x = |v: f64| margin + v / top * plot;
    let y = |v: f64| size - margin - v / top * plot;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    ));
    out.push_str("  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "  <line class=\"axis\" x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n  <line class=\"axis\" x1=\"{m}\" y1=\"{b}\" x2=\"{m}\" y2=\"{t}\" stroke=\"black\"/>\n",
        m = margin,
        b = size - margin,
        r = size - margin,
        t = inf_y,
    ));
    out.push_str(&format!(
        "  <line class=\"diagonal\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"grey\"/>\n",
        x(0.0),
        y(0.0),
        x(top),
        y(top)
    ));
    out.push_str(&format!(
        "  <line class=\"infinity\" x1=\"{m}\" y1=\"{inf_y}\" x2=\"{r}\" y2=\"{inf_y}\" stroke=\"grey\" stroke-dasharray=\"4 4\"/>\n",
        m = margin,
        r = size - margin,
    ));
    out.push_str(&format!("  <text x=\"{}\" y=\"{}\" font-size=\"12\">birth</text>\n", size / 2.0, size - 10.0));
    out.push_str(&format!("  <text x=\"5\" y=\"{}\" font-size=\"12\">death</text>\n", size / 2.0));
    out.push_str(&format!("  <text x=\"5\" y=\"{}\" font-size=\"12\">inf</text>\n", inf_y + 4.0));
    out.push_str(&format!("  <text x=\"{}\" y=\"{}\" font-size=\"10\">{top:.3}</text>\n", size - margin - 20.0, size - margin + 15.0));
    for (n, d) in diagrams.degrees.iter().enumerate() {
        let colour = DEGREE_COLOURS[n % DEGREE_COLOURS.len()];
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{colour}\">H{n}</text>\n",
            size - margin + 5.0,
            margin + 15.0 * (n as f64 + 1.0)
        ));
        for p in d.points() {
            let cy = p.death.map_or(inf_y, y);
            let death = p.death.map_or_else(|| "inf".to_string(), |v| v.to_string());
            out.push_str(&format!(
                "  <circle class=\"point degree-{n}\" cx=\"{:.3}\" cy=\"{cy:.3}\" r=\"4\" fill=\"{colour}\"><title>H{n} ({}, {death}) x{}</title></circle>\n",
                x(p.birth),
                p.birth,
                p.mult
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn snapshot_json(report: &SnapshotReport, point_labels: Option<&[String]>) -> Value {
    let poset = &report.quotient.poset;
    let names = element_names(poset, point_labels);
    let core_elements: Vec<usize> = report.core.inclusion.assignment().to_vec();
    let (status, witness) = match &report.crosscut.validity {
        CrosscutValidity::Valid => ("valid", None),
        CrosscutValidity::Invalid { witness } => ("invalid", Some(witness.clone())),
        CrosscutValidity::Indeterminate { .. } => ("indeterminate", None),
    };
    let removed: Vec<Value> = report
        .core
        .removal_log
        .iter()
        .map(|b| {
            let kind = match b.kind {
                BeatKind::Down => "down",
                BeatKind::Up => "up",
            };
            json!({"element": b.element, "kind": kind, "dominator": b.dominator})
        })
        .collect();
    json!({
        "t_requested": report.t_requested,
        "t_stage": report.t_stage,
        "stage_index": report.stage_index,
        "poset": {
            "elements": names,
            "covers": report.quotient.poset.cover_pairs(),
        },
        "core": {
            "elements": core_elements,
            "covers": report.core.core.cover_pairs(),
            "removed": removed,
        },
        "order_betti": report.order_betti,
        "crosscut": {
            "status": status,
            "witness": witness,
            "betti": report.crosscut.betti,
        },
        "disagreement": report.disagreement,
    })
}

pub fn stability_json(report: &StabilityReport) -> Value {
    let per_degree: serde_json::Map<String, Value> =
        report.max_distance.iter().enumerate().map(|(n, &d)| (n.to_string(), json!(d))).collect();
    json!({
        "epsilon": report.epsilon,
        "lipschitz": report.lipschitz,
        "bound": report.bound,
        "trials": report.trials,
        "seed": report.seed,
        "max_distance": per_degree,
        "pass": report.pass,
    })
}
