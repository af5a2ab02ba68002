//! Diagram artifacts: JSON with `null` for +∞, CSV with `inf`.

use std::collections::BTreeMap;

use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use super::{Diagram, DiagramPoint, PersistenceDiagram};
use crate::error::{Error, Result};
use crate::field::FieldSpec;

#[derive(Serialize, Deserialize)]
struct PointRecord {
    birth: f64,
    death: Option<f64>,
    mult: usize,
}

impl From<&DiagramPoint> for PointRecord {
    fn from(p: &DiagramPoint) -> Self {
        Self { birth: p.birth, death: p.death, mult: p.mult }
    }
}

/// Degrees keyed by their decimal string, in numeric order.
struct DegreeMap<'a>(&'a [Diagram]);

impl Serialize for DegreeMap<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (n, d) in self.0.iter().enumerate() {
            let points: Vec<PointRecord> = d.points().iter().map(PointRecord::from).collect();
            map.serialize_entry(&n.to_string(), &points)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct DiagramsOut<'a> {
    field: u32,
    diagrams: DegreeMap<'a>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramsIn {
    field: u32,
    diagrams: BTreeMap<String, Vec<PointRecord>>,
}

fn build(field: FieldSpec, by_degree: BTreeMap<usize, Vec<DiagramPoint>>, min_degrees: usize) -> Result<PersistenceDiagram> {
    let count = by_degree.keys().next_back().map_or(0, |&n| n + 1).max(min_degrees);
    let mut degrees = vec![Diagram::default(); count];
    for (n, points) in by_degree {
        degrees[n] = Diagram::new(points)?;
    }
    Ok(PersistenceDiagram { field, degrees })
}

impl PersistenceDiagram {
    pub fn to_json(&self) -> String {
        let out = DiagramsOut { field: self.field.prime(), diagrams: DegreeMap(&self.degrees) };
        let mut text = serde_json::to_string_pretty(&out).expect("diagram serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["degree", "birth", "death", "mult"]).expect("in-memory write");
        for (n, d) in self.degrees.iter().enumerate() {
            for p in d.points() {
                let death = p.death.map_or_else(|| "inf".to_string(), |x| x.to_string());
                w.write_record([n.to_string(), p.birth.to_string(), death, p.mult.to_string()]).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

pub fn diagrams_from_json(text: &str) -> Result<PersistenceDiagram> {
    let parsed: DiagramsIn = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let field = FieldSpec::new(parsed.field)?;
    let mut by_degree = BTreeMap::new();
    for (key, points) in parsed.diagrams {
        let n: usize = key.parse().map_err(|_| Error::Parse(format!("degree key {key:?} is not an integer")))?;
        let points = points.into_iter().map(|r| DiagramPoint { birth: r.birth, death: r.death, mult: r.mult }).collect();
        by_degree.insert(n, points);
    }
    build(field, by_degree, 0)
}

/// CSV carries no field or empty degrees; both are supplied by the caller.
pub fn diagrams_from_csv(text: &str, field: FieldSpec, degree_count: usize) -> Result<PersistenceDiagram> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["degree", "birth", "death", "mult"] {
        return Err(Error::Parse(format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>())));
    }
    let mut by_degree: BTreeMap<usize, Vec<DiagramPoint>> = BTreeMap::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let bad = |what: &str| Error::Parse(format!("row {}: bad {what}", line + 2));
        let n: usize = record[0].parse().map_err(|_| bad("degree"))?;
        let birth: f64 = record[1].parse().map_err(|_| bad("birth"))?;
        let death = match &record[2] {
            "inf" => None,
            s => Some(s.parse::<f64>().map_err(|_| bad("death"))?),
        };
        let mult: usize = record[3].parse().map_err(|_| bad("mult"))?;
        by_degree.entry(n).or_default().push(DiagramPoint { birth, death, mult });
    }
    build(field, by_degree, degree_count)
}
