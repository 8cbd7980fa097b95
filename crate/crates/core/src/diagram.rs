//! Persistence diagrams: finite multisets of `(birth, death)` points.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matching::maximum_matching;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub fn new(birth: f64, death: f64) -> Self {
        DiagramPoint { birth, death }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

/// Where a diagram point came from in the filtration that produced it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Edge of the input graph whose ascending entry created the cycle.
    pub edge: Option<String>,
    /// Vertex whose value is the birth coordinate.
    pub vertex: Option<String>,
    /// Position of the creating edge in the ascending order.
    pub ascending_index: Option<usize>,
    /// Position of the destroying cone cell in the descending order.
    pub descending_index: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagram {
    points: Vec<DiagramPoint>,
    provenance: Vec<Provenance>,
}

impl Diagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let points: Vec<DiagramPoint> = pairs.into_iter().map(|(b, d)| DiagramPoint::new(b, d)).collect();
        let provenance = vec![Provenance::default(); points.len()];
        Diagram { points, provenance }
    }

    pub fn push(&mut self, point: DiagramPoint, provenance: Provenance) {
        self.points.push(point);
        self.provenance.push(provenance);
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sorts points by `(birth, death)`, keeping provenance aligned.
    pub fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by(|&a, &b| {
            let (p, q) = (self.points[a], self.points[b]);
            p.birth
                .total_cmp(&q.birth)
                .then(p.death.total_cmp(&q.death))
                .then_with(|| self.provenance[a].edge.cmp(&self.provenance[b].edge))
        });
        self.points = idx.iter().map(|&i| self.points[i]).collect();
        self.provenance = idx.iter().map(|&i| self.provenance[i].clone()).collect();
    }

    /// Bit-exact key of the point multiset, ignoring provenance.
    pub fn multiset_key(&self) -> Vec<(u64, u64)> {
        let mut key: Vec<(u64, u64)> = self
            .points
            .iter()
            .map(|p| (p.birth.to_bits(), p.death.to_bits()))
            .collect();
        key.sort_unstable();
        key
    }

    /// Whether the two multisets can be paired up so that every pair agrees
    /// within `tol` in both coordinates.
    pub fn multiset_eq_within(&self, other: &Diagram, tol: f64) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let adjacency: Vec<Vec<usize>> = self
            .points
            .iter()
            .map(|p| {
                other
                    .points
                    .iter()
                    .enumerate()
                    .filter(|(_, q)| (p.birth - q.birth).abs() <= tol && (p.death - q.death).abs() <= tol)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        maximum_matching(&adjacency, other.len()).is_left_perfect()
    }

    /// Writes `birth,death,edge_id` rows with a header line.
    pub fn write_csv<W: Write>(&self, out: W, format_value: impl Fn(f64) -> String) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["birth", "death", "edge_id"])?;
        for (p, prov) in self.points.iter().zip(&self.provenance) {
            w.write_record([
                format_value(p.birth),
                format_value(p.death),
                prov.edge.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, round: impl Fn(f64) -> f64) -> serde_json::Value {
        #[derive(Serialize)]
        struct Row<'a> {
            birth: f64,
            death: f64,
            edge_id: Option<&'a str>,
            vertex_id: Option<&'a str>,
        }
        let rows: Vec<Row> = self
            .points
            .iter()
            .zip(&self.provenance)
            .map(|(p, prov)| Row {
                birth: round(p.birth),
                death: round(p.death),
                edge_id: prov.edge.as_deref(),
                vertex_id: prov.vertex.as_deref(),
            })
            .collect();
        serde_json::json!({ "points": rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiset_equality_ignores_order() {
        let a = Diagram::from_pairs([(0.0, 1.0), (0.5, 2.0)]);
        let b = Diagram::from_pairs([(0.5, 2.0 + 1e-12), (0.0, 1.0)]);
        assert!(a.multiset_eq_within(&b, 1e-9));
        assert!(!a.multiset_eq_within(&b, 0.0));
        assert!(!a.multiset_eq_within(&Diagram::from_pairs([(0.0, 1.0)]), 1.0));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut d = Diagram::new();
        d.push(
            DiagramPoint::new(0.0, 1.5),
            Provenance {
                edge: Some("l0".into()),
                ..Default::default()
            },
        );
        let mut buf = Vec::new();
        d.write_csv(&mut buf, |x| x.to_string()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "birth,death,edge_id\n0,1.5,l0\n");
    }

    #[test]
    fn sort_keeps_provenance_aligned() {
        let mut d = Diagram::new();
        for (b, e) in [(2.0, "x"), (1.0, "y")] {
            d.push(
                DiagramPoint::new(b, 3.0),
                Provenance {
                    edge: Some(e.into()),
                    ..Default::default()
                },
            );
        }
        d.sort();
        assert_eq!(d.points()[0].birth, 1.0);
        assert_eq!(d.provenance()[0].edge.as_deref(), Some("y"));
    }
}
