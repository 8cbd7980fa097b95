//! Finite metric graphs.
//!
//! A [`MetricGraph`] is a connected multigraph whose edges carry positive
//! lengths. Self-loops and parallel edges are allowed. The continuous object
//! is its geometric realization, whose points are addressed by
//! [`GraphPoint`]: either a vertex, or an offset strictly inside an edge,
//! measured from the edge's `u` endpoint.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative factor applied to the total edge length to decide when two path
/// lengths tie.
pub const TIE_FACTOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite to `x`. For a self-loop this is `x` itself.
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// A point of the geometric realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphPoint {
    Vertex(usize),
    /// `offset` lies strictly inside `(0, length)` and is measured from `u`.
    Interior {
        edge: usize,
        offset: f64,
    },
}

#[derive(Debug, Clone, Default)]
pub struct MetricGraph {
    vertex_ids: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    incidence: Vec<Vec<usize>>,
}

impl PartialEq for MetricGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_ids == other.vertex_ids && self.edges == other.edges
    }
}

impl MetricGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: impl Into<String>) -> Result<usize> {
        let id = id.into();
        if self.vertex_index.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        let idx = self.vertex_ids.len();
        self.vertex_index.insert(id.clone(), idx);
        self.vertex_ids.push(id);
        self.incidence.push(Vec::new());
        Ok(idx)
    }

    /// Adds an edge between two existing vertices. Lengths are not checked
    /// here; [`MetricGraph::validate`] rejects non-positive ones.
    pub fn add_edge(&mut self, id: impl Into<String>, u: usize, v: usize, length: f64) -> Result<usize> {
        let id = id.into();
        if self.edge_index.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        for x in [u, v] {
            if x >= self.vertex_ids.len() {
                return Err(Error::UnknownVertex(format!("#{x}")));
            }
        }
        let idx = self.edges.len();
        self.edge_index.insert(id.clone(), idx);
        self.edges.push(Edge { id, u, v, length });
        self.incidence[u].push(idx);
        if u != v {
            self.incidence[v].push(idx);
        }
        Ok(idx)
    }

    pub fn add_edge_by_ids(&mut self, id: impl Into<String>, u: &str, v: &str, length: f64) -> Result<usize> {
        let u = self.vertex(u)?;
        let v = self.vertex(v)?;
        self.add_edge(id, u, v, length)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge_by_id(&self, id: &str) -> Result<usize> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    pub fn has_vertex_id(&self, id: &str) -> bool {
        self.vertex_index.contains_key(id)
    }

    pub fn has_edge_id(&self, id: &str) -> bool {
        self.edge_index.contains_key(id)
    }

    /// Edges incident to `v`; a self-loop is listed once.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    /// Number of edge ends at `v`; a self-loop counts twice.
    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v]
            .iter()
            .map(|&e| if self.edges[e].is_loop() { 2 } else { 1 })
            .sum()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    pub fn min_edge_length(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.length).reduce(f64::min)
    }

    /// Two path lengths tie when they differ by at most this amount.
    pub fn tie_tolerance(&self) -> f64 {
        let total = self.total_length();
        if total > 0.0 {
            TIE_FACTOR * total
        } else {
            TIE_FACTOR
        }
    }

    /// Rank of the first homology group, `|E| - |V| + 1` for a connected graph.
    pub fn first_betti(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.vertex_ids.len())
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertex_ids.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if let Some(e) = self.edges.iter().find(|e| !(e.length > 0.0 && e.length.is_finite())) {
            return Err(Error::NonPositiveLength(e.id.clone()));
        }
        let mut seen = vec![false; self.vertex_ids.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &e in &self.incidence[x] {
                let y = self.edges[e].other(x);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        match seen.iter().position(|&s| !s) {
            Some(w) => Err(Error::Disconnected(self.vertex_ids[w].clone())),
            None => Ok(()),
        }
    }

    /// Builds the canonical point at `offset` along `edge`. Offsets at either
    /// end collapse to the endpoint vertex.
    pub fn point_on_edge(&self, edge: usize, offset: f64) -> Result<GraphPoint> {
        let e = self
            .edges
            .get(edge)
            .ok_or_else(|| Error::InvalidPoint(format!("edge #{edge} does not exist")))?;
        if !offset.is_finite() || offset < 0.0 || offset > e.length {
            return Err(Error::InvalidPoint(format!(
                "offset {offset} outside [0, {}] on edge `{}`",
                e.length, e.id
            )));
        }
        Ok(if offset == 0.0 {
            GraphPoint::Vertex(e.u)
        } else if offset == e.length {
            GraphPoint::Vertex(e.v)
        } else {
            GraphPoint::Interior { edge, offset }
        })
    }

    /// Checks that `p` lies on this graph and returns its canonical form.
    pub fn check_point(&self, p: GraphPoint) -> Result<GraphPoint> {
        match p {
            GraphPoint::Vertex(v) if v < self.vertex_ids.len() => Ok(p),
            GraphPoint::Vertex(v) => Err(Error::InvalidPoint(format!("vertex #{v} does not exist"))),
            GraphPoint::Interior { edge, offset } => self.point_on_edge(edge, offset),
        }
    }

    /// Parses `"vertex_id"` or `"edge_id@offset"`.
    pub fn parse_point(&self, text: &str) -> Result<GraphPoint> {
        if let Some((edge, offset)) = text.rsplit_once('@') {
            if let Ok(e) = self.edge_by_id(edge) {
                let offset: f64 = offset
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidPoint(format!("bad offset in `{text}`")))?;
                return self.point_on_edge(e, offset);
            }
        }
        self.vertex(text)
            .map(GraphPoint::Vertex)
            .map_err(|_| Error::InvalidPoint(format!("`{text}` names no vertex or edge@offset")))
    }

    pub fn point_label(&self, p: GraphPoint) -> String {
        match p {
            GraphPoint::Vertex(v) => self.vertex_ids[v].clone(),
            GraphPoint::Interior { edge, offset } => format!("{}@{}", self.edges[edge].id, offset),
        }
    }

    fn fresh_vertex_id(&self, base: String) -> String {
        fresh_id(base, |s| self.vertex_index.contains_key(s))
    }

    fn fresh_edge_id(&self, base: String) -> String {
        fresh_id(base, |s| self.edge_index.contains_key(s))
    }

    /// Inserts a vertex at every given interior point, splitting edges.
    ///
    /// Original vertices keep their indices; new vertices are appended in the
    /// order their points first appear in `points`. Pieces of a split edge
    /// replace it in the edge list, ordered from `u` to `v`.
    pub fn subdivide(&self, points: &[GraphPoint]) -> Result<Subdivision> {
        let canonical = points
            .iter()
            .map(|&p| self.check_point(p))
            .collect::<Result<Vec<_>>>()?;

        let mut cuts: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for p in &canonical {
            if let GraphPoint::Interior { edge, offset } = *p {
                cuts.entry(edge).or_default().push(offset);
            }
        }
        for offsets in cuts.values_mut() {
            offsets.sort_by(f64::total_cmp);
            offsets.dedup();
        }

        let mut graph = MetricGraph::new();
        for id in &self.vertex_ids {
            graph.add_vertex(id.clone())?;
        }
        // Cut vertices are created in first-appearance order of `points`.
        let mut cut_vertex: HashMap<(usize, u64), usize> = HashMap::new();
        for p in &canonical {
            if let GraphPoint::Interior { edge, offset } = *p {
                if let std::collections::hash_map::Entry::Vacant(slot) = cut_vertex.entry((edge, offset.to_bits())) {
                    let id = self.fresh_vertex_id(format!("{}@{}", self.edges[edge].id, offset));
                    let id = fresh_id(id, |s| graph.has_vertex_id(s));
                    slot.insert(graph.add_vertex(id)?);
                }
            }
        }

        let mut edge_origin = Vec::with_capacity(self.edges.len());
        for (ei, e) in self.edges.iter().enumerate() {
            match cuts.get(&ei) {
                None => {
                    graph.add_edge(e.id.clone(), e.u, e.v, e.length)?;
                    edge_origin.push(ei);
                }
                Some(offsets) => {
                    let mut prev_vertex = e.u;
                    let mut prev_offset = 0.0;
                    for (k, &x) in offsets.iter().enumerate() {
                        let w = cut_vertex[&(ei, x.to_bits())];
                        let id = self.fresh_edge_id(format!("{}#{}", e.id, k));
                        let id = fresh_id(id, |s| graph.has_edge_id(s));
                        graph.add_edge(id, prev_vertex, w, x - prev_offset)?;
                        edge_origin.push(ei);
                        prev_vertex = w;
                        prev_offset = x;
                    }
                    let id = self.fresh_edge_id(format!("{}#{}", e.id, offsets.len()));
                    let id = fresh_id(id, |s| graph.has_edge_id(s));
                    graph.add_edge(id, prev_vertex, e.v, e.length - prev_offset)?;
                    edge_origin.push(ei);
                }
            }
        }

        let point_vertices = canonical
            .iter()
            .map(|p| match *p {
                GraphPoint::Vertex(v) => v,
                GraphPoint::Interior { edge, offset } => cut_vertex[&(edge, offset.to_bits())],
            })
            .collect();

        Ok(Subdivision {
            graph,
            point_vertices,
            edge_origin,
        })
    }

    /// Multiplies every length by `1 + U(0, epsilon)`, deterministically in `seed`.
    pub fn perturb_to_generic(&self, epsilon: f64, seed: u64) -> Result<MetricGraph> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        for e in &mut out.edges {
            e.length *= 1.0 + rng.gen::<f64>() * epsilon;
        }
        Ok(out)
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            vertices: self.vertex_ids.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDocument {
                    id: e.id.clone(),
                    u: self.vertex_ids[e.u].clone(),
                    v: self.vertex_ids[e.v].clone(),
                    length: e.length,
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &GraphDocument) -> Result<Self> {
        let mut g = MetricGraph::new();
        for v in &doc.vertices {
            g.add_vertex(v.clone())?;
        }
        for e in &doc.edges {
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(Error::NonPositiveLength(e.id.clone()));
            }
            g.add_edge_by_ids(e.id.clone(), &e.u, &e.v, e.length)?;
        }
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("graph documents always serialize")
    }
}

fn fresh_id(base: String, taken: impl Fn(&str) -> bool) -> String {
    if !taken(&base) {
        return base;
    }
    (1..)
        .map(|k| format!("{base}~{k}"))
        .find(|c| !taken(c))
        .expect("unbounded search")
}

/// Result of [`MetricGraph::subdivide`].
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub graph: MetricGraph,
    /// Vertex of `graph` for each input point, in input order.
    pub point_vertices: Vec<usize>,
    /// Index of the original edge each edge of `graph` was cut from.
    pub edge_origin: Vec<usize>,
}

/// On-disk graph format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDocument {
    pub id: String,
    pub u: String,
    pub v: String,
    pub length: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> MetricGraph {
        let mut g = MetricGraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        for (i, l) in [1.0, 2.0, 3.0].into_iter().enumerate() {
            g.add_edge(format!("e{i}"), a, b, l).unwrap();
        }
        g
    }

    #[test]
    fn single_vertex_is_valid() {
        let mut g = MetricGraph::new();
        g.add_vertex("x").unwrap();
        assert!(g.validate().is_ok());
        assert_eq!(g.first_betti(), 0);
    }

    #[test]
    fn zero_length_edge_rejected() {
        let mut g = MetricGraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        g.add_edge("bad", a, b, 0.0).unwrap();
        assert!(matches!(g.validate(), Err(Error::NonPositiveLength(id)) if id == "bad"));
    }

    #[test]
    fn two_components_rejected() {
        let mut g = MetricGraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        g.add_vertex("c").unwrap();
        g.add_edge("ab", a, b, 1.0).unwrap();
        assert!(matches!(g.validate(), Err(Error::Disconnected(w)) if w == "c"));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut g = MetricGraph::new();
        g.add_vertex("a").unwrap();
        assert!(matches!(g.add_vertex("a"), Err(Error::DuplicateId(_))));
    }

    #[test]
    fn endpoint_offsets_canonicalize() {
        let g = theta();
        assert_eq!(g.point_on_edge(1, 0.0).unwrap(), GraphPoint::Vertex(0));
        assert_eq!(g.point_on_edge(1, 2.0).unwrap(), GraphPoint::Vertex(1));
        assert!(g.point_on_edge(1, 2.5).is_err());
        assert!(g.point_on_edge(1, f64::NAN).is_err());
    }

    #[test]
    fn parse_point_forms() {
        let g = theta();
        assert_eq!(g.parse_point("a").unwrap(), GraphPoint::Vertex(0));
        assert_eq!(
            g.parse_point("e2@1.5").unwrap(),
            GraphPoint::Interior { edge: 2, offset: 1.5 }
        );
        assert!(g.parse_point("e2@4").is_err());
        assert!(g.parse_point("zz").is_err());
    }

    #[test]
    fn empty_subdivision_is_isomorphic() {
        let g = theta();
        let s = g.subdivide(&[]).unwrap();
        assert_eq!(s.graph, g);
        assert_eq!(s.edge_origin, vec![0, 1, 2]);
    }

    #[test]
    fn self_loop_split_in_half() {
        let mut g = MetricGraph::new();
        let o = g.add_vertex("o").unwrap();
        g.add_edge("l", o, o, 4.0).unwrap();
        let s = g.subdivide(&[GraphPoint::Interior { edge: 0, offset: 2.0 }]).unwrap();
        assert_eq!(s.graph.vertex_count(), 2);
        assert_eq!(s.graph.edge_count(), 2);
        let m = s.point_vertices[0];
        for e in s.graph.edges() {
            assert_eq!(e.length, 2.0);
            assert!((e.u == o && e.v == m) || (e.u == m && e.v == o));
        }
    }

    #[test]
    fn repeated_cut_points_share_a_vertex() {
        let g = theta();
        let p = GraphPoint::Interior { edge: 2, offset: 1.0 };
        let s = g.subdivide(&[p, p, GraphPoint::Vertex(1)]).unwrap();
        assert_eq!(s.point_vertices[0], s.point_vertices[1]);
        assert_eq!(s.point_vertices[2], 1);
        assert_eq!(s.graph.edge_count(), 4);
    }

    #[test]
    fn perturbation_is_seeded_and_bounded() {
        let g = theta();
        let p1 = g.perturb_to_generic(1e-3, 7).unwrap();
        let p2 = g.perturb_to_generic(1e-3, 7).unwrap();
        assert_eq!(p1, p2);
        for (a, b) in g.edges().iter().zip(p1.edges()) {
            assert!(b.length >= a.length && b.length - a.length <= 1e-3 * g.max_edge_length());
        }
        let tiny = g.perturb_to_generic(1e-300, 3).unwrap();
        assert_eq!(tiny, g);
        assert!(g.perturb_to_generic(0.0, 1).is_err());
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let g = theta();
        let back = MetricGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"vertices":["a"],"edges":[{"id":"l","u":"a","v":"a","length":-1}]}"#;
        assert!(matches!(MetricGraph::from_json(bad), Err(Error::NonPositiveLength(_))));
        let unknown = r#"{"vertices":["a"],"edges":[{"id":"l","u":"a","v":"b","length":1}]}"#;
        assert!(matches!(MetricGraph::from_json(unknown), Err(Error::UnknownVertex(_))));
    }
}
