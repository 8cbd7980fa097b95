//! Geodesic distances on the geometric realization of a metric graph.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::graph::{GraphPoint, MetricGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Multi-source Dijkstra over the vertices of `g`. Self-loops never shorten
/// a path and are skipped.
pub(crate) fn dijkstra(g: &MetricGraph, sources: &[(usize, f64)]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    for &(v, d) in sources {
        if d < dist[v] {
            dist[v] = d;
            heap.push(Reverse((Key(d), v)));
        }
    }
    while let Some(Reverse((Key(d), x))) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for &e in g.incident(x) {
            let edge = g.edge(e);
            if edge.is_loop() {
                continue;
            }
            let y = edge.other(x);
            let nd = d + edge.length;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(Reverse((Key(nd), y)));
            }
        }
    }
    dist
}

/// Vertices a point reaches directly, with the distance along its edge.
fn attachments(g: &MetricGraph, p: GraphPoint) -> Vec<(usize, f64)> {
    match p {
        GraphPoint::Vertex(v) => vec![(v, 0.0)],
        GraphPoint::Interior { edge, offset } => {
            let e = g.edge(edge);
            if e.is_loop() {
                vec![(e.u, offset.min(e.length - offset))]
            } else {
                vec![(e.u, offset), (e.v, e.length - offset)]
            }
        }
    }
}

/// Geodesic distance from `p` to every vertex of `g`.
pub fn distances_from(g: &MetricGraph, p: GraphPoint) -> Result<Vec<f64>> {
    let p = g.check_point(p)?;
    Ok(dijkstra(g, &attachments(g, p)))
}

pub fn geodesic_distance(g: &MetricGraph, p: GraphPoint, q: GraphPoint) -> Result<f64> {
    let p = g.check_point(p)?;
    let q = g.check_point(q)?;
    if p == q {
        return Ok(0.0);
    }
    let dist = dijkstra(g, &attachments(g, p));
    let mut best = attachments(g, q)
        .into_iter()
        .map(|(v, d)| dist[v] + d)
        .fold(f64::INFINITY, f64::min);
    if let (GraphPoint::Interior { edge: ep, offset: xp }, GraphPoint::Interior { edge: eq, offset: xq }) = (p, q) {
        if ep == eq {
            best = best.min((xp - xq).abs());
        }
    }
    Ok(best)
}

/// Location and value of the maximum of `f` strictly inside an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorMax {
    /// Measured from the edge's `u` endpoint.
    pub offset: f64,
    pub value: f64,
}

/// The geodesic distance function `f(x) = d(base, x)`, stored on a copy of
/// the graph in which the base point has been promoted to a vertex.
///
/// On every edge `(u, w, L)`, `f(x) = min(f(u) + x, f(w) + L - x)`, so it has
/// at most one interior local maximum.
#[derive(Debug, Clone)]
pub struct GeodesicField {
    graph: MetricGraph,
    base_point: GraphPoint,
    base: usize,
    edge_origin: Vec<usize>,
    original_vertices: usize,
    values: Vec<f64>,
    maxima: Vec<Option<InteriorMax>>,
    tolerance: f64,
}

pub fn geodesic_field(g: &MetricGraph, base: GraphPoint) -> Result<GeodesicField> {
    let base_point = g.check_point(base)?;
    let (graph, base, edge_origin) = match base_point {
        GraphPoint::Vertex(v) => (g.clone(), v, (0..g.edge_count()).collect()),
        GraphPoint::Interior { .. } => {
            let sub = g.subdivide(&[base_point])?;
            (sub.graph, sub.point_vertices[0], sub.edge_origin)
        }
    };
    let values = dijkstra(&graph, &[(base, 0.0)]);
    let tolerance = g.tie_tolerance();
    let maxima = graph
        .edges()
        .iter()
        .map(|e| {
            let offset = (values[e.v] - values[e.u] + e.length) / 2.0;
            (offset > tolerance && offset < e.length - tolerance).then(|| InteriorMax {
                offset,
                value: (values[e.u] + values[e.v] + e.length) / 2.0,
            })
        })
        .collect();
    Ok(GeodesicField {
        graph,
        base_point,
        base,
        edge_origin,
        original_vertices: g.vertex_count(),
        values,
        maxima,
        tolerance,
    })
}

impl GeodesicField {
    /// The graph with the base point promoted to a vertex.
    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn base_point(&self) -> GraphPoint {
        self.base_point
    }

    pub fn base_vertex(&self) -> usize {
        self.base
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn interior_max(&self, e: usize) -> Option<InteriorMax> {
        self.maxima[e]
    }

    pub fn interior_maxima(&self) -> &[Option<InteriorMax>] {
        &self.maxima
    }

    /// Largest value of `f` on the closed edge `e` of the promoted graph.
    pub fn edge_max(&self, e: usize) -> f64 {
        let edge = self.graph.edge(e);
        match self.maxima[e] {
            Some(m) => m.value,
            None => self.values[edge.u].max(self.values[edge.v]),
        }
    }

    /// Smallest value of `f` on the closed edge `e`; `f` is concave along an
    /// edge so this is attained at an endpoint.
    pub fn edge_min(&self, e: usize) -> f64 {
        let edge = self.graph.edge(e);
        self.values[edge.u].min(self.values[edge.v])
    }

    /// Index of the original edge an edge of the promoted graph came from.
    pub fn edge_origin(&self, e: usize) -> usize {
        self.edge_origin[e]
    }

    /// Edges of the promoted graph that make up original edge `e`.
    pub fn pieces(&self, original: usize) -> impl Iterator<Item = usize> + '_ {
        self.edge_origin
            .iter()
            .enumerate()
            .filter(move |(_, &o)| o == original)
            .map(|(i, _)| i)
    }

    /// The original vertex a vertex of the promoted graph corresponds to, or
    /// `None` for the promoted base point.
    pub fn original_vertex(&self, v: usize) -> Option<usize> {
        (v < self.original_vertices).then_some(v)
    }

    /// Shortest path tree rooted at the base. Ties are broken towards the
    /// lowest edge index, and flagged in [`ShortestPathTree::generic`].
    pub fn shortest_path_tree(&self) -> ShortestPathTree {
        let (parent_edge, generic) = tight_parents(&self.graph, &self.values, self.base, self.tolerance);
        let mut tree_edges: Vec<usize> = parent_edge.iter().flatten().copied().collect();
        tree_edges.sort_unstable();
        ShortestPathTree {
            root: self.base,
            tree_edges,
            parent_edge,
            generic,
            edge_count: self.graph.edge_count(),
        }
    }
}

/// Picks, for every non-root vertex, the lowest-indexed edge on which it is
/// reached by a shortest path. Returns `false` alongside when some vertex has
/// two or more such edges.
pub(crate) fn tight_parents(g: &MetricGraph, dist: &[f64], root: usize, tol: f64) -> (Vec<Option<usize>>, bool) {
    let mut generic = true;
    let parents = (0..g.vertex_count())
        .map(|w| {
            if w == root {
                return None;
            }
            let mut tight = g.incident(w).iter().copied().filter(|&e| {
                let edge = g.edge(e);
                if edge.is_loop() {
                    return false;
                }
                let u = edge.other(w);
                dist[u] < dist[w] && (dist[u] + edge.length - dist[w]).abs() <= tol
            });
            let first = tight.next();
            if tight.next().is_some() {
                generic = false;
            }
            first
        })
        .collect();
    (parents, generic)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPathTree {
    pub root: usize,
    /// Sorted edge indices of the tree, in the promoted graph.
    pub tree_edges: Vec<usize>,
    /// Edge to the parent for every vertex, `None` at the root.
    pub parent_edge: Vec<Option<usize>>,
    /// `false` when some vertex is reached by two shortest paths.
    pub generic: bool,
    edge_count: usize,
}

impl ShortestPathTree {
    pub fn non_tree_edges(&self) -> Vec<usize> {
        (0..self.edge_count)
            .filter(|e| self.tree_edges.binary_search(e).is_err())
            .collect()
    }
}

pub fn shortest_path_tree(g: &MetricGraph, base: GraphPoint) -> Result<ShortestPathTree> {
    Ok(geodesic_field(g, base)?.shortest_path_tree())
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

    fn circle(len: f64) -> MetricGraph {
        let mut g = MetricGraph::new();
        let o = g.add_vertex("o").unwrap();
        g.add_edge("c", o, o, len).unwrap();
        g
    }

    /// Loop of length `2s` at `j`, tail of length `tail` from `j` to `tip`.
    fn loop_with_tail(s: f64, tail: f64) -> MetricGraph {
        let mut g = MetricGraph::new();
        let tip = g.add_vertex("tip").unwrap();
        let j = g.add_vertex("j").unwrap();
        g.add_edge("tail", tip, j, tail).unwrap();
        g.add_edge("loop", j, j, 2.0 * s).unwrap();
        g
    }

    #[test]
    fn distance_to_self_is_zero() {
        let g = theta();
        let p = GraphPoint::Interior { edge: 2, offset: 0.7 };
        assert_eq!(geodesic_distance(&g, p, p).unwrap(), 0.0);
    }

    #[test]
    fn antipodal_points_on_a_circle() {
        let g = circle(6.0);
        let p = GraphPoint::Interior { edge: 0, offset: 1.0 };
        let q = GraphPoint::Interior { edge: 0, offset: 4.0 };
        assert_eq!(geodesic_distance(&g, p, q).unwrap(), 3.0);
        assert_eq!(geodesic_distance(&g, p, GraphPoint::Vertex(0)).unwrap(), 1.0);
        let r = GraphPoint::Interior { edge: 0, offset: 5.5 };
        assert_eq!(geodesic_distance(&g, p, r).unwrap(), 1.5);
    }

    #[test]
    fn theta_vertices_are_one_apart() {
        let g = theta();
        assert_eq!(
            geodesic_distance(&g, GraphPoint::Vertex(0), GraphPoint::Vertex(1)).unwrap(),
            1.0
        );
        // Middle of the length-3 edge: 1.5 either way along it.
        let m = GraphPoint::Interior { edge: 2, offset: 1.5 };
        assert_eq!(geodesic_distance(&g, m, GraphPoint::Vertex(0)).unwrap(), 1.5);
    }

    #[test]
    fn invalid_points_are_errors() {
        let g = theta();
        assert!(geodesic_distance(&g, GraphPoint::Vertex(9), GraphPoint::Vertex(0)).is_err());
        let bad = GraphPoint::Interior { edge: 0, offset: 3.0 };
        assert!(geodesic_field(&g, bad).is_err());
    }

    #[test]
    fn bouquet_field_at_wedge() {
        let f = geodesic_field(&circle(4.0), GraphPoint::Vertex(0)).unwrap();
        assert_eq!(f.value(0), 0.0);
        assert_eq!(
            f.interior_max(0),
            Some(InteriorMax {
                offset: 2.0,
                value: 2.0
            })
        );
    }

    #[test]
    fn path_from_an_end_has_no_interior_maxima() {
        let mut g = MetricGraph::new();
        for i in 0..4 {
            g.add_vertex(format!("p{i}")).unwrap();
        }
        for i in 0..3 {
            g.add_edge(format!("s{i}"), i, i + 1, 1.0 + i as f64).unwrap();
        }
        let f = geodesic_field(&g, GraphPoint::Vertex(0)).unwrap();
        assert!(f.interior_maxima().iter().all(Option::is_none));
        assert_eq!(f.values(), &[0.0, 1.0, 3.0, 6.0]);
    }

    #[test]
    fn loop_with_tail_max_sits_opposite_the_junction() {
        // Sublevel sets from the tip reach the junction at L and close the
        // loop at L + s, halfway around.
        let f = geodesic_field(&loop_with_tail(1.5, 2.0), GraphPoint::Vertex(0)).unwrap();
        assert_eq!(f.value(1), 2.0);
        assert_eq!(
            f.interior_max(1),
            Some(InteriorMax {
                offset: 1.5,
                value: 3.5
            })
        );
        assert_eq!(f.interior_max(0), None);
    }

    #[test]
    fn interior_base_is_promoted() {
        let g = theta();
        let f = geodesic_field(&g, GraphPoint::Interior { edge: 1, offset: 0.5 }).unwrap();
        assert_eq!(f.graph().vertex_count(), 3);
        assert_eq!(f.graph().edge_count(), 4);
        assert_eq!(f.value(f.base_vertex()), 0.0);
        assert_eq!(f.original_vertex(f.base_vertex()), None);
        assert_eq!(f.pieces(1).count(), 2);
        assert_eq!(f.value(0), 0.5);
        assert_eq!(f.value(1), 1.5);
    }

    #[test]
    fn tree_input_keeps_every_edge() {
        let mut g = MetricGraph::new();
        for i in 0..4 {
            g.add_vertex(format!("v{i}")).unwrap();
        }
        g.add_edge("a", 0, 1, 1.0).unwrap();
        g.add_edge("b", 1, 2, 2.0).unwrap();
        g.add_edge("c", 1, 3, 0.5).unwrap();
        let t = shortest_path_tree(&g, GraphPoint::Vertex(2)).unwrap();
        assert_eq!(t.tree_edges, vec![0, 1, 2]);
        assert!(t.generic);
    }

    #[test]
    fn bouquet_tree_is_empty() {
        let mut g = MetricGraph::new();
        let o = g.add_vertex("o").unwrap();
        for k in 0..3 {
            g.add_edge(format!("l{k}"), o, o, 1.0 + k as f64).unwrap();
        }
        let t = shortest_path_tree(&g, GraphPoint::Vertex(0)).unwrap();
        assert!(t.tree_edges.is_empty());
        assert_eq!(t.non_tree_edges().len(), 3);
    }

    #[test]
    fn theta_tree_uses_the_short_edge() {
        let t = shortest_path_tree(&theta(), GraphPoint::Vertex(0)).unwrap();
        assert_eq!(t.tree_edges, vec![0]);
        assert_eq!(t.non_tree_edges(), vec![1, 2]);
        assert!(t.generic);
    }

    #[test]
    fn ties_clear_the_generic_flag() {
        // Square a-b-c-d-a with unit sides: c is reached two ways from a.
        let mut g = MetricGraph::new();
        for v in ["a", "b", "c", "d"] {
            g.add_vertex(v).unwrap();
        }
        for (i, (u, v)) in [(0, 1), (1, 2), (2, 3), (3, 0)].into_iter().enumerate() {
            g.add_edge(format!("s{i}"), u, v, 1.0).unwrap();
        }
        let t = shortest_path_tree(&g, GraphPoint::Vertex(0)).unwrap();
        assert!(!t.generic);
        assert_eq!(t.tree_edges.len(), 3);
        assert_eq!(t.parent_edge[2], Some(1));
    }
}
