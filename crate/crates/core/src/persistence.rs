//! One-dimensional extended persistence of geodesic distance functions.
//!
//! The base point is promoted to a vertex and every edge is split at its
//! interior maximum, so the distance function is linear on each edge and its
//! lower-star filtration is exact. The extended filtration runs the ascending
//! lower-star pass over `K`, then a cone vertex `w`, then the cones `w * σ`
//! in descending upper-star order. Reducing the coned boundary matrix over
//! GF(2), a 1-cycle created by an ascending edge and killed by a cone
//! triangle `w * e'` is an extended pair of dimension one: it is born at the
//! highest value on the cycle and dies at the lowest. Points are reported as
//! `(low, high)`.

use std::cmp::Ordering;

use crate::diagram::{Diagram, DiagramPoint, Provenance};
use crate::error::Result;
use crate::generators::TreeOfLoopsSpec;
use crate::geodesic::{distances_from, geodesic_field};
use crate::graph::{GraphPoint, MetricGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Vertex(usize),
    Edge(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexEdge {
    pub u: usize,
    pub v: usize,
    /// Lower-star value: the larger endpoint value.
    pub ascending_value: f64,
    /// Upper-star value: the smaller endpoint value.
    pub descending_value: f64,
    /// Index of the input-graph edge this edge is a piece of.
    pub origin: usize,
}

#[derive(Debug, Clone)]
pub struct FilteredComplex {
    pub vertex_ids: Vec<String>,
    pub vertex_values: Vec<f64>,
    pub edges: Vec<ComplexEdge>,
    /// Lower-star order: by value, vertices before edges, then by index.
    pub ascending: Vec<Cell>,
    /// Upper-star order: by decreasing value, vertices before edges, then by index.
    pub descending: Vec<Cell>,
    pub base: usize,
    /// Vertices of the graph with the base promoted, before splitting at maxima.
    pub node_count: usize,
    origin_ids: Vec<String>,
}

impl FilteredComplex {
    pub fn ascending_value(&self, c: Cell) -> f64 {
        match c {
            Cell::Vertex(v) => self.vertex_values[v],
            Cell::Edge(e) => self.edges[e].ascending_value,
        }
    }

    pub fn descending_value(&self, c: Cell) -> f64 {
        match c {
            Cell::Vertex(v) => self.vertex_values[v],
            Cell::Edge(e) => self.edges[e].descending_value,
        }
    }

    pub fn origin_edge_id(&self, e: usize) -> &str {
        &self.origin_ids[self.edges[e].origin]
    }

    /// Reduces the coned boundary matrix and returns the extended pairs of
    /// dimension one.
    pub fn extended_diagram_1d(&self) -> Diagram {
        let nv = self.vertex_values.len();
        let ne = self.edges.len();

        // Global positions: 0 is the cone vertex, then the ascending pass,
        // then the cones of the descending pass.
        let mut asc_edge_pos = vec![0usize; ne];
        let mut asc_rank = vec![0usize; ne];
        for (rank, &c) in self.ascending.iter().enumerate() {
            if let Cell::Edge(e) = c {
                asc_edge_pos[e] = 1 + rank;
                asc_rank[e] = rank;
            }
        }
        let offset = 1 + self.ascending.len();
        let mut cone_vertex_pos = vec![0usize; nv];
        for (rank, &c) in self.descending.iter().enumerate() {
            if let Cell::Vertex(v) = c {
                cone_vertex_pos[v] = offset + rank;
            }
        }

        // Only the cone triangles have boundaries of dimension one, and a
        // column is only ever added to columns of its own dimension.
        let total = offset + self.descending.len();
        let mut pivot_owner: Vec<Option<usize>> = vec![None; total];
        let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(ne);
        let mut killers: Vec<(usize, usize)> = Vec::new();

        for (rank, &c) in self.descending.iter().enumerate() {
            let Cell::Edge(e) = c else { continue };
            let edge = &self.edges[e];
            let mut col = vec![asc_edge_pos[e]];
            if edge.u != edge.v {
                col.push(cone_vertex_pos[edge.u]);
                col.push(cone_vertex_pos[edge.v]);
            }
            col.sort_unstable();
            while let Some(&low) = col.last() {
                match pivot_owner[low] {
                    Some(k) => col = symmetric_difference(&col, &reduced[k]),
                    None => {
                        pivot_owner[low] = Some(reduced.len());
                        break;
                    }
                }
            }
            if let Some(&low) = col.last() {
                killers.push((low, rank));
            }
            reduced.push(col);
        }

        let asc_edge_at: Vec<Option<usize>> = {
            let mut v = vec![None; total];
            for e in 0..ne {
                v[asc_edge_pos[e]] = Some(e);
            }
            v
        };

        let mut diagram = Diagram::new();
        for (low, rank) in killers {
            let Some(creator) = asc_edge_at[low] else { continue };
            let Cell::Edge(killer) = self.descending[rank] else {
                unreachable!()
            };
            let high = self.edges[creator].ascending_value;
            let low_value = self.edges[killer].descending_value;
            let k = &self.edges[killer];
            let w = match self.vertex_values[k.u].total_cmp(&self.vertex_values[k.v]) {
                Ordering::Greater => k.v,
                Ordering::Less => k.u,
                Ordering::Equal => k.u.min(k.v),
            };
            diagram.push(
                DiagramPoint::new(low_value.min(high), low_value.max(high)),
                Provenance {
                    edge: Some(self.origin_edge_id(creator).to_string()),
                    vertex: Some(self.vertex_ids[w].clone()),
                    ascending_index: Some(asc_rank[creator]),
                    descending_index: Some(rank),
                },
            );
        }
        diagram.sort();
        diagram
    }
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub fn build_filtration(g: &MetricGraph, base: GraphPoint) -> Result<FilteredComplex> {
    let field = geodesic_field(g, base)?;
    let promoted = field.graph();
    let cuts: Vec<(GraphPoint, f64)> = field
        .interior_maxima()
        .iter()
        .enumerate()
        .filter_map(|(e, m)| {
            m.map(|m| {
                (
                    GraphPoint::Interior {
                        edge: e,
                        offset: m.offset,
                    },
                    m.value,
                )
            })
        })
        .collect();
    let points: Vec<GraphPoint> = cuts.iter().map(|&(p, _)| p).collect();
    let sub = promoted.subdivide(&points)?;

    let mut vertex_values = vec![0.0; sub.graph.vertex_count()];
    vertex_values[..promoted.vertex_count()].copy_from_slice(field.values());
    for (k, &(_, value)) in cuts.iter().enumerate() {
        vertex_values[sub.point_vertices[k]] = value;
    }

    let edges: Vec<ComplexEdge> = sub
        .graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (a, b) = (vertex_values[e.u], vertex_values[e.v]);
            ComplexEdge {
                u: e.u,
                v: e.v,
                ascending_value: a.max(b),
                descending_value: a.min(b),
                origin: field.edge_origin(sub.edge_origin[i]),
            }
        })
        .collect();

    let cells: Vec<Cell> = (0..vertex_values.len())
        .map(Cell::Vertex)
        .chain((0..edges.len()).map(Cell::Edge))
        .collect();
    let rank = |c: &Cell| match *c {
        Cell::Vertex(v) => (0, v),
        Cell::Edge(e) => (1, e),
    };
    let up = |c: &Cell| match *c {
        Cell::Vertex(v) => vertex_values[v],
        Cell::Edge(e) => edges[e].ascending_value,
    };
    let down = |c: &Cell| match *c {
        Cell::Vertex(v) => vertex_values[v],
        Cell::Edge(e) => edges[e].descending_value,
    };
    let mut ascending = cells.clone();
    ascending.sort_by(|a, b| up(a).total_cmp(&up(b)).then(rank(a).cmp(&rank(b))));
    let mut descending = cells;
    descending.sort_by(|a, b| down(b).total_cmp(&down(a)).then(rank(a).cmp(&rank(b))));

    Ok(FilteredComplex {
        vertex_ids: sub.graph.vertex_ids().to_vec(),
        vertex_values,
        edges,
        ascending,
        descending,
        base: field.base_vertex(),
        node_count: promoted.vertex_count(),
        origin_ids: g.edges().iter().map(|e| e.id.clone()).collect(),
    })
}

/// One-dimensional extended persistence diagram of `d(base, .)` on `g`.
pub fn extended_persistence_1d(g: &MetricGraph, base: GraphPoint) -> Result<Diagram> {
    Ok(build_filtration(g, base)?.extended_diagram_1d())
}

/// Closed form for trees of loops: a loop of length `2t` whose nearest point
/// to the base is at distance `p` contributes `(p, p + t)`.
///
/// `base` is a point of the graph realized from `spec`.
pub fn tree_of_loops_diagram(spec: &TreeOfLoopsSpec, base: GraphPoint) -> Result<Diagram> {
    let realized = spec.realize()?;
    let base = realized.graph.check_point(base)?;
    let dist = distances_from(&realized.graph, base)?;
    let mut diagram = Diagram::new();
    for lp in &realized.loops {
        let on_loop = matches!(base, GraphPoint::Interior { edge, .. } if edge == lp.edge);
        let p = if on_loop { 0.0 } else { dist[lp.junction] };
        let t = realized.graph.edge(lp.edge).length / 2.0;
        diagram.push(
            DiagramPoint::new(p, p + t),
            Provenance {
                edge: Some(realized.graph.edge(lp.edge).id.clone()),
                ..Default::default()
            },
        );
    }
    diagram.sort();
    Ok(diagram)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bouquet(lengths: &[f64]) -> MetricGraph {
        let mut g = MetricGraph::new();
        let o = g.add_vertex("o").unwrap();
        for (i, &l) in lengths.iter().enumerate() {
            g.add_edge(format!("l{i}"), o, o, l).unwrap();
        }
        g
    }

    fn loop_with_tail(s: f64, tail: f64) -> MetricGraph {
        let mut g = MetricGraph::new();
        let tip = g.add_vertex("tip").unwrap();
        let j = g.add_vertex("j").unwrap();
        g.add_edge("tail", tip, j, tail).unwrap();
        g.add_edge("loop", j, j, 2.0 * s).unwrap();
        g
    }

    fn pairs(d: &Diagram) -> Vec<(f64, f64)> {
        d.points().iter().map(|p| (p.birth, p.death)).collect()
    }

    #[test]
    fn path_filtration_follows_distance() {
        let mut g = MetricGraph::new();
        for i in 0..3 {
            g.add_vertex(format!("p{i}")).unwrap();
        }
        g.add_edge("a", 0, 1, 1.0).unwrap();
        g.add_edge("b", 1, 2, 2.0).unwrap();
        let fc = build_filtration(&g, GraphPoint::Vertex(0)).unwrap();
        assert_eq!(
            fc.ascending,
            vec![
                Cell::Vertex(0),
                Cell::Vertex(1),
                Cell::Edge(0),
                Cell::Vertex(2),
                Cell::Edge(1)
            ]
        );
        assert_eq!(fc.edges[1].ascending_value, 3.0);
        assert!(extended_persistence_1d(&g, GraphPoint::Vertex(0)).unwrap().is_empty());
    }

    #[test]
    fn bouquet_loop_is_split_at_its_max() {
        let fc = build_filtration(&bouquet(&[3.0]), GraphPoint::Vertex(0)).unwrap();
        assert_eq!(fc.vertex_values, vec![0.0, 1.5]);
        assert_eq!(fc.edges.len(), 2);
        assert!(fc
            .edges
            .iter()
            .all(|e| e.ascending_value == 1.5 && e.descending_value == 0.0));
    }

    #[test]
    fn tail_filtration_has_the_loop_max() {
        let fc = build_filtration(&loop_with_tail(1.5, 2.0), GraphPoint::Vertex(0)).unwrap();
        assert!(fc.vertex_values.contains(&3.5));
        assert_eq!(fc.node_count, 2);
    }

    #[test]
    fn ascending_order_is_monotone_with_faces_first() {
        let fc = build_filtration(&loop_with_tail(1.0, 0.5), GraphPoint::Interior { edge: 1, offset: 0.3 }).unwrap();
        let mut seen_vertex = vec![false; fc.vertex_values.len()];
        let mut last = f64::NEG_INFINITY;
        for &c in &fc.ascending {
            let v = fc.ascending_value(c);
            assert!(v >= last);
            last = v;
            match c {
                Cell::Vertex(x) => seen_vertex[x] = true,
                Cell::Edge(e) => assert!(seen_vertex[fc.edges[e].u] && seen_vertex[fc.edges[e].v]),
            }
        }
    }

    #[test]
    fn bouquet_at_wedge() {
        let d = extended_persistence_1d(&bouquet(&[2.0, 6.0, 4.0]), GraphPoint::Vertex(0)).unwrap();
        assert_eq!(pairs(&d), vec![(0.0, 1.0), (0.0, 2.0), (0.0, 3.0)]);
        let mut edges: Vec<_> = d.provenance().iter().map(|p| p.edge.clone().unwrap()).collect();
        edges.sort();
        assert_eq!(edges, vec!["l0", "l1", "l2"]);
    }

    #[test]
    fn circle_from_any_base() {
        let g = bouquet(&[5.0]);
        for x in [0.0, 0.4, 2.5, 4.9] {
            let base = g.point_on_edge(0, x).unwrap();
            let d = extended_persistence_1d(&g, base).unwrap();
            assert_eq!(pairs(&d), vec![(0.0, 2.5)]);
        }
    }

    #[test]
    fn loop_with_tail_from_tip() {
        let d = extended_persistence_1d(&loop_with_tail(1.5, 2.0), GraphPoint::Vertex(0)).unwrap();
        assert_eq!(pairs(&d), vec![(2.0, 3.5)]);
        assert_eq!(d.provenance()[0].edge.as_deref(), Some("loop"));
        assert_eq!(d.provenance()[0].vertex.as_deref(), Some("j"));
    }

    #[test]
    fn theta_from_a_vertex() {
        // From a: b sits at 1. The length-2 and length-3 edges peak at 1.5
        // and 2; both cycles are born at 0.
        let mut g = MetricGraph::new();
        let a = g.add_vertex("a").unwrap();
        let b = g.add_vertex("b").unwrap();
        for (i, l) in [1.0, 2.0, 3.0].into_iter().enumerate() {
            g.add_edge(format!("e{i}"), a, b, l).unwrap();
        }
        let d = extended_persistence_1d(&g, GraphPoint::Vertex(a)).unwrap();
        assert_eq!(pairs(&d), vec![(0.0, 1.5), (0.0, 2.0)]);
    }

    #[test]
    fn symmetric_difference_merges() {
        assert_eq!(symmetric_difference(&[1, 3, 5], &[3, 4]), vec![1, 4, 5]);
        assert!(symmetric_difference(&[2], &[2]).is_empty());
    }
}
