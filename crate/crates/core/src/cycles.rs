//! Shortest systems of loops.
//!
//! A shortest system of loops is a cycle basis whose sorted length sequence is
//! lexicographically minimal, i.e. a minimum-weight cycle basis over GF(2).
//! Candidates follow Horton: for every root `r` and every non-tree edge
//! `(x, y)` of the shortest path tree at `r`, the fundamental cycle
//! `P(r, x) + (x, y) + P(y, r)`, plus every self-loop. Sorted by length and
//! kept greedily while independent, they yield a minimum basis.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesic::{dijkstra, tight_parents, GeodesicField};
use crate::graph::MetricGraph;

/// A closed walk: starting at `start`, each step traverses an edge forwards
/// (`u` to `v`) when the flag is set, backwards otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub start: usize,
    pub steps: Vec<(usize, bool)>,
    pub length: f64,
}

impl Cycle {
    /// Checks that the steps chain up and return to `start`, and computes the length.
    pub fn new(g: &MetricGraph, start: usize, steps: Vec<(usize, bool)>) -> Result<Cycle> {
        if start >= g.vertex_count() {
            return Err(Error::NotAClosedWalk(format!("start vertex #{start} does not exist")));
        }
        if steps.is_empty() {
            return Err(Error::NotAClosedWalk("empty walk".into()));
        }
        let mut at = start;
        let mut length = 0.0;
        for &(e, forward) in &steps {
            let edge = g
                .edges()
                .get(e)
                .ok_or_else(|| Error::NotAClosedWalk(format!("edge #{e} does not exist")))?;
            let (from, to) = if forward { (edge.u, edge.v) } else { (edge.v, edge.u) };
            if from != at {
                return Err(Error::NotAClosedWalk(format!(
                    "edge `{}` does not leave vertex `{}`",
                    edge.id,
                    g.vertex_id(at)
                )));
            }
            at = to;
            length += edge.length;
        }
        if at != start {
            return Err(Error::NotAClosedWalk(format!(
                "walk ends at `{}`, not `{}`",
                g.vertex_id(at),
                g.vertex_id(start)
            )));
        }
        Ok(Cycle { start, steps, length })
    }

    /// Orders an edge set in which every vertex has even degree two (a simple
    /// cycle) into a closed walk.
    pub fn from_edge_set(g: &MetricGraph, edges: &[usize]) -> Result<Cycle> {
        let first = *edges
            .first()
            .ok_or_else(|| Error::NotAClosedWalk("empty edge set".into()))?;
        let start = g.edge(first).u;
        let mut remaining: Vec<usize> = edges.to_vec();
        let mut steps = Vec::with_capacity(edges.len());
        let mut at = start;
        while !remaining.is_empty() {
            let pos = remaining
                .iter()
                .position(|&e| g.edge(e).u == at || g.edge(e).v == at)
                .ok_or_else(|| Error::NotAClosedWalk("edge set is not a single cycle".into()))?;
            let e = remaining.swap_remove(pos);
            let edge = g.edge(e);
            let forward = edge.u == at;
            at = if forward { edge.v } else { edge.u };
            steps.push((e, forward));
        }
        Cycle::new(g, start, steps)
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|&(e, _)| e)
    }

    /// The cycle as a GF(2) vector over edges.
    pub fn edge_set(&self, edge_count: usize) -> EdgeSet {
        let mut s = EdgeSet::new(edge_count);
        for e in self.edges() {
            s.toggle(e);
        }
        s
    }

    pub fn edge_ids<'a>(&'a self, g: &'a MetricGraph) -> Vec<&'a str> {
        self.edges().map(|e| g.edge(e).id.as_str()).collect()
    }
}

/// Bit vector over the edges of a graph; addition is symmetric difference.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet {
    words: Vec<u64>,
}

impl EdgeSet {
    pub fn new(edge_count: usize) -> Self {
        EdgeSet {
            words: vec![0; edge_count.div_ceil(64)],
        }
    }

    pub fn toggle(&mut self, e: usize) {
        self.words[e / 64] ^= 1 << (e % 64);
    }

    pub fn contains(&self, e: usize) -> bool {
        self.words[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn add(&mut self, other: &EdgeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn highest(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words
            .iter()
            .enumerate()
            .flat_map(|(i, &w)| (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b))
    }
}

/// Incremental GF(2) row echelon form keyed by highest set bit.
#[derive(Debug, Default)]
pub struct Gf2Basis {
    rows: HashMap<usize, EdgeSet>,
}

impl Gf2Basis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is independent of the current rows.
    pub fn insert(&mut self, mut v: EdgeSet) -> bool {
        while let Some(h) = v.highest() {
            match self.rows.get(&h) {
                Some(row) => v.add(row),
                None => {
                    self.rows.insert(h, v);
                    return true;
                }
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopSystem {
    /// Ordered by non-decreasing length.
    pub loops: Vec<Cycle>,
}

impl LoopSystem {
    /// Loop lengths `2s_1 <= ... <= 2s_n`.
    pub fn lengths(&self) -> Vec<f64> {
        self.loops.iter().map(|c| c.length).collect()
    }

    /// Half lengths `s_1 <= ... <= s_n`.
    pub fn half_lengths(&self) -> Vec<f64> {
        self.loops.iter().map(|c| c.length / 2.0).collect()
    }

    pub fn len(&self) -> usize {
        self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loops.is_empty()
    }

    pub fn to_json(&self, g: &MetricGraph) -> serde_json::Value {
        #[derive(Serialize)]
        struct Entry<'a> {
            edges: Vec<&'a str>,
            length: f64,
        }
        let entries: Vec<Entry> = self
            .loops
            .iter()
            .map(|c| Entry {
                edges: c.edge_ids(g),
                length: c.length,
            })
            .collect();
        serde_json::to_value(entries).expect("loop entries serialize")
    }
}

pub fn first_betti(g: &MetricGraph) -> usize {
    g.first_betti()
}

/// Fundamental cycles of the shortest path tree rooted at `root`.
fn candidates_from_root(g: &MetricGraph, root: usize) -> Vec<Cycle> {
    let dist = dijkstra(g, &[(root, 0.0)]);
    let (parent, _) = tight_parents(g, &dist, root, g.tie_tolerance());
    let mut depth = vec![usize::MAX; g.vertex_count()];
    depth[root] = 0;
    // Parents are strictly closer to the root, so increasing distance is a
    // valid processing order.
    let mut order: Vec<usize> = (0..g.vertex_count()).collect();
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]));
    for &v in &order {
        if let Some(e) = parent[v] {
            depth[v] = depth[g.edge(e).other(v)] + 1;
        }
    }
    let is_tree: BTreeSet<usize> = parent.iter().flatten().copied().collect();

    let mut out = Vec::new();
    for (ei, edge) in g.edges().iter().enumerate() {
        if edge.is_loop() || is_tree.contains(&ei) {
            continue;
        }
        // Walk x and y up to their lowest common ancestor.
        let (mut a, mut b) = (edge.u, edge.v);
        let mut up_from_u = Vec::new();
        let mut up_from_v = Vec::new();
        while a != b {
            if depth[a] >= depth[b] {
                let e = parent[a].expect("non-root vertex has a parent");
                up_from_u.push(e);
                a = g.edge(e).other(a);
            } else {
                let e = parent[b].expect("non-root vertex has a parent");
                up_from_v.push(e);
                b = g.edge(e).other(b);
            }
        }
        // Walk: u -> (edge) -> v -> up to lca -> down to u.
        let mut steps = vec![(ei, true)];
        let mut at = edge.v;
        for &e in up_from_v.iter().chain(up_from_u.iter().rev()) {
            let te = g.edge(e);
            let forward = te.u == at;
            at = if forward { te.v } else { te.u };
            steps.push((e, forward));
        }
        let cycle = Cycle::new(g, edge.u, steps).expect("fundamental cycles are closed");
        out.push(cycle);
    }
    out
}

/// Minimum-weight cycle basis of a connected graph, ordered by length.
pub fn shortest_loop_system(g: &MetricGraph) -> LoopSystem {
    let n = g.first_betti();
    if n == 0 {
        return LoopSystem { loops: Vec::new() };
    }
    let m = g.edge_count();
    let mut pool: Vec<Cycle> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_loop())
        .map(|(i, e)| Cycle {
            start: e.u,
            steps: vec![(i, true)],
            length: e.length,
        })
        .collect();
    let per_root: Vec<Vec<Cycle>> = (0..g.vertex_count())
        .into_par_iter()
        .map(|r| candidates_from_root(g, r))
        .collect();
    pool.extend(per_root.into_iter().flatten());

    let mut keyed: Vec<(Vec<usize>, Cycle)> = pool
        .into_iter()
        .map(|c| {
            let mut key: Vec<usize> = c.edges().collect();
            key.sort_unstable();
            (key, c)
        })
        .collect();
    keyed.sort_by(|(ka, a), (kb, b)| a.length.total_cmp(&b.length).then_with(|| ka.cmp(kb)));
    keyed.dedup_by(|(ka, _), (kb, _)| ka == kb);

    let mut basis = Gf2Basis::new();
    let mut loops = Vec::with_capacity(n);
    for (_, c) in keyed {
        if basis.insert(c.edge_set(m)) {
            loops.push(c);
            if loops.len() == n {
                break;
            }
        }
    }
    LoopSystem { loops }
}

/// Length and extreme values of a geodesic field along a cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleMetrics {
    pub length: f64,
    pub highest: f64,
    pub lowest: f64,
    pub height: f64,
}

/// Measures `cycle` (a closed walk in `g`) against a field computed on `g`.
pub fn cycle_metrics(g: &MetricGraph, field: &GeodesicField, cycle: &Cycle) -> Result<CycleMetrics> {
    let checked = Cycle::new(g, cycle.start, cycle.steps.clone())?;
    let mut highest = f64::NEG_INFINITY;
    let mut lowest = f64::INFINITY;
    for e in checked.edges() {
        for piece in field.pieces(e) {
            highest = highest.max(field.edge_max(piece));
            lowest = lowest.min(field.edge_min(piece));
        }
    }
    Ok(CycleMetrics {
        length: checked.length,
        highest,
        lowest,
        height: highest - lowest,
    })
}
