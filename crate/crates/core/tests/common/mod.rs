//! Slow, independent reference computations used by the integration tests.
#![allow(dead_code)]

use mgtopo::bottleneck::GroundMetric;
use mgtopo::geodesic::distances_from;
use mgtopo::{Diagram, DiagramPoint, GraphPoint, MetricGraph};
use rand::Rng;

/// Minimum over every matching (each point to a distinct partner or to the
/// diagonal) of the largest matched cost.
pub fn exhaustive_bottleneck(d1: &[DiagramPoint], d2: &[DiagramPoint], ground: &impl GroundMetric) -> f64 {
    fn go(
        i: usize,
        d1: &[DiagramPoint],
        d2: &[DiagramPoint],
        used: &mut [bool],
        g: &impl GroundMetric,
        acc: f64,
    ) -> f64 {
        if i == d1.len() {
            return d2
                .iter()
                .zip(used.iter())
                .filter(|(_, u)| !**u)
                .map(|(q, _)| g.to_diagonal(*q))
                .fold(acc, f64::max);
        }
        let mut best = go(i + 1, d1, d2, used, g, acc.max(g.to_diagonal(d1[i])));
        for j in 0..d2.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(go(i + 1, d1, d2, used, g, acc.max(g.distance(d1[i], d2[j]))));
                used[j] = false;
            }
        }
        best
    }
    go(0, d1, d2, &mut vec![false; d2.len()], ground, 0.0)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
        a != b
    }
}

/// Sorted length sequence of a minimum-weight basis of the cycle space,
/// found by enumerating the whole space (at most ~16 independent cycles).
pub fn brute_force_loop_lengths(g: &MetricGraph) -> Vec<f64> {
    let m = g.edge_count();
    assert!(m <= 64);
    let mut uf = UnionFind::new(g.vertex_count());
    let mut tree = vec![false; m];
    for (e, edge) in g.edges().iter().enumerate() {
        tree[e] = uf.union(edge.u, edge.v);
    }
    // Fundamental cycle of each non-tree edge: the edge plus the tree path
    // between its ends, found by pruning leaves of tree + edge.
    let mut basis: Vec<u64> = Vec::new();
    for e in (0..m).filter(|&e| !tree[e]) {
        let mut alive: Vec<bool> = (0..m).map(|f| tree[f] || f == e).collect();
        loop {
            let mut deg = vec![0usize; g.vertex_count()];
            for f in (0..m).filter(|&f| alive[f]) {
                deg[g.edge(f).u] += 1;
                deg[g.edge(f).v] += 1;
            }
            let leafy: Vec<usize> = (0..m)
                .filter(|&f| alive[f] && f != e && (deg[g.edge(f).u] == 1 || deg[g.edge(f).v] == 1))
                .collect();
            if leafy.is_empty() {
                break;
            }
            for f in leafy {
                alive[f] = false;
            }
        }
        basis.push((0..m).filter(|&f| alive[f]).fold(0u64, |acc, f| acc | 1 << f));
    }
    let k = basis.len();
    assert!(k <= 16);
    let weight = |mask: u64| {
        (0..m)
            .filter(|&f| mask >> f & 1 == 1)
            .map(|f| g.edge(f).length)
            .sum::<f64>()
    };
    let mut elements: Vec<(f64, u64)> = (1u32..1 << k)
        .map(|c| {
            let mask = (0..k).filter(|&i| c >> i & 1 == 1).fold(0u64, |acc, i| acc ^ basis[i]);
            (weight(mask), mask)
        })
        .collect();
    elements.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reduced: Vec<u64> = Vec::new();
    let mut out = Vec::new();
    for (w, mut v) in elements {
        for r in &reduced {
            v = v.min(v ^ r);
        }
        if v != 0 {
            reduced.push(v);
            reduced.sort_unstable_by(|a, b| b.cmp(a));
            out.push(w);
        }
        if out.len() == k {
            break;
        }
    }
    out
}

/// One-dimensional extended persistence diagram from the rank function
/// `C(a, b) = #{(p, q) : p <= a, q <= b}`, which for a graph equals
/// `dim Z(K_{<=b}) - dim Z(K_{<=b} ∩ K^{>a})` with `Z` the cycle space.
/// Uses only component counting.
pub fn rank_function_diagram(g: &MetricGraph, base: GraphPoint) -> Vec<(f64, f64)> {
    let dist = distances_from(g, base).unwrap();
    let mut values: Vec<f64> = dist.clone();
    let mut segments: Vec<(usize, usize, f64)> = Vec::new();
    for (e, edge) in g.edges().iter().enumerate() {
        match base {
            GraphPoint::Interior { edge: be, offset } if be == e => {
                let b = values.len();
                values.push(0.0);
                segments.push((edge.u, b, offset));
                segments.push((b, edge.v, edge.length - offset));
            }
            _ => segments.push((edge.u, edge.v, edge.length)),
        }
    }
    let tol = 1e-9 * g.total_length();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (a, b, l) in segments {
        let (fa, fb) = (values[a], values[b]);
        let x = (fb - fa + l) / 2.0;
        if x > tol && x < l - tol {
            let m = values.len();
            values.push((fa + fb + l) / 2.0);
            edges.push((a, m));
            edges.push((m, b));
        } else {
            edges.push((a, b));
        }
    }
    let n = values.len();
    let dim_z = |keep_v: &dyn Fn(f64) -> bool, keep_e: &dyn Fn(f64, f64) -> bool| -> i64 {
        let mut uf = UnionFind::new(n);
        let nv = values.iter().filter(|v| keep_v(**v)).count() as i64;
        let mut ne = 0i64;
        let mut merges = 0i64;
        for &(u, v) in &edges {
            let (lo, hi) = (values[u].min(values[v]), values[u].max(values[v]));
            if keep_e(lo, hi) {
                ne += 1;
                if uf.union(u, v) {
                    merges += 1;
                }
            }
        }
        let components = nv - merges;
        ne - nv + components
    };
    let count = |a: f64, b: f64| -> i64 {
        dim_z(&|v| v <= b, &|_, hi| hi <= b) - dim_z(&|v| v > a && v <= b, &|lo, hi| hi <= b && lo > a)
    };
    let mut grid = values.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut c = vec![vec![0i64; grid.len() + 1]; grid.len() + 1];
    for i in 0..grid.len() {
        for j in 0..grid.len() {
            c[i + 1][j + 1] = count(grid[i], grid[j]);
        }
    }
    let mut out = Vec::new();
    for i in 1..=grid.len() {
        for j in 1..=grid.len() {
            let mu = c[i][j] - c[i - 1][j] - c[i][j - 1] + c[i - 1][j - 1];
            assert!(mu >= 0, "negative multiplicity");
            for _ in 0..mu {
                out.push((grid[i - 1], grid[j - 1]));
            }
        }
    }
    out
}

/// All-pairs shortest paths between vertices by Floyd-Warshall.
pub fn floyd_warshall(g: &MetricGraph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for e in g.edges() {
        let l = d[e.u][e.v].min(e.length);
        d[e.u][e.v] = l;
        d[e.v][e.u] = l;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// A vertex with probability 1/4, otherwise a uniform interior point of a
/// uniform edge.
pub fn random_point(g: &MetricGraph, rng: &mut impl Rng) -> GraphPoint {
    if g.edge_count() == 0 || rng.gen_bool(0.25) {
        return GraphPoint::Vertex(rng.gen_range(0..g.vertex_count()));
    }
    let e = rng.gen_range(0..g.edge_count());
    let l = g.edge(e).length;
    g.point_on_edge(e, rng.gen_range(0.01 * l..0.99 * l)).unwrap()
}

pub fn pairs(d: &Diagram) -> Vec<(f64, f64)> {
    d.points().iter().map(|p| (p.birth, p.death)).collect()
}

/// Multiset equality of point lists within `tol` per coordinate.
pub fn same_points(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
    Diagram::from_pairs(a.iter().copied()).multiset_eq_within(&Diagram::from_pairs(b.iter().copied()), tol)
}
