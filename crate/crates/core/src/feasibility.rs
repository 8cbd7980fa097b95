//! Feasible regions around ideal diagram points, the bipartite feasibility
//! graph, and checks of the inequality between the two graph distances.

use serde::Serialize;

use crate::bottleneck::{bottleneck, yaxis_bottleneck, Ground, Matching};
use crate::cycles::LoopSystem;
use crate::diagram::{Diagram, DiagramPoint};
use crate::distances::{intrinsic_cech_distance, persistence_distortion};
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::matching::{hall_violator, maximum_matching, neighbourhood};

/// `{0 <= z1 <= z2, s <= z2 <= z1 + s}`, the points compatible with `(0, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibleRegion {
    pub s: f64,
}

impl FeasibleRegion {
    pub fn contains(&self, z: DiagramPoint) -> bool {
        in_feasible_region(z, self.s)
    }

    /// Membership with every inequality relaxed by `tol`.
    pub fn contains_within(&self, z: DiagramPoint, tol: f64) -> bool {
        let (z1, z2, s) = (z.birth, z.death, self.s);
        z1 >= -tol && z1 <= z2 + tol && z2 >= s - tol && z2 <= z1 + s + tol
    }
}

pub fn in_feasible_region(z: DiagramPoint, s: f64) -> bool {
    let (z1, z2) = (z.birth, z.death);
    0.0 <= z1 && z1 <= z2 && s <= z2 && z2 <= z1 + s
}

/// `|s - t| <= |z - (0, t)|_1` for `z` in the feasible region of `s`,
/// allowing for rounding in the two sides.
pub fn lemma_distpts_holds(z: DiagramPoint, s: f64, t: f64) -> bool {
    let lhs = (s - t).abs();
    let rhs = z.birth.abs() + (z.death - t).abs();
    let scale = [1.0, s.abs(), t.abs(), z.birth.abs(), z.death.abs()]
        .into_iter()
        .fold(0.0, f64::max);
    lhs <= rhs + 1e-12 * scale
}

/// Bipartite graph between the ideal points `(0, s_i)` and the points of a
/// computed diagram, with an edge when the diagram point lies in the
/// feasible region of `s_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityGraph {
    pub left: Vec<f64>,
    pub right: Vec<DiagramPoint>,
    pub right_edges: Vec<Option<String>>,
    pub adjacency: Vec<Vec<usize>>,
}

impl FeasibilityGraph {
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(&j)
    }
}

/// Region membership is tested with tolerance `tol`, since diagram points
/// frequently sit exactly on a region boundary.
pub fn build_feasibility_graph(loops: &LoopSystem, diagram: &Diagram, tol: f64) -> Result<FeasibilityGraph> {
    let left = loops.half_lengths();
    if left.len() != diagram.len() {
        return Err(Error::SizeMismatch {
            expected: left.len(),
            found: diagram.len(),
        });
    }
    let adjacency = left
        .iter()
        .map(|&s| {
            let region = FeasibleRegion { s };
            (0..diagram.len())
                .filter(|&j| region.contains_within(diagram.points()[j], tol))
                .collect()
        })
        .collect();
    Ok(FeasibilityGraph {
        left,
        right: diagram.points().to_vec(),
        right_edges: diagram.provenance().iter().map(|p| p.edge.clone()).collect(),
        adjacency,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MatchingOutcome {
    /// `(left, right)` pairs covering every left node.
    Perfect(Vec<(usize, usize)>),
    /// Left nodes with fewer neighbours than members.
    HallWitness { subset: Vec<usize>, neighbours: Vec<usize> },
}

impl MatchingOutcome {
    pub fn is_perfect(&self) -> bool {
        matches!(self, MatchingOutcome::Perfect(_))
    }
}

pub fn perfect_matching(fg: &FeasibilityGraph) -> MatchingOutcome {
    let m = maximum_matching(&fg.adjacency, fg.right.len());
    match hall_violator(&fg.adjacency, &m) {
        None => MatchingOutcome::Perfect(
            m.left_to_right
                .iter()
                .enumerate()
                .map(|(l, r)| (l, r.expect("left-perfect")))
                .collect(),
        ),
        Some(subset) => {
            let neighbours = neighbourhood(&fg.adjacency, &subset);
            MatchingOutcome::HallWitness { subset, neighbours }
        }
    }
}

/// Checks Hall's condition on every nonempty subset of left nodes.
pub fn hall_condition_exhaustive(fg: &FeasibilityGraph) -> Result<bool> {
    let n = fg.left.len();
    if n > 20 {
        return Err(Error::InvalidParameter(format!(
            "{n} left nodes is too many to enumerate"
        )));
    }
    Ok((1u32..1 << n).all(|mask| {
        let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        neighbourhood(&fg.adjacency, &subset).len() >= subset.len()
    }))
}

/// Topological shape after dissolving every vertex that just joins two
/// distinct edges: `(vertex count, edges as endpoint pairs)`.
fn collapse_degree_two(g: &MetricGraph) -> (usize, Vec<(usize, usize)>) {
    let mut ends: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    let mut alive = vec![true; ends.len()];
    let mut incident: Vec<Vec<usize>> = (0..g.vertex_count()).map(|v| g.incident(v).to_vec()).collect();
    let mut removed = vec![false; g.vertex_count()];
    let mut changed = true;
    while changed {
        changed = false;
        for w in 0..g.vertex_count() {
            if removed[w] {
                continue;
            }
            incident[w].retain(|&e| alive[e]);
            let [a, b] = incident[w][..] else { continue };
            if a == b || ends[a].0 == ends[a].1 || ends[b].0 == ends[b].1 {
                continue;
            }
            let x = if ends[a].0 == w { ends[a].1 } else { ends[a].0 };
            let y = if ends[b].0 == w { ends[b].1 } else { ends[b].0 };
            alive[b] = false;
            ends[a] = (x, y);
            for &v in &[x, y] {
                incident[v].retain(|&e| e != b);
                if !incident[v].contains(&a) {
                    incident[v].push(a);
                }
            }
            removed[w] = true;
            changed = true;
        }
    }
    let vertices = removed.iter().filter(|r| !**r).count();
    let edges = ends
        .into_iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(e, _)| e)
        .collect();
    (vertices, edges)
}

/// One vertex carrying only self-loops, possibly after subdivision.
pub fn is_bouquet(g: &MetricGraph) -> bool {
    if g.validate().is_err() {
        return false;
    }
    let (vertices, edges) = collapse_degree_two(g);
    vertices == 1 && edges.iter().all(|(u, v)| u == v)
}

/// Connected and every edge lies on at most one cycle, so the graph is a
/// wedge sum of cycles and edges.
pub fn is_tree_of_loops(g: &MetricGraph) -> bool {
    if g.validate().is_err() {
        return false;
    }
    // Spanning tree by BFS; a graph is a cactus iff the fundamental cycles
    // of the non-tree edges are pairwise edge-disjoint.
    let n = g.vertex_count();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut in_tree = vec![false; g.edge_count()];
    depth[0] = 0;
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &e in g.incident(v) {
            let w = g.edge(e).other(v);
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                parent[w] = Some(e);
                in_tree[e] = true;
                queue.push_back(w);
            }
        }
    }
    let mut used = vec![false; g.edge_count()];
    for (e, edge) in g.edges().iter().enumerate() {
        if in_tree[e] || edge.is_loop() {
            continue;
        }
        let (mut a, mut b) = (edge.u, edge.v);
        while a != b {
            if depth[a] < depth[b] {
                std::mem::swap(&mut a, &mut b);
            }
            let pe = parent[a].expect("non-root has a parent");
            if used[pe] {
                return false;
            }
            used[pe] = true;
            a = g.edge(pe).other(a);
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Violation,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Violation => "VIOLATION",
        })
    }
}

/// Outcome of testing `d_IC <= (d_PD estimate + error bound) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Report {
    pub dic: f64,
    pub dpd_estimate: f64,
    pub dpd_error_bound: f64,
    pub delta: f64,
    /// `dic / dpd_estimate`, absent when the estimate is zero.
    pub ratio: Option<f64>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(dic: f64, dpd_estimate: f64, dpd_error_bound: f64, delta: f64) -> Report {
        let verdict = if dic <= 0.5 * (dpd_estimate + dpd_error_bound) {
            Verdict::Pass
        } else {
            Verdict::Violation
        };
        Report {
            dic,
            dpd_estimate,
            dpd_error_bound,
            delta,
            ratio: (dpd_estimate > 0.0).then(|| dic / dpd_estimate),
            verdict,
        }
    }
}

fn inequality_report(g1: &MetricGraph, g2: &MetricGraph, delta: f64) -> Result<Report> {
    let dpd = persistence_distortion(g1, g2, delta)?;
    Ok(Report::new(
        intrinsic_cech_distance(g1, g2),
        dpd.estimate,
        dpd.error_bound,
        delta,
    ))
}

/// Inequality check where the first graph must be a bouquet.
pub fn verify_main_inequality(g1: &MetricGraph, g2: &MetricGraph, delta: f64) -> Result<Report> {
    if !is_bouquet(g1) {
        return Err(Error::NotABouquet);
    }
    g2.validate()?;
    inequality_report(g1, g2, delta)
}

/// Inequality check where both graphs must be trees of loops.
pub fn verify_tree_of_loops_inequality(g1: &MetricGraph, g2: &MetricGraph, delta: f64) -> Result<Report> {
    if !is_tree_of_loops(g1) || !is_tree_of_loops(g2) {
        return Err(Error::NotTreeOfLoops);
    }
    inequality_report(g1, g2, delta)
}

/// The bottleneck between a bouquet's diagram `{(0, t_i)}` and a diagram of
/// another graph, against twice the intrinsic Čech distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainedBound {
    pub matching: Matching,
    pub twice_dic: f64,
    pub holds: bool,
}

/// `t` are the bouquet's loop half-lengths, `s` the other graph's, and `d2`
/// a diagram of the other graph from some base point.
pub fn chained_bound(t: &[f64], s: &[f64], d2: &Diagram, tol: f64) -> Result<ChainedBound> {
    let d1 = Diagram::from_pairs(t.iter().map(|&x| (0.0, x)));
    let (value, matching) = bottleneck(&d1, d2, &Ground::L1);
    let twice_dic = yaxis_bottleneck(t, s)?;
    Ok(ChainedBound {
        holds: value >= twice_dic - tol,
        matching,
        twice_dic,
    })
}
