//! Deterministic graph families: bouquets, trees of loops, random connected
//! graphs and a handful of named shapes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MetricGraph;

fn check_length(what: &str, l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive, got {l}")))
    }
}

/// One vertex `o` carrying a self-loop per length.
pub fn bouquet(lengths: &[f64]) -> Result<MetricGraph> {
    let mut g = MetricGraph::new();
    let o = g.add_vertex("o")?;
    for (i, &l) in lengths.iter().enumerate() {
        check_length("loop length", l)?;
        g.add_edge(format!("l{i}"), o, o, l)?;
    }
    Ok(g)
}

/// A junction of a tree of loops. Junction 0 is the root; every other
/// junction hangs from an earlier one by a connector edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub parent: Option<usize>,
    #[serde(default)]
    pub connector: f64,
    #[serde(default)]
    pub loops: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeOfLoopsSpec {
    pub junctions: Vec<Junction>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizedLoop {
    pub edge: usize,
    pub junction: usize,
}

#[derive(Debug, Clone)]
pub struct RealizedTreeOfLoops {
    pub graph: MetricGraph,
    /// Loops in spec order: junction by junction.
    pub loops: Vec<RealizedLoop>,
}

impl TreeOfLoopsSpec {
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::SpecNotTreeOfLoops(msg));
        if self.junctions.is_empty() {
            return bad("no junctions".into());
        }
        for (i, j) in self.junctions.iter().enumerate() {
            match (i, j.parent) {
                (0, None) => {}
                (0, Some(_)) => return bad("junction 0 must be the root".into()),
                (_, None) => return bad(format!("junction {i} has no parent")),
                (_, Some(p)) if p >= i => return bad(format!("junction {i} hangs from later junction {p}")),
                (_, Some(_)) if !(j.connector > 0.0 && j.connector.is_finite()) => {
                    return bad(format!("junction {i} has connector length {}", j.connector))
                }
                _ => {}
            }
            if let Some(l) = j.loops.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
                return bad(format!("junction {i} has loop length {l}"));
            }
        }
        Ok(())
    }

    pub fn loop_count(&self) -> usize {
        self.junctions.iter().map(|j| j.loops.len()).sum()
    }

    /// Junctions become vertices `j{i}`, connectors edges `c{i}`, and loops
    /// self-loops `l{i}_{k}`.
    pub fn realize(&self) -> Result<RealizedTreeOfLoops> {
        self.check()?;
        let mut g = MetricGraph::new();
        for i in 0..self.junctions.len() {
            g.add_vertex(format!("j{i}"))?;
        }
        let mut loops = Vec::new();
        for (i, j) in self.junctions.iter().enumerate() {
            if let Some(p) = j.parent {
                g.add_edge(format!("c{i}"), p, i, j.connector)?;
            }
            for (k, &l) in j.loops.iter().enumerate() {
                let edge = g.add_edge(format!("l{i}_{k}"), i, i, l)?;
                loops.push(RealizedLoop { edge, junction: i });
            }
        }
        Ok(RealizedTreeOfLoops { graph: g, loops })
    }
}

pub fn tree_of_loops(spec: &TreeOfLoopsSpec) -> Result<MetricGraph> {
    Ok(spec.realize()?.graph)
}

/// Random tree-of-loops spec with `1..=max_junctions` junctions, each with
/// `0..=max_loops_per_junction` loops.
pub fn random_tree_of_loops_spec(
    max_junctions: usize,
    max_loops_per_junction: usize,
    loop_range: (f64, f64),
    connector_range: (f64, f64),
    seed: u64,
) -> Result<TreeOfLoopsSpec> {
    check_range(loop_range)?;
    check_range(connector_range)?;
    if max_junctions == 0 {
        return Err(Error::InvalidParameter("need at least one junction".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_junctions);
    let junctions = (0..n)
        .map(|i| {
            let (parent, connector) = if i == 0 {
                (None, 0.0)
            } else {
                (Some(rng.gen_range(0..i)), sample(&mut rng, connector_range))
            };
            let k = rng.gen_range(0..=max_loops_per_junction);
            let loops = (0..k).map(|_| sample(&mut rng, loop_range)).collect();
            Junction {
                parent,
                connector,
                loops,
            }
        })
        .collect();
    Ok(TreeOfLoopsSpec { junctions })
}

fn check_range((lo, hi): (f64, f64)) -> Result<()> {
    if lo > 0.0 && hi >= lo && hi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("bad length range [{lo}, {hi}]")))
    }
}

fn sample(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

/// Connected random multigraph: a random spanning tree (vertex `i` attaches
/// to a uniform earlier vertex) plus uniformly random extra edges, which may
/// be parallel edges or self-loops. Lengths are uniform in `length_range`.
pub fn random_metric_graph(
    n_vertices: usize,
    n_edges: usize,
    length_range: (f64, f64),
    seed: u64,
) -> Result<MetricGraph> {
    check_range(length_range)?;
    if n_vertices == 0 || n_edges + 1 < n_vertices {
        return Err(Error::InvalidParameter(format!(
            "{n_vertices} vertices need at least {} edges, got {n_edges}",
            n_vertices.saturating_sub(1)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = MetricGraph::new();
    for i in 0..n_vertices {
        g.add_vertex(format!("v{i}"))?;
    }
    for i in 1..n_vertices {
        let p = rng.gen_range(0..i);
        let l = sample(&mut rng, length_range);
        g.add_edge(format!("e{}", i - 1), p, i, l)?;
    }
    for k in (n_vertices - 1)..n_edges {
        let u = rng.gen_range(0..n_vertices);
        let v = rng.gen_range(0..n_vertices);
        let l = sample(&mut rng, length_range);
        g.add_edge(format!("e{k}"), u, v, l)?;
    }
    Ok(g)
}

pub fn random_tree(n_vertices: usize, length_range: (f64, f64), seed: u64) -> Result<MetricGraph> {
    random_metric_graph(n_vertices, n_vertices.saturating_sub(1), length_range, seed)
}

fn parse_lengths(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number `{t}`")))
        })
        .collect()
}

/// Named shapes: `theta`, `cycle:L`, `path:L`, `dumbbell:L1,c,L2`,
/// `bouquet:L1,L2,...`.
pub fn named(name: &str) -> Result<MetricGraph> {
    let (kind, args) = name.split_once(':').unwrap_or((name, ""));
    match kind {
        "theta" if args.is_empty() => {
            let mut g = MetricGraph::new();
            let a = g.add_vertex("a")?;
            let b = g.add_vertex("b")?;
            for (i, l) in [1.0, 2.0, 3.0].into_iter().enumerate() {
                g.add_edge(format!("e{i}"), a, b, l)?;
            }
            Ok(g)
        }
        "cycle" => {
            let l = parse_lengths(args)?;
            match l.as_slice() {
                [l] => bouquet(&[*l]),
                _ => Err(Error::InvalidParameter("cycle:L takes one length".into())),
            }
        }
        "path" => {
            let l = parse_lengths(args)?;
            let [l] = l.as_slice() else {
                return Err(Error::InvalidParameter("path:L takes one length".into()));
            };
            check_length("path length", *l)?;
            let mut g = MetricGraph::new();
            let a = g.add_vertex("a")?;
            let b = g.add_vertex("b")?;
            g.add_edge("p", a, b, *l)?;
            Ok(g)
        }
        "dumbbell" => {
            let l = parse_lengths(args)?;
            let [l1, c, l2] = l.as_slice() else {
                return Err(Error::InvalidParameter("dumbbell:L1,c,L2 takes three lengths".into()));
            };
            for x in [l1, c, l2] {
                check_length("dumbbell length", *x)?;
            }
            let mut g = MetricGraph::new();
            let a = g.add_vertex("a")?;
            let b = g.add_vertex("b")?;
            g.add_edge("la", a, a, *l1)?;
            g.add_edge("bar", a, b, *c)?;
            g.add_edge("lb", b, b, *l2)?;
            Ok(g)
        }
        "bouquet" => {
            let l = if args.is_empty() {
                Vec::new()
            } else {
                parse_lengths(args)?
            };
            bouquet(&l)
        }
        _ => Err(Error::InvalidParameter(format!("unknown graph name `{name}`"))),
    }
}
