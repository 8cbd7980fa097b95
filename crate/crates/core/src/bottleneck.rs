//! Bottleneck distance between persistence diagrams and the Hausdorff
//! distance between sets of diagrams.
//!
//! Bottleneck values are exact: the optimum is one of finitely many matched
//! pair costs, so we binary search over the sorted candidate costs and test
//! each threshold with a maximum bipartite matching.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, DiagramPoint};
use crate::error::{Error, Result};
use crate::matching::maximum_matching;

/// Cost of matching two diagram points, or a point with the diagonal.
pub trait GroundMetric: Sync {
    fn distance(&self, a: DiagramPoint, b: DiagramPoint) -> f64;
    fn to_diagonal(&self, a: DiagramPoint) -> f64;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ground {
    #[default]
    L1,
    Linf,
}

impl std::str::FromStr for Ground {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ground> {
        match s {
            "l1" => Ok(Ground::L1),
            "linf" => Ok(Ground::Linf),
            _ => Err(Error::InvalidParameter(format!("unknown ground metric `{s}`"))),
        }
    }
}

impl GroundMetric for Ground {
    fn distance(&self, a: DiagramPoint, b: DiagramPoint) -> f64 {
        let (db, dd) = ((a.birth - b.birth).abs(), (a.death - b.death).abs());
        match self {
            Ground::L1 => db + dd,
            Ground::Linf => db.max(dd),
        }
    }

    fn to_diagonal(&self, a: DiagramPoint) -> f64 {
        let p = (a.death - a.birth).abs();
        match self {
            Ground::L1 => p,
            Ground::Linf => p / 2.0,
        }
    }
}

/// Compares persistences only: `|pers(a) - pers(b)|`, and `pers(a)` against
/// the diagonal. Bounded above by the l1 ground metric.
#[derive(Debug, Clone, Copy, Default)]
pub struct PersistenceGap;

impl GroundMetric for PersistenceGap {
    fn distance(&self, a: DiagramPoint, b: DiagramPoint) -> f64 {
        (a.persistence() - b.persistence()).abs()
    }

    fn to_diagonal(&self, a: DiagramPoint) -> f64 {
        a.persistence().abs()
    }
}

/// Another ground metric multiplied by a constant factor.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<G>(pub G, pub f64);

impl<G: GroundMetric> GroundMetric for Scaled<G> {
    fn distance(&self, a: DiagramPoint, b: DiagramPoint) -> f64 {
        self.1 * self.0.distance(a, b)
    }

    fn to_diagonal(&self, a: DiagramPoint) -> f64 {
        self.1 * self.0.to_diagonal(a)
    }
}

/// An optimal matching. `(Some(i), Some(j))` pairs point `i` of the first
/// diagram with point `j` of the second; a `None` side is the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matching {
    pub pairs: Vec<(Option<usize>, Option<usize>)>,
    pub cost: f64,
}

/// Square cost table of the augmented problem: left nodes are the `n1`
/// points of the first diagram followed by diagonal copies of the `n2`
/// points of the second; right nodes mirror that.
struct CostTable {
    n1: usize,
    n2: usize,
    cost: Vec<f64>,
}

impl CostTable {
    fn new(d1: &[DiagramPoint], d2: &[DiagramPoint], ground: &impl GroundMetric) -> Self {
        let (n1, n2) = (d1.len(), d2.len());
        let n = n1 + n2;
        let mut cost = vec![f64::INFINITY; n * n];
        for (i, &a) in d1.iter().enumerate() {
            for (j, &b) in d2.iter().enumerate() {
                cost[i * n + j] = ground.distance(a, b);
            }
            cost[i * n + n2 + i] = ground.to_diagonal(a);
        }
        for (j, &b) in d2.iter().enumerate() {
            let row = (n1 + j) * n;
            cost[row + j] = ground.to_diagonal(b);
            for k in 0..n1 {
                cost[row + n2 + k] = 0.0;
            }
        }
        CostTable { n1, n2, cost }
    }

    fn size(&self) -> usize {
        self.n1 + self.n2
    }

    fn candidates(&self) -> Vec<f64> {
        let mut c: Vec<f64> = self.cost.iter().copied().filter(|c| c.is_finite()).collect();
        c.push(0.0);
        c.sort_by(f64::total_cmp);
        c.dedup();
        c
    }

    fn adjacency(&self, keep: impl Fn(f64) -> bool) -> Vec<Vec<usize>> {
        let n = self.size();
        (0..n)
            .map(|l| (0..n).filter(|&r| keep(self.cost[l * n + r])).collect())
            .collect()
    }

    fn perfect_below(&self, keep: impl Fn(f64) -> bool) -> Option<Vec<Option<usize>>> {
        let adjacency = self.adjacency(keep);
        let m = maximum_matching(&adjacency, self.size());
        m.is_left_perfect().then_some(m.left_to_right)
    }

    /// Whether some perfect matching uses only costs strictly below `bound`.
    fn feasible_below(&self, bound: f64) -> bool {
        self.perfect_below(|c| c < bound).is_some()
    }

    fn solve(&self) -> (f64, Vec<Option<usize>>) {
        let candidates = self.candidates();
        // The largest candidate always admits the original pairing with the
        // diagonal, so the search below terminates with a feasible value.
        let (mut lo, mut hi) = (0usize, candidates.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.perfect_below(|c| c <= candidates[mid]).is_some() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let value = candidates[lo];
        let assignment = self
            .perfect_below(|c| c <= value)
            .expect("threshold found by the search admits a perfect matching");
        (value, assignment)
    }

    fn exact(&self) -> f64 {
        if self.size() == 0 {
            0.0
        } else {
            self.solve().0
        }
    }
}

/// Exact bottleneck distance with an optimal matching.
pub fn bottleneck(d1: &Diagram, d2: &Diagram, ground: &impl GroundMetric) -> (f64, Matching) {
    let table = CostTable::new(d1.points(), d2.points(), ground);
    if table.size() == 0 {
        return (
            0.0,
            Matching {
                pairs: Vec::new(),
                cost: 0.0,
            },
        );
    }
    let (value, assignment) = table.solve();
    let (n1, n2) = (table.n1, table.n2);
    let mut pairs = Vec::new();
    for (l, r) in assignment.iter().enumerate() {
        let r = r.expect("perfect matching");
        match (l < n1, r < n2) {
            (true, true) => pairs.push((Some(l), Some(r))),
            (true, false) => pairs.push((Some(l), None)),
            (false, true) => pairs.push((None, Some(r))),
            (false, false) => {}
        }
    }
    pairs.sort_by_key(|&(a, b)| (a.is_none(), a, b));
    (value, Matching { pairs, cost: value })
}

pub fn bottleneck_distance(d1: &Diagram, d2: &Diagram, ground: &impl GroundMetric) -> f64 {
    CostTable::new(d1.points(), d2.points(), ground).exact()
}

/// Closed form for diagrams on the y-axis `{(0, a_i)}` and `{(0, b_j)}` under
/// the l1 ground metric: pad the shorter multiset with zeros, sort both, and
/// take the largest coordinatewise gap.
pub fn yaxis_bottleneck(a: &[f64], b: &[f64]) -> Result<f64> {
    if let Some(&x) = a.iter().chain(b).find(|x| x.is_nan() || **x < 0.0) {
        return Err(Error::NegativeValue(x));
    }
    let n = a.len().max(b.len());
    let padded = |v: &[f64]| {
        let mut out = vec![0.0; n - v.len()];
        out.extend_from_slice(v);
        out.sort_by(f64::total_cmp);
        out
    };
    let (a, b) = (padded(a), padded(b));
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

fn distinct(set: &[Diagram]) -> Vec<&Diagram> {
    let mut seen = BTreeMap::new();
    for d in set {
        seen.entry(d.multiset_key()).or_insert(d);
    }
    seen.into_values().collect()
}

fn raise(cell: &AtomicU64, value: f64) {
    // Non-negative floats order the same way as their bit patterns.
    cell.fetch_max(value.to_bits(), Ordering::Relaxed);
}

fn load(cell: &AtomicU64) -> f64 {
    f64::from_bits(cell.load(Ordering::Relaxed))
}

/// Raises `cmax` to `inf_b d(a, b)` unless that infimum is already below it.
fn directed_into(from: &[&Diagram], to: &[&Diagram], ground: &impl GroundMetric, cmax: &AtomicU64) {
    from.par_iter().for_each(|a| {
        let mut cmin = f64::INFINITY;
        for b in to {
            let table = CostTable::new(a.points(), b.points(), ground);
            if table.size() == 0 || table.feasible_below(load(cmax)) {
                return;
            }
            if table.feasible_below(cmin) {
                cmin = table.exact();
            }
        }
        raise(cmax, cmin);
    });
}

/// Hausdorff distance between two sets of diagrams under the bottleneck
/// distance. Exact and independent of thread scheduling: pruned rows can
/// never hold the maximum.
pub fn hausdorff_bottleneck(s1: &[Diagram], s2: &[Diagram], ground: &impl GroundMetric) -> Result<f64> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::EmptySet);
    }
    let (a, b) = (distinct(s1), distinct(s2));
    let cmax = AtomicU64::new(0f64.to_bits());
    directed_into(&a, &b, ground, &cmax);
    directed_into(&b, &a, ground, &cmax);
    Ok(load(&cmax))
}

/// Directed `sup_{a in from} inf_{b in to}` bottleneck, without pruning.
pub fn directed_hausdorff(from: &[Diagram], to: &[Diagram], ground: &impl GroundMetric) -> Result<f64> {
    if from.is_empty() || to.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(from
        .iter()
        .map(|a| {
            to.iter()
                .map(|b| bottleneck_distance(a, b, ground))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}

/// Whether the bottleneck under `lo` does not exceed the bottleneck under
/// `hi`, allowing for one rounding step.
pub fn bottleneck_monotonicity_check(p: &Diagram, q: &Diagram, lo: &impl GroundMetric, hi: &impl GroundMetric) -> bool {
    let a = bottleneck_distance(p, q, lo);
    let b = bottleneck_distance(p, q, hi);
    a <= b + 1e-12 * b.abs().max(1.0)
}
