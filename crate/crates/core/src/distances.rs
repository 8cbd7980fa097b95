//! Distances between metric graphs: the intrinsic Čech distance in closed
//! form and a sampled estimate of the persistence distortion distance.

use rayon::prelude::*;
use serde::Serialize;

use crate::bottleneck::{hausdorff_bottleneck, yaxis_bottleneck, Ground};
use crate::cycles::shortest_loop_system;
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::graph::{GraphPoint, MetricGraph};
use crate::persistence::extended_persistence_1d;

/// `{(0, l/4)}` over the lengths `l` of a shortest system of loops.
pub fn intrinsic_cech_diagram(g: &MetricGraph) -> Diagram {
    Diagram::from_pairs(shortest_loop_system(g).lengths().into_iter().map(|l| (0.0, l / 4.0)))
}

/// `max_i |s_i - t_i| / 2` over zero-padded sorted half-lengths of the two
/// shortest loop systems.
pub fn intrinsic_cech_distance(g1: &MetricGraph, g2: &MetricGraph) -> f64 {
    let s = shortest_loop_system(g1).half_lengths();
    let t = shortest_loop_system(g2).half_lengths();
    yaxis_bottleneck(&s, &t).expect("loop lengths are positive") / 2.0
}

/// Number of equal pieces an edge of length `l` is cut into so that no
/// piece is longer than `delta`.
fn pieces(l: f64, delta: f64) -> usize {
    ((l / delta - 1e-9).ceil() as usize).max(1)
}

/// All vertices, then for each edge the interior points splitting it into
/// equal pieces of length at most `delta`.
pub fn sample_points(g: &MetricGraph, delta: f64) -> Result<Vec<GraphPoint>> {
    check_delta(delta)?;
    let mut out: Vec<GraphPoint> = (0..g.vertex_count()).map(GraphPoint::Vertex).collect();
    for (e, edge) in g.edges().iter().enumerate() {
        let k = pieces(edge.length, delta);
        for j in 1..k {
            out.push(GraphPoint::Interior {
                edge: e,
                offset: edge.length * j as f64 / k as f64,
            });
        }
    }
    Ok(out)
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "resolution must be positive, got {delta}"
        )))
    }
}

/// Diagrams of the geodesic distance functions from a grid of base points.
#[derive(Debug, Clone)]
pub struct SampledPhi {
    pub samples: Vec<(GraphPoint, Diagram)>,
    /// Requested resolution.
    pub delta: f64,
    /// Largest gap between consecutive samples along an edge; at most `delta`.
    pub spacing: f64,
}

impl SampledPhi {
    pub fn diagrams(&self) -> Vec<Diagram> {
        self.samples.iter().map(|(_, d)| d.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

pub fn sample_phi(g: &MetricGraph, delta: f64) -> Result<SampledPhi> {
    g.validate()?;
    let points = sample_points(g, delta)?;
    let samples = points
        .par_iter()
        .map(|&p| Ok((p, extended_persistence_1d(g, p)?)))
        .collect::<Result<Vec<_>>>()?;
    let spacing = g
        .edges()
        .iter()
        .map(|e| e.length / pieces(e.length, delta) as f64)
        .fold(0.0, f64::max);
    Ok(SampledPhi {
        samples,
        delta,
        spacing,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionEstimate {
    pub estimate: f64,
    /// The true distance lies within this much of `estimate`.
    pub error_bound: f64,
    pub delta: f64,
    pub n_samples_1: usize,
    pub n_samples_2: usize,
}

/// Hausdorff distance under the bottleneck distance between the sampled
/// diagram sets of the two graphs, with error bound `2 * delta`.
pub fn persistence_distortion(g1: &MetricGraph, g2: &MetricGraph, delta: f64) -> Result<DistortionEstimate> {
    persistence_distortion_with(g1, g2, delta, Ground::L1)
}

pub fn persistence_distortion_with(
    g1: &MetricGraph,
    g2: &MetricGraph,
    delta: f64,
    ground: Ground,
) -> Result<DistortionEstimate> {
    let (p1, p2) = (sample_phi(g1, delta)?, sample_phi(g2, delta)?);
    let estimate = hausdorff_bottleneck(&p1.diagrams(), &p2.diagrams(), &ground)?;
    Ok(DistortionEstimate {
        estimate,
        error_bound: 2.0 * delta,
        delta,
        n_samples_1: p1.len(),
        n_samples_2: p2.len(),
    })
}

/// Resolution used when none is given: a twentieth of the shortest loop
/// half-length over both graphs, or of the shortest edge when neither graph
/// has a loop.
pub fn default_delta(g1: &MetricGraph, g2: &MetricGraph) -> f64 {
    let shortest_half = [g1, g2]
        .iter()
        .flat_map(|g| shortest_loop_system(g).half_lengths())
        .fold(f64::INFINITY, f64::min);
    let base = if shortest_half.is_finite() {
        shortest_half
    } else {
        [g1, g2]
            .iter()
            .filter_map(|g| g.min_edge_length())
            .fold(f64::INFINITY, f64::min)
    };
    if base.is_finite() {
        0.05 * base
    } else {
        1.0
    }
}

/// Both distances for one pair of graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceReport {
    pub dic: f64,
    pub dpd_estimate: f64,
    pub dpd_error_bound: f64,
    pub delta: f64,
    pub n_samples_1: usize,
    pub n_samples_2: usize,
}

pub fn distance_report(g1: &MetricGraph, g2: &MetricGraph, delta: f64, ground: Ground) -> Result<DistanceReport> {
    let dpd = persistence_distortion_with(g1, g2, delta, ground)?;
    Ok(DistanceReport {
        dic: intrinsic_cech_distance(g1, g2),
        dpd_estimate: dpd.estimate,
        dpd_error_bound: dpd.error_bound,
        delta,
        n_samples_1: dpd.n_samples_1,
        n_samples_2: dpd.n_samples_2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bottleneck::bottleneck_distance;
    use crate::generators::{bouquet, named};

    #[test]
    fn cech_diagrams() {
        assert!(intrinsic_cech_diagram(&named("path:2").unwrap()).is_empty());
        let circle = intrinsic_cech_diagram(&bouquet(&[6.0]).unwrap());
        assert_eq!(circle, Diagram::from_pairs([(0.0, 1.5)]));
        let b = intrinsic_cech_diagram(&bouquet(&[2.0, 4.0]).unwrap());
        assert_eq!(b, Diagram::from_pairs([(0.0, 0.5), (0.0, 1.0)]));
    }

    #[test]
    fn cech_distances() {
        let (a, b) = (bouquet(&[2.0, 4.0]).unwrap(), bouquet(&[2.0, 6.0]).unwrap());
        assert_eq!(intrinsic_cech_distance(&a, &b), 0.5);
        assert_eq!(
            bottleneck_distance(&intrinsic_cech_diagram(&a), &intrinsic_cech_diagram(&b), &Ground::L1),
            0.5
        );
        assert_eq!(intrinsic_cech_distance(&a, &a), 0.0);
        let (p, q) = (named("path:1").unwrap(), named("path:3").unwrap());
        assert_eq!(intrinsic_cech_distance(&p, &q), 0.0);
    }

    #[test]
    fn sample_counts() {
        let p = named("path:1").unwrap();
        assert_eq!(sample_points(&p, 0.25).unwrap().len(), 5);
        assert_eq!(sample_points(&p, 1.0).unwrap().len(), 2);
        assert_eq!(sample_points(&p, 7.0).unwrap().len(), 2);
        assert!(sample_points(&p, 0.0).is_err());
        let phi = sample_phi(&named("theta").unwrap(), 0.4).unwrap();
        assert_eq!(phi.len(), 2 + 2 + 4 + 7);
        assert!(phi.spacing <= 0.4);
    }

    #[test]
    fn same_graph_has_zero_distortion() {
        let g = named("dumbbell:2,1,3").unwrap();
        let r = persistence_distortion(&g, &g, 0.25).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.error_bound, 0.5);
        assert_eq!(r.n_samples_1, r.n_samples_2);
    }

    #[test]
    fn two_single_circles() {
        // Every base point of a circle of length 2t sees the single point (0, t).
        let (a, b) = (bouquet(&[2.0]).unwrap(), bouquet(&[4.0]).unwrap());
        let r = persistence_distortion(&a, &b, 0.1).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(intrinsic_cech_distance(&a, &b), 0.5);
    }

    #[test]
    fn default_resolution() {
        let (a, b) = (bouquet(&[2.0, 4.0]).unwrap(), named("path:3").unwrap());
        assert!((default_delta(&a, &b) - 0.05).abs() < 1e-15);
        let (p, q) = (named("path:3").unwrap(), named("path:2").unwrap());
        assert!((default_delta(&p, &q) - 0.1).abs() < 1e-15);
    }
}
