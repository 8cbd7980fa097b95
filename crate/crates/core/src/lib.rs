//! Metric graphs, geodesic distance functions, extended persistence of
//! their one-dimensional features, and the distances built on top of them.

pub mod bottleneck;
pub mod cycles;
pub mod diagram;
pub mod distances;
pub mod error;
pub mod feasibility;
pub mod format;
pub mod generators;
pub mod geodesic;
pub mod graph;
pub mod harness;
pub mod matching;
pub mod persistence;

pub use diagram::{Diagram, DiagramPoint};
pub use error::{Error, Result};
pub use graph::{GraphPoint, MetricGraph};
