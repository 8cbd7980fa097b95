//! Seeded batches of graph pairs checked against the distance inequality.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bottleneck::{bottleneck, Ground, Matching};
use crate::diagram::Diagram;
use crate::distances::{default_delta, intrinsic_cech_diagram, intrinsic_cech_distance, persistence_distortion};
use crate::error::{Error, Result};
use crate::feasibility::{is_bouquet, is_tree_of_loops, Report, Verdict};
use crate::format::{fmt12, round12};
use crate::generators::{bouquet, random_metric_graph, random_tree, random_tree_of_loops_spec, tree_of_loops};
use crate::graph::{GraphDocument, MetricGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    BouquetVsArbitrary,
    TreesOfLoops,
    Trees,
    Arbitrary,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::BouquetVsArbitrary,
        Family::TreesOfLoops,
        Family::Trees,
        Family::Arbitrary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::BouquetVsArbitrary => "bouquet-vs-arbitrary",
            Family::TreesOfLoops => "trees-of-loops",
            Family::Trees => "trees",
            Family::Arbitrary => "arbitrary",
        }
    }

    /// Whether a violation in this family contradicts a proven inequality.
    /// Arbitrary pairs are exploratory.
    pub fn is_gated(self) -> bool {
        self != Family::Arbitrary
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family `{s}`")))
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}

fn arbitrary_graph(rng: &mut ChaCha8Rng) -> Result<MetricGraph> {
    let n = rng.gen_range(2..=5);
    let extra = rng.gen_range(0..=3);
    let g = random_metric_graph(n, n - 1 + extra, (1.0, 3.0), rng.gen())?;
    g.perturb_to_generic(1e-3, rng.gen())
}

/// The pair of graphs for instance `seed` of a family.
pub fn instance_graphs(family: Family, seed: u64) -> Result<(MetricGraph, MetricGraph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match family {
        Family::BouquetVsArbitrary => {
            let k = rng.gen_range(1..=3);
            let lengths: Vec<f64> = (0..k).map(|_| uniform(&mut rng, 2.0, 6.0)).collect();
            Ok((bouquet(&lengths)?, arbitrary_graph(&mut rng)?))
        }
        Family::TreesOfLoops => {
            let mut one = || -> Result<MetricGraph> {
                let spec = random_tree_of_loops_spec(3, 2, (2.0, 6.0), (0.5, 2.0), rng.gen())?;
                tree_of_loops(&spec)
            };
            Ok((one()?, one()?))
        }
        Family::Trees => {
            let mut one = || random_tree(rng.gen_range(2..=6), (1.0, 3.0), rng.gen());
            Ok((one()?, one()?))
        }
        Family::Arbitrary => Ok((arbitrary_graph(&mut rng)?, arbitrary_graph(&mut rng)?)),
    }
}

/// Everything needed to rerun a violating instance by hand.
#[derive(Debug, Clone, Serialize)]
pub struct Reproduction {
    pub graph1: GraphDocument,
    pub graph2: GraphDocument,
    pub delta: f64,
    pub cech_diagram1: serde_json::Value,
    pub cech_diagram2: serde_json::Value,
    pub cech_matching: Matching,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceRecord {
    pub family: Family,
    pub seed: u64,
    pub dic: f64,
    pub dpd_estimate: f64,
    pub dpd_error_bound: f64,
    pub ratio: Option<f64>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reproduction: Option<Reproduction>,
}

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub family: Family,
    pub instances: usize,
    pub seed: u64,
    /// Fixed resolution; when absent each instance uses `default_delta`.
    pub delta: Option<f64>,
    /// Added to every computed intrinsic Čech distance. Only for exercising
    /// the violation path.
    pub dic_bias: f64,
}

impl HarnessConfig {
    pub fn new(family: Family, instances: usize, seed: u64) -> Self {
        HarnessConfig {
            family,
            instances,
            seed,
            delta: None,
            dic_bias: 0.0,
        }
    }
}

pub fn run_instance(config: &HarnessConfig, seed: u64) -> Result<InstanceRecord> {
    let (g1, g2) = instance_graphs(config.family, seed)?;
    match config.family {
        Family::BouquetVsArbitrary => debug_assert!(is_bouquet(&g1)),
        Family::TreesOfLoops => debug_assert!(is_tree_of_loops(&g1) && is_tree_of_loops(&g2)),
        _ => {}
    }
    let delta = config.delta.unwrap_or_else(|| default_delta(&g1, &g2));
    let dpd = persistence_distortion(&g1, &g2, delta)?;
    let dic = intrinsic_cech_distance(&g1, &g2) + config.dic_bias;
    let report = Report::new(dic, dpd.estimate, dpd.error_bound, delta);
    let reproduction = (report.verdict == Verdict::Violation).then(|| {
        let (c1, c2) = (intrinsic_cech_diagram(&g1), intrinsic_cech_diagram(&g2));
        let (_, cech_matching) = bottleneck(&c1, &c2, &Ground::L1);
        let json = |d: &Diagram| d.to_json(round12);
        Reproduction {
            graph1: g1.to_document(),
            graph2: g2.to_document(),
            delta,
            cech_diagram1: json(&c1),
            cech_diagram2: json(&c2),
            cech_matching,
        }
    });
    Ok(InstanceRecord {
        family: config.family,
        seed,
        dic: report.dic,
        dpd_estimate: report.dpd_estimate,
        dpd_error_bound: report.dpd_error_bound,
        ratio: report.ratio,
        verdict: report.verdict,
        reproduction,
    })
}

/// Runs instances `seed, seed + 1, ...` in parallel; records come back in
/// seed order.
pub fn run(config: &HarnessConfig) -> Result<Vec<InstanceRecord>> {
    (0..config.instances as u64)
        .into_par_iter()
        .map(|i| run_instance(config, config.seed.wrapping_add(i)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<OutputFormat> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "table" => Ok(OutputFormat::Table),
            _ => Err(Error::InvalidParameter(format!("unknown format `{s}`"))),
        }
    }
}

fn rounded(record: &InstanceRecord) -> InstanceRecord {
    let mut r = record.clone();
    r.dic = round12(r.dic);
    r.dpd_estimate = round12(r.dpd_estimate);
    r.dpd_error_bound = round12(r.dpd_error_bound);
    r.ratio = r.ratio.map(round12);
    r
}

fn opt12(x: Option<f64>) -> String {
    x.map(fmt12).unwrap_or_default()
}

/// JSON lines, CSV with a header, or an aligned text table.
pub fn render(records: &[InstanceRecord], format: OutputFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            for r in records {
                out.push_str(&serde_json::to_string(&rounded(r))?);
                out.push('\n');
            }
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "family",
                "seed",
                "dic",
                "dpd_estimate",
                "dpd_error_bound",
                "ratio",
                "verdict",
            ])?;
            for r in records {
                w.write_record([
                    r.family.name().to_string(),
                    r.seed.to_string(),
                    fmt12(r.dic),
                    fmt12(r.dpd_estimate),
                    fmt12(r.dpd_error_bound),
                    opt12(r.ratio),
                    r.verdict.to_string(),
                ])?;
            }
            out = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8");
        }
        OutputFormat::Table => {
            let _ = writeln!(
                out,
                "{:<22} {:>20} {:>16} {:>16} {:>16} {:>16}  verdict",
                "family", "seed", "dic", "dpd_estimate", "dpd_error_bound", "ratio"
            );
            for r in records {
                let _ = writeln!(
                    out,
                    "{:<22} {:>20} {:>16} {:>16} {:>16} {:>16}  {}",
                    r.family.name(),
                    r.seed,
                    fmt12(r.dic),
                    fmt12(r.dpd_estimate),
                    fmt12(r.dpd_error_bound),
                    opt12(r.ratio),
                    r.verdict
                );
            }
        }
    }
    Ok(out)
}
