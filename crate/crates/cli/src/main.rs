use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mgtopo::bottleneck::Ground;
use mgtopo::cycles::shortest_loop_system;
use mgtopo::distances::{default_delta, distance_report};
use mgtopo::feasibility::Verdict;
use mgtopo::format::{fmt12, round12};
use mgtopo::generators::{named, random_metric_graph, tree_of_loops, TreeOfLoopsSpec};
use mgtopo::harness::{render, run, Family, HarnessConfig, OutputFormat};
use mgtopo::persistence::extended_persistence_1d;
use mgtopo::{Error, MetricGraph};

#[derive(Parser)]
#[command(
    name = "mgtopo",
    version,
    about = "Loop systems, persistence diagrams and distances of metric graphs"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphPair {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    graph2: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph as JSON: a named shape, a seeded random graph, or a
    /// tree of loops.
    Generate {
        /// theta, cycle:L, path:L, dumbbell:L1,c,L2 or bouquet:L1,L2,...
        #[arg(long, conflicts_with_all = ["vertices", "tree_of_loops"])]
        name: Option<String>,
        #[arg(long, requires = "edges")]
        vertices: Option<usize>,
        #[arg(long, requires = "vertices")]
        edges: Option<usize>,
        /// JSON file with {"junctions": [{"parent", "connector", "loops"}, ...]}.
        #[arg(long)]
        tree_of_loops: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        min_length: f64,
        #[arg(long, default_value_t = 3.0)]
        max_length: f64,
        /// Multiply each length by an independent factor in [1, 1 + eps).
        #[arg(long)]
        perturb: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Shortest system of loops.
    Loops {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "table")]
        format: String,
        #[command(flatten)]
        output: Output,
    },
    /// One-dimensional extended persistence diagram of the distance from a
    /// base point.
    Diagram {
        #[arg(long)]
        graph: PathBuf,
        /// A vertex id, or `edge@offset` for a point inside an edge.
        #[arg(long)]
        base: String,
        #[arg(long, default_value = "csv")]
        format: String,
        #[command(flatten)]
        output: Output,
    },
    /// Intrinsic Čech distance.
    Dic {
        #[command(flatten)]
        pair: GraphPair,
        #[arg(long, default_value = "table")]
        format: String,
        #[command(flatten)]
        output: Output,
    },
    /// Sampled persistence distortion distance with its error bound.
    Dpd {
        #[command(flatten)]
        pair: GraphPair,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value = "l1")]
        ground: String,
        #[arg(long, default_value = "json")]
        format: String,
        #[command(flatten)]
        output: Output,
    },
    /// Check the distance inequality on seeded instances of a graph family.
    Verify {
        /// bouquet-vs-arbitrary, trees-of-loops, trees or arbitrary.
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value = "json")]
        format: String,
        #[command(flatten)]
        output: Output,
        #[arg(long, hide = true, default_value_t = 0.0)]
        dic_bias: f64,
    },
}

enum Failure {
    Input(Error),
    Violation(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.into())
    }
}

fn read_graph(path: &Path) -> Result<MetricGraph, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    let g = MetricGraph::from_json(&text)?;
    g.validate()?;
    Ok(g)
}

fn emit(output: &Output, text: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn format_arg(s: &str, allowed: &[&str]) -> Result<OutputFormat, Failure> {
    if !allowed.contains(&s) {
        return Err(Error::InvalidParameter(format!("format must be one of {}", allowed.join(", "))).into());
    }
    Ok(s.parse()?)
}

fn json_line(value: &serde_json::Value) -> Result<String, Failure> {
    Ok(serde_json::to_string(value)? + "\n")
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate {
            name,
            vertices,
            edges,
            tree_of_loops: spec,
            min_length,
            max_length,
            perturb,
            seed,
            output,
        } => {
            let mut g = match (name, vertices.zip(edges), spec) {
                (Some(name), None, None) => named(&name)?,
                (None, Some((n, m)), None) => random_metric_graph(n, m, (min_length, max_length), seed)?,
                (None, None, Some(path)) => {
                    let spec: TreeOfLoopsSpec = serde_json::from_str(&fs::read_to_string(path)?)?;
                    tree_of_loops(&spec)?
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "give exactly one of --name, --vertices/--edges, --tree-of-loops".into(),
                    )
                    .into())
                }
            };
            if let Some(eps) = perturb {
                g = g.perturb_to_generic(eps, seed)?;
            }
            emit(&output, &(g.to_json() + "\n"))
        }
        Command::Loops { graph, format, output } => {
            let format = format_arg(&format, &["json", "csv", "table"])?;
            let g = read_graph(&graph)?;
            let loops = shortest_loop_system(&g);
            let text = match format {
                OutputFormat::Json => json_line(&serde_json::json!({ "n": loops.len(), "loops": loops.to_json(&g) }))?,
                OutputFormat::Csv => {
                    let mut s = String::from("length,edges\n");
                    for c in &loops.loops {
                        s += &format!("{},{}\n", fmt12(c.length), c.edge_ids(&g).join(";"));
                    }
                    s
                }
                OutputFormat::Table => {
                    let mut s = format!("n={}\n", loops.len());
                    for c in &loops.loops {
                        s += &format!("{}\t{}\n", fmt12(c.length), c.edge_ids(&g).join(" "));
                    }
                    s
                }
            };
            emit(&output, &text)
        }
        Command::Diagram {
            graph,
            base,
            format,
            output,
        } => {
            let format = format_arg(&format, &["json", "csv"])?;
            let g = read_graph(&graph)?;
            let base = g.parse_point(&base)?;
            let mut d = extended_persistence_1d(&g, base)?;
            d.sort();
            let text = match format {
                OutputFormat::Json => json_line(&d.to_json(round12))?,
                _ => {
                    let mut buf = Vec::new();
                    d.write_csv(&mut buf, fmt12)?;
                    String::from_utf8(buf).expect("csv output is utf-8")
                }
            };
            emit(&output, &text)
        }
        Command::Dic { pair, format, output } => {
            let format = format_arg(&format, &["json", "table"])?;
            let (g1, g2) = (read_graph(&pair.graph)?, read_graph(&pair.graph2)?);
            let dic = mgtopo::distances::intrinsic_cech_distance(&g1, &g2);
            let text = match format {
                OutputFormat::Json => json_line(&serde_json::json!({ "dic": round12(dic) }))?,
                _ => fmt12(dic) + "\n",
            };
            emit(&output, &text)
        }
        Command::Dpd {
            pair,
            delta,
            ground,
            format,
            output,
        } => {
            let format = format_arg(&format, &["json", "table"])?;
            let ground: Ground = ground.parse()?;
            let (g1, g2) = (read_graph(&pair.graph)?, read_graph(&pair.graph2)?);
            let delta = delta.unwrap_or_else(|| default_delta(&g1, &g2));
            let r = distance_report(&g1, &g2, delta, ground)?;
            let text = match format {
                OutputFormat::Json => json_line(&serde_json::json!({
                    "dic": round12(r.dic),
                    "dpd_estimate": round12(r.dpd_estimate),
                    "dpd_error_bound": round12(r.dpd_error_bound),
                    "delta": round12(r.delta),
                    "n_samples_1": r.n_samples_1,
                    "n_samples_2": r.n_samples_2,
                }))?,
                _ => format!(
                    "dpd {} ± {}\ndic {}\ndelta {}\nsamples {} {}\n",
                    fmt12(r.dpd_estimate),
                    fmt12(r.dpd_error_bound),
                    fmt12(r.dic),
                    fmt12(r.delta),
                    r.n_samples_1,
                    r.n_samples_2
                ),
            };
            emit(&output, &text)
        }
        Command::Verify {
            family,
            instances,
            seed,
            delta,
            format,
            output,
            dic_bias,
        } => {
            let format = format_arg(&format, &["json", "csv", "table"])?;
            let family: Family = family.parse()?;
            if let Some(d) = delta {
                if !(d > 0.0 && d.is_finite()) {
                    return Err(Error::InvalidParameter(format!("resolution must be positive, got {d}")).into());
                }
            }
            let config = HarnessConfig {
                family,
                instances,
                seed,
                delta,
                dic_bias,
            };
            let records = run(&config)?;
            emit(&output, &render(&records, format)?)?;
            let violations = records.iter().filter(|r| r.verdict == Verdict::Violation).count();
            eprintln!(
                "{}: {} PASS, {} VIOLATION",
                family.name(),
                records.len() - violations,
                violations
            );
            if violations > 0 && family.is_gated() {
                return Err(Failure::Violation(violations));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(n)) => {
            eprintln!("error: {n} instance(s) violate the inequality");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
