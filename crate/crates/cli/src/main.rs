//! `kcgraph`: generate, complete, measure and diff knowledge graphs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kc_core::datasets::{
    family_tree_config, gen_family_tree, gen_roman_empire, roman_empire_config, FamilyTreeParams, RomanEmpireParams,
};
use kc_core::engine::{complete, CyclePolicy};
use kc_core::io::{diff_csv, export_cypher, load_bundle, write_atomic, write_bundle, write_config, write_edges, write_nodes, GraphBundle};
use kc_core::metrics::{
    degree_centrality, diff_metrics, pagerank, top_changes, ChangeDirection, Direction, MetricsSnapshot, PageRankParams,
    RelFilter,
};
use kc_core::pipeline::{run_pipeline, PipelineOptions};
use kc_core::Error;

const LOG_ENV: &str = "KCGRAPH_LOG";

#[derive(Debug, Parser)]
#[command(name = "kcgraph", version, about = "Knowledge completion for transitive relationships")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic graph bundle (nodes.csv, edges.csv, config.json).
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Complete every configured relationship and write the completed bundle.
    Complete {
        #[command(flatten)]
        input: BundleArgs,
        /// Output directory for the completed bundle and completion.json.
        #[arg(long)]
        out: PathBuf,
        /// Override the cycle policy of every configured relationship.
        #[arg(long, value_enum)]
        cycle_policy: Option<PolicyArg>,
    },
    /// Compute a centrality snapshot and write it as JSON.
    Metrics {
        #[command(flatten)]
        input: BundleArgs,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Degree)]
        algorithm: AlgorithmArg,
        #[command(flatten)]
        metric: MetricArgs,
        /// Snapshot JSON file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Diff two snapshots of the same algorithm and print the top changes.
    Diff {
        /// Snapshot taken before completion.
        #[arg(long)]
        before: PathBuf,
        /// Snapshot taken after completion.
        #[arg(long)]
        after: PathBuf,
        /// Diff output file; `.csv` writes a table, anything else JSON.
        #[arg(long)]
        out: PathBuf,
        /// Rows per ranking in the printed summary.
        #[arg(long, default_value_t = 5)]
        top_k: usize,
    },
    /// Load, complete, measure, diff and write every artifact in one run.
    Pipeline {
        #[command(flatten)]
        input: BundleArgs,
        /// Output directory (created if absent).
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        metric: MetricArgs,
        /// Rows per ranking in the printed summary.
        #[arg(long, default_value_t = 5)]
        top_k: usize,
        /// Override the cycle policy of every configured relationship.
        #[arg(long, value_enum)]
        cycle_policy: Option<PolicyArg>,
        /// Also write graph.cypher for the completed graph.
        #[arg(long)]
        cypher: bool,
        /// Record per-phase wall-clock timings in report.json (breaks byte-identical reruns).
        #[arg(long)]
        timings: bool,
    },
    /// Write a Cypher script that recreates the bundle's graph.
    ExportCypher {
        #[command(flatten)]
        input: BundleArgs,
        /// Cypher script to write.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Emperor -> prefectures -> dioceses -> provinces COMMANDS hierarchy.
    Roman {
        /// Output bundle directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        prefectures: usize,
        #[arg(long, default_value_t = 12)]
        dioceses: usize,
        #[arg(long, default_value_t = 31)]
        provinces: usize,
    },
    /// Parent -> child RELATIVE-OF family tree.
    Family {
        /// Output bundle directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 8)]
        generations: usize,
        #[arg(long, default_value_t = 1)]
        couples: usize,
        #[arg(long, default_value_t = 1)]
        children: usize,
        /// Probability that a couple is formed by two relatives.
        #[arg(long, default_value_t = 0.0)]
        intermarriage_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct BundleArgs {
    /// Directory holding nodes.csv, edges.csv and optionally config.json.
    #[arg(long, conflicts_with_all = ["nodes", "edges"], required_unless_present_all = ["nodes", "edges"])]
    bundle: Option<PathBuf>,
    /// Nodes CSV (id,label,props).
    #[arg(long, requires = "edges")]
    nodes: Option<PathBuf>,
    /// Edges CSV (source,target,type,strength,provenance).
    #[arg(long, requires = "nodes")]
    edges: Option<PathBuf>,
    /// Relationship config JSON; overrides the bundle's config.json.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl BundleArgs {
    fn resolve(&self) -> GraphBundle {
        let mut b = match (&self.bundle, &self.nodes, &self.edges) {
            (Some(dir), _, _) => GraphBundle::in_dir(dir),
            (None, Some(nodes), Some(edges)) => GraphBundle {
                nodes: nodes.clone(),
                edges: edges.clone(),
                config: None,
            },
            _ => unreachable!("clap enforces a bundle source"),
        };
        if let Some(config) = &self.config {
            b.config = Some(config.clone());
        }
        b
    }
}

#[derive(Debug, Args)]
struct MetricArgs {
    /// Restrict metrics to one relationship type (default: all types).
    #[arg(long)]
    rel: Option<String>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Total)]
    direction: DirectionArg,
    /// Weight edges by strength (missing strength counts as 1).
    #[arg(long)]
    weighted: bool,
    #[arg(long, default_value_t = 0.85)]
    damping: f64,
    /// L1 convergence tolerance for PageRank.
    #[arg(long, default_value_t = 1e-7)]
    tolerance: f64,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
    /// Use the (1 - d) / N teleport term.
    #[arg(long)]
    normalized: bool,
}

impl MetricArgs {
    fn rel_filter(&self) -> RelFilter {
        self.rel.clone().map_or(RelFilter::All, RelFilter::Only)
    }

    fn pagerank(&self) -> PageRankParams {
        PageRankParams {
            damping: self.damping,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            weighted: self.weighted,
            normalized: self.normalized,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Degree,
    Pagerank,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    In,
    Out,
    Total,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::In => Direction::In,
            DirectionArg::Out => Direction::Out,
            DirectionArg::Total => Direction::Total,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PolicyArg {
    RequireDag,
    BoundedWalks,
}

impl From<PolicyArg> for CyclePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::RequireDag => CyclePolicy::RequireDag,
            PolicyArg::BoundedWalks => CyclePolicy::BoundedWalks,
        }
    }
}

/// Stable process exit codes; documented in the README.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::Schema { .. } => 3,
        Error::Config(_) => 4,
        Error::InvalidParams(_) | Error::HopOutOfRange { .. } | Error::SnapshotMismatch(_) => 5,
        Error::CyclicGraph { .. } => 6,
        Error::Io { .. } => 7,
        Error::UnknownRelationship(_)
        | Error::DanglingEndpoint { .. }
        | Error::SelfLoop(_)
        | Error::DuplicateNode(_)
        | Error::DuplicateRelationship(_)
        | Error::EmptyLabel(_)
        | Error::InvalidStrength { .. }
        | Error::NonTransitiveRelationship(_)
        | Error::EmptyGraph => 8,
        Error::EmptyPathSet | Error::CountOverflow { .. } => 1,
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_snapshot(path: &Path) -> Result<MetricsSnapshot, Error> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        file: path.to_path_buf(),
        line: e.line() as u64,
        message: e.to_string(),
    })
}

fn to_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text.into_bytes()
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen { kind } => match kind {
            GenKind::Roman {
                out,
                prefectures,
                dioceses,
                provinces,
            } => {
                let g = gen_roman_empire(&RomanEmpireParams {
                    prefecture_count: prefectures,
                    diocese_count: dioceses,
                    province_count: provinces,
                })?;
                ensure_dir(&out)?;
                write_bundle(&g, &[roman_empire_config()], &out)?;
                println!("wrote {} nodes, {} edges to {}", g.node_count(), g.edge_count(), out.display());
            }
            GenKind::Family {
                out,
                generations,
                couples,
                children,
                intermarriage_rate,
                seed,
            } => {
                let g = gen_family_tree(&FamilyTreeParams {
                    generations,
                    couples_per_generation: couples,
                    children_per_couple: children,
                    intermarriage_rate,
                    seed,
                })?;
                ensure_dir(&out)?;
                write_bundle(&g, &[family_tree_config()], &out)?;
                println!("wrote {} nodes, {} edges to {}", g.node_count(), g.edge_count(), out.display());
            }
        },
        Command::Complete { input, out, cycle_policy } => {
            let (g, mut configs) = load_bundle(&input.resolve())?;
            if configs.is_empty() {
                return Err(Error::Config("no relationship has completion settings".into()));
            }
            if let Some(p) = cycle_policy {
                configs.iter_mut().for_each(|c| c.cycle_policy = p.into());
            }
            let mut current = g;
            let mut reports = Vec::new();
            for cfg in &configs {
                let (next, report) = complete(&current, cfg)?;
                println!(
                    "{}: {} inferred edge(s) added, {} direct edge(s) annotated, {} truncated pair(s)",
                    report.rel, report.inferred_edge_count, report.annotated_direct_count, report.truncated_pairs_count
                );
                current = next;
                reports.push(report);
            }
            ensure_dir(&out)?;
            write_nodes(&current, &out.join(kc_core::io::NODES_FILE))?;
            write_edges(&current, &out.join(kc_core::io::EDGES_FILE))?;
            write_config(&current, &configs, &out.join(kc_core::io::CONFIG_FILE))?;
            write_atomic(&out.join("completion.json"), &to_json(&reports))?;
        }
        Command::Metrics {
            input,
            algorithm,
            metric,
            out,
        } => {
            let params = metric.pagerank();
            params.validate()?;
            let (g, _) = load_bundle(&input.resolve())?;
            let snapshot = match algorithm {
                AlgorithmArg::Degree => degree_centrality(&g, &metric.rel_filter(), metric.direction.into(), metric.weighted)?,
                AlgorithmArg::Pagerank => pagerank(&g, &metric.rel_filter(), &params)?,
            };
            write_atomic(&out, &to_json(&snapshot))?;
            println!("wrote {} values to {}", snapshot.values.len(), out.display());
        }
        Command::Diff {
            before,
            after,
            out,
            top_k,
        } => {
            if top_k == 0 {
                return Err(Error::InvalidParams("top-k must be >= 1".into()));
            }
            let diff = diff_metrics(&read_snapshot(&before)?, &read_snapshot(&after)?)?;
            let bytes = if out.extension().is_some_and(|e| e == "csv") {
                diff_csv(&diff)
            } else {
                to_json(&diff)
            };
            write_atomic(&out, &bytes)?;
            for (direction, title) in [(ChangeDirection::Increase, "increases"), (ChangeDirection::Decrease, "decreases")] {
                println!("top {title}:");
                println!("{:>4}  {:<32} {:>12} {:>12} {:>10}", "rank", "node", "before", "after", "pct");
                for (i, r) in top_changes(&diff, top_k, direction).iter().enumerate() {
                    println!(
                        "{:>4}  {:<32} {:>12.4} {:>12.4} {:>10}",
                        i + 1,
                        r.node.as_str(),
                        r.before,
                        r.after,
                        r.pct.to_string()
                    );
                }
            }
        }
        Command::Pipeline {
            input,
            out,
            metric,
            top_k,
            cycle_policy,
            cypher,
            timings,
        } => {
            let mut opts = PipelineOptions::new(input.resolve(), out);
            opts.metrics_rel = metric.rel_filter();
            opts.degree_direction = metric.direction.into();
            opts.weighted = metric.weighted;
            opts.pagerank = metric.pagerank();
            opts.top_k = top_k;
            opts.cycle_policy = cycle_policy.map(Into::into);
            opts.cypher = cypher;
            opts.timings = timings;
            let outcome = run_pipeline(&opts)?;
            print!("{}", outcome.summary);
            log::info!("wrote {} file(s) to {}", outcome.written.len(), opts.out_dir.display());
        }
        Command::ExportCypher { input, out } => {
            let (g, _) = load_bundle(&input.resolve())?;
            export_cypher(&g, &out)?;
            println!("wrote {} statements to {}", g.node_count() + g.edge_count(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
