//! Load -> complete -> measure -> diff -> write, as one run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::engine::{complete, CompletionReport, CyclePolicy, RelationshipConfig};
use crate::error::{Error, Result};
use crate::graph::KnowledgeGraph;
use crate::io::{
    cypher_script, diff_csv, edges_csv, load_bundle, nodes_csv, write_atomic, ConfigFile, GraphBundle, MetricsSection,
    RunReport, Timings, CONFIG_FILE, EDGES_FILE, NODES_FILE,
};
use crate::metrics::{
    degree_centrality, diff_metrics, pagerank, top_changes, ChangeDirection, DiffRecord, Direction, MetricsSnapshot,
    PageRankParams, RelFilter,
};

pub const REPORT_FILE: &str = "report.json";
pub const CYPHER_FILE: &str = "graph.cypher";

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub bundle: GraphBundle,
    pub out_dir: PathBuf,
    pub metrics_rel: RelFilter,
    pub degree_direction: Direction,
    pub weighted: bool,
    pub pagerank: PageRankParams,
    pub top_k: usize,
    /// Overrides the cycle policy of every configured relationship.
    pub cycle_policy: Option<CyclePolicy>,
    pub cypher: bool,
    /// Embed wall-clock timings in the report (makes it non-reproducible).
    pub timings: bool,
}

impl PipelineOptions {
    pub fn new(bundle: GraphBundle, out_dir: impl Into<PathBuf>) -> Self {
        PipelineOptions {
            bundle,
            out_dir: out_dir.into(),
            metrics_rel: RelFilter::All,
            degree_direction: Direction::Total,
            weighted: false,
            pagerank: PageRankParams::default(),
            top_k: 5,
            cycle_policy: None,
            cypher: false,
            timings: false,
        }
    }
}

#[derive(Debug)]
pub struct PipelineOutcome {
    pub graph: KnowledgeGraph,
    pub report: RunReport,
    pub written: Vec<PathBuf>,
    pub summary: String,
}

/// Completes every configured relationship in config order, each on the
/// output of the previous one.
pub fn complete_all(g: &KnowledgeGraph, configs: &[RelationshipConfig]) -> Result<(KnowledgeGraph, Vec<CompletionReport>)> {
    let mut current = g.clone();
    let mut reports = Vec::with_capacity(configs.len());
    for cfg in configs {
        let (next, report) = complete(&current, cfg)?;
        current = next;
        reports.push(report);
    }
    Ok((current, reports))
}

struct Measured {
    name: &'static str,
    before: MetricsSnapshot,
    after: MetricsSnapshot,
}

pub fn run_pipeline(opts: &PipelineOptions) -> Result<PipelineOutcome> {
    if opts.top_k == 0 {
        return Err(Error::InvalidParams("top-k must be >= 1".into()));
    }
    opts.pagerank.validate()?;

    let mut timings = Timings::default();
    let mut phase = |name: &str, started: Instant| {
        timings.phases_ms.insert(name.to_owned(), started.elapsed().as_secs_f64() * 1e3);
    };

    let t = Instant::now();
    let (graph, mut configs) = load_bundle(&opts.bundle)?;
    if configs.is_empty() {
        return Err(Error::Config("no relationship has completion settings".into()));
    }
    if let Some(policy) = opts.cycle_policy {
        for cfg in &mut configs {
            cfg.cycle_policy = policy;
        }
    }
    let inputs = opts.bundle.digests()?;
    phase("load", t);

    let t = Instant::now();
    let (completed, completions) = complete_all(&graph, &configs)?;
    phase("complete", t);

    let t = Instant::now();
    let measured = [
        Measured {
            name: "degree",
            before: degree_centrality(&graph, &opts.metrics_rel, opts.degree_direction, opts.weighted)?,
            after: degree_centrality(&completed, &opts.metrics_rel, opts.degree_direction, opts.weighted)?,
        },
        Measured {
            name: "pagerank",
            before: pagerank(&graph, &opts.metrics_rel, &opts.pagerank)?,
            after: pagerank(&completed, &opts.metrics_rel, &opts.pagerank)?,
        },
    ];
    let mut report = RunReport::new(inputs, configs.clone());
    report.completions = completions;
    for m in measured {
        report.metrics.push(MetricsSection {
            name: m.name.to_owned(),
            diff: diff_metrics(&m.before, &m.after)?,
            before: m.before.params,
            after: m.after.params,
        });
    }
    phase("metrics", t);
    if opts.timings {
        report.timings = Some(timings);
    }

    // Everything is computed; only now touch the output directory.
    let out = &opts.out_dir;
    let mut files: Vec<(PathBuf, Vec<u8>)> = vec![
        (out.join(NODES_FILE), nodes_csv(&completed)),
        (out.join(EDGES_FILE), edges_csv(&completed)),
        (
            out.join(CONFIG_FILE),
            ConfigFile::new(completed.registry(), &configs).to_json().into_bytes(),
        ),
    ];
    for section in &report.metrics {
        files.push((out.join(format!("diff_{}.csv", section.name)), diff_csv(&section.diff)));
    }
    if opts.cypher {
        files.push((out.join(CYPHER_FILE), cypher_script(&completed).into_bytes()));
    }
    files.push((out.join(REPORT_FILE), report.to_json().into_bytes()));

    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut written = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        write_atomic(&path, &bytes)?;
        written.push(path);
    }

    let summary = summarize(&report, opts.top_k);
    Ok(PipelineOutcome {
        graph: completed,
        report,
        written,
        summary,
    })
}

/// Human-readable run summary: completion counts, then ranked top changes
/// per metric.
pub fn summarize(report: &RunReport, top_k: usize) -> String {
    let mut s = String::new();
    for c in &report.completions {
        let _ = writeln!(
            s,
            "{}: {} inferred edge(s) added, {} direct edge(s) annotated, {} truncated pair(s)",
            c.rel, c.inferred_edge_count, c.annotated_direct_count, c.truncated_pairs_count
        );
    }
    for section in &report.metrics {
        for (direction, title) in [(ChangeDirection::Increase, "increases"), (ChangeDirection::Decrease, "decreases")] {
            let _ = writeln!(s, "\ntop {} {title}:", section.name);
            let _ = writeln!(s, "{:>4}  {:<32} {:>12} {:>12} {:>10}", "rank", "node", "before", "after", "pct");
            for (i, r) in top_changes(&section.diff, top_k, direction).iter().enumerate() {
                s.push_str(&format_row(i + 1, r));
            }
        }
    }
    s
}

fn format_row(rank: usize, r: &DiffRecord) -> String {
    format!(
        "{rank:>4}  {:<32} {:>12.4} {:>12.4} {:>10}\n",
        r.node.as_str(),
        r.before,
        r.after,
        r.pct.to_string()
    )
}

/// Convenience for callers holding a bundle directory.
pub fn run_pipeline_in_dir(bundle_dir: &Path, out_dir: &Path) -> Result<PipelineOutcome> {
    run_pipeline(&PipelineOptions::new(GraphBundle::in_dir(bundle_dir), out_dir))
}
