//! Degree centrality, PageRank and before/after diffing of their results.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, KnowledgeGraph, NodeId};

/// Which relationship types a metric looks at.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelFilter {
    #[default]
    All,
    Only(String),
}

impl RelFilter {
    fn check(&self, g: &KnowledgeGraph) -> Result<()> {
        match self {
            RelFilter::Only(rel) if g.relationship(rel).is_none() => Err(Error::UnknownRelationship(rel.clone())),
            _ => Ok(()),
        }
    }

    fn admits(&self, edge: &Edge) -> bool {
        match self {
            RelFilter::All => true,
            RelFilter::Only(rel) => &edge.rel == rel,
        }
    }
}

impl fmt::Display for RelFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelFilter::All => f.write_str("all"),
            RelFilter::Only(rel) => f.write_str(rel),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    In,
    Out,
    #[default]
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Degree,
    PageRank,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Degree => "degree",
            Algorithm::PageRank => "pagerank",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PageRankParams {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub weighted: bool,
    /// Use the `(1 - d) / N` teleport term instead of the per-node `(1 - d)`.
    #[serde(default)]
    pub normalized: bool,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.85,
            tolerance: 1e-7,
            max_iterations: 100,
            weighted: false,
            normalized: false,
        }
    }
}

impl PageRankParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidParams(format!("damping {} not in (0, 1)", self.damping)));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParams(format!("tolerance {} must be > 0", self.tolerance)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum MetricParams {
    Degree {
        rel: RelFilter,
        direction: Direction,
        weighted: bool,
    },
    #[serde(rename = "pagerank")]
    PageRank {
        rel: RelFilter,
        #[serde(flatten)]
        params: PageRankParams,
        iterations: usize,
        converged: bool,
        residual: f64,
    },
}

impl MetricParams {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            MetricParams::Degree { .. } => Algorithm::Degree,
            MetricParams::PageRank { .. } => Algorithm::PageRank,
        }
    }
}

/// Per-node values of one metric on one graph state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    pub params: MetricParams,
    pub values: BTreeMap<NodeId, f64>,
}

impl MetricsSnapshot {
    pub fn algorithm(&self) -> Algorithm {
        self.params.algorithm()
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.values.get(id).copied()
    }

    /// `false` when PageRank stopped at `max_iterations` above tolerance.
    pub fn converged(&self) -> bool {
        match self.params {
            MetricParams::PageRank { converged, .. } => converged,
            MetricParams::Degree { .. } => true,
        }
    }
}

/// Incident-edge counts (or strength sums when `weighted`), Inferred edges
/// included.
pub fn degree_centrality(g: &KnowledgeGraph, rel: &RelFilter, direction: Direction, weighted: bool) -> Result<MetricsSnapshot> {
    rel.check(g)?;
    let mut acc = vec![0.0f64; g.node_count()];
    for edge in g.edges().iter().filter(|e| rel.admits(e)) {
        let w = if weighted { edge.weight() } else { 1.0 };
        if matches!(direction, Direction::Out | Direction::Total) {
            acc[g.node_position(edge.source.as_str()).expect("validated edge")] += w;
        }
        if matches!(direction, Direction::In | Direction::Total) {
            acc[g.node_position(edge.target.as_str()).expect("validated edge")] += w;
        }
    }
    Ok(MetricsSnapshot {
        params: MetricParams::Degree {
            rel: rel.clone(),
            direction,
            weighted,
        },
        values: g.nodes().iter().map(|n| n.id.clone()).zip(acc).collect(),
    })
}

/// Power iteration of `p(v) = (1 - d) + d * sum_{u -> v} p(u) / out(u)`.
///
/// Dangling nodes lose their mass. Hitting `max_iterations` is not an
/// error; the snapshot records `converged: false`.
pub fn pagerank(g: &KnowledgeGraph, rel: &RelFilter, params: &PageRankParams) -> Result<MetricsSnapshot> {
    rel.check(g)?;
    params.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }

    let mut arcs: Vec<(usize, usize, f64)> = Vec::new();
    let mut out_weight = vec![0.0f64; n];
    for edge in g.edges().iter().filter(|e| rel.admits(e)) {
        let s = g.node_position(edge.source.as_str()).expect("validated edge");
        let t = g.node_position(edge.target.as_str()).expect("validated edge");
        let w = if params.weighted { edge.weight() } else { 1.0 };
        out_weight[s] += w;
        arcs.push((s, t, w));
    }
    let transfer: Vec<(usize, usize, f64)> = arcs.into_iter().map(|(s, t, w)| (s, t, w / out_weight[s])).collect();

    let base = if params.normalized {
        (1.0 - params.damping) / n as f64
    } else {
        1.0 - params.damping
    };
    // start at the scale of the fixed point: mean 1 per node, or 1/N normalized
    let start = if params.normalized { 1.0 / n as f64 } else { 1.0 };
    let mut rank = vec![start; n];
    let mut next = vec![0.0f64; n];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < params.max_iterations {
        next.fill(base);
        for &(s, t, share) in &transfer {
            next[t] += params.damping * rank[s] * share;
        }
        residual = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        iterations += 1;
        if residual < params.tolerance {
            break;
        }
    }
    let converged = residual < params.tolerance;
    if !converged {
        log::warn!("pagerank stopped after {iterations} iterations with residual {residual:e}");
    }
    Ok(MetricsSnapshot {
        params: MetricParams::PageRank {
            rel: rel.clone(),
            params: *params,
            iterations,
            converged,
            residual,
        },
        values: g.nodes().iter().map(|n| n.id.clone()).zip(rank).collect(),
    })
}

/// Relative change in percent, or `New` when the baseline is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pct {
    Finite(f64),
    New,
}

impl Pct {
    pub fn between(before: f64, after: f64) -> Pct {
        if before == 0.0 {
            if after == 0.0 {
                Pct::Finite(0.0)
            } else {
                Pct::New
            }
        } else {
            Pct::Finite(100.0 * (after - before) / before)
        }
    }

    /// Orders `New` above every finite value.
    fn cmp_ascending(&self, other: &Pct) -> Ordering {
        match (self, other) {
            (Pct::New, Pct::New) => Ordering::Equal,
            (Pct::New, _) => Ordering::Greater,
            (_, Pct::New) => Ordering::Less,
            (Pct::Finite(a), Pct::Finite(b)) => a.total_cmp(b),
        }
    }
}

impl fmt::Display for Pct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pct::New => f.write_str("new"),
            Pct::Finite(p) => write!(f, "{p:+.2}%"),
        }
    }
}

impl Serialize for Pct {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Pct::Finite(p) => s.serialize_f64(*p),
            Pct::New => s.serialize_str("new"),
        }
    }
}

impl<'de> Deserialize<'de> for Pct {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct PctVisitor;
        impl Visitor<'_> for PctVisitor {
            type Value = Pct;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or the string \"new\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Pct, E> {
                Ok(Pct::Finite(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Pct, E> {
                Ok(Pct::Finite(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Pct, E> {
                Ok(Pct::Finite(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Pct, E> {
                if v == "new" {
                    Ok(Pct::New)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(PctVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffRecord {
    pub node: NodeId,
    pub before: f64,
    pub after: f64,
    pub delta: f64,
    pub pct: Pct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffSummary {
    pub top_increases: Vec<DiffRecord>,
    pub top_decreases: Vec<DiffRecord>,
    pub unchanged_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsDiff {
    pub algorithm: Algorithm,
    pub records: Vec<DiffRecord>,
    pub summary: DiffSummary,
}

/// Length of the top-change lists kept in [`DiffSummary`].
pub const SUMMARY_TOP_K: usize = 10;

pub fn diff_metrics(before: &MetricsSnapshot, after: &MetricsSnapshot) -> Result<MetricsDiff> {
    if before.algorithm() != after.algorithm() {
        return Err(Error::SnapshotMismatch(format!(
            "algorithms differ ({} vs {})",
            before.algorithm(),
            after.algorithm()
        )));
    }
    if before.values.len() != after.values.len() || before.values.keys().ne(after.values.keys()) {
        return Err(Error::SnapshotMismatch("node sets differ".into()));
    }
    let records: Vec<DiffRecord> = before
        .values
        .iter()
        .zip(after.values.values())
        .map(|((node, &b), &a)| DiffRecord {
            node: node.clone(),
            before: b,
            after: a,
            delta: a - b,
            pct: Pct::between(b, a),
        })
        .collect();
    let mut diff = MetricsDiff {
        algorithm: before.algorithm(),
        summary: DiffSummary {
            top_increases: Vec::new(),
            top_decreases: Vec::new(),
            unchanged_count: records.iter().filter(|r| r.delta == 0.0).count(),
        },
        records,
    };
    diff.summary.top_increases = top_changes(&diff, SUMMARY_TOP_K, ChangeDirection::Increase);
    diff.summary.top_decreases = top_changes(&diff, SUMMARY_TOP_K, ChangeDirection::Decrease);
    Ok(diff)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeDirection {
    Increase,
    Decrease,
}

/// The `k` records ranked by percentage change. `Increase` ranks `New`
/// first, then descending pct; `Decrease` ranks ascending pct with `New`
/// last. Ties go to the lexicographically smaller node id, then by delta.
pub fn top_changes(diff: &MetricsDiff, k: usize, direction: ChangeDirection) -> Vec<DiffRecord> {
    let mut ranked: Vec<&DiffRecord> = diff.records.iter().collect();
    ranked.sort_by(|a, b| {
        let by_pct = match direction {
            ChangeDirection::Increase => b.pct.cmp_ascending(&a.pct),
            ChangeDirection::Decrease => a.pct.cmp_ascending(&b.pct),
        };
        by_pct
            .then_with(|| a.node.cmp(&b.node))
            .then_with(|| match direction {
                ChangeDirection::Increase => b.delta.total_cmp(&a.delta),
                ChangeDirection::Decrease => a.delta.total_cmp(&b.delta),
            })
    });
    ranked.into_iter().take(k).cloned().collect()
}
