//! Knowledge completion for scalable transitive relationships.
//!
//! Every ordered pair `(x, z)` joined by Direct edges of a transitive
//! relationship gets a strength `S(x, z)` aggregated from the decayed
//! strengths of its paths. Pairs with `S >= threshold` become Inferred edges,
//! or annotate the Direct edge already joining them.

mod decay;
mod oracle;
mod paths;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use decay::{aggregate_strength, decay_value, Aggregation, DecayFunction};
pub use oracle::{complete_bruteforce, enumerate_simple_paths};
pub use paths::{count_paths_by_length, CyclePolicy, PairEntry, PairStrengths};

use crate::error::{Error, Result};
use crate::graph::{typed_adjacency, Edge, KnowledgeGraph, NodeId, Provenance, UpsertOutcome};
use paths::{check_policy, walks_from, Scratch};

/// Absolute tolerance for threshold comparisons.
pub const STRENGTH_TOLERANCE: f64 = 1e-12;

/// Hop bound used when none is configured and it cannot be derived.
pub const DEFAULT_MAX_HOPS: usize = 7;

/// Upper limit when deriving the hop bound from `f(h) >= threshold`.
const DERIVED_HOPS_LIMIT: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationshipConfig {
    pub rel: String,
    pub decay: DecayFunction,
    pub aggregation: Aggregation,
    pub threshold: f64,
    pub max_hops: usize,
    #[serde(default)]
    pub cycle_policy: CyclePolicy,
}

impl RelationshipConfig {
    pub fn new(rel: impl Into<String>, decay: DecayFunction, aggregation: Aggregation, threshold: f64, max_hops: usize) -> Self {
        RelationshipConfig {
            rel: rel.into(),
            decay,
            aggregation,
            threshold,
            max_hops,
            cycle_policy: CyclePolicy::RequireDag,
        }
    }

    /// Halving decay, summed over paths, cut at `(1/2)^7` within 7 hops.
    pub fn kinship(rel: impl Into<String>) -> Self {
        Self::new(rel, DecayFunction::halving(), Aggregation::Sum, 0.5f64.powi(7), DEFAULT_MAX_HOPS)
    }

    pub fn validate(&self) -> Result<()> {
        self.decay.validate()?;
        if !(self.threshold.is_finite() && self.threshold >= 0.0) {
            return Err(Error::Config(format!("threshold {} must be a finite value >= 0", self.threshold)));
        }
        if self.max_hops == 0 {
            return Err(Error::Config("max_hops must be >= 1".into()));
        }
        if let Some(len) = self.decay.max_defined_hops() {
            if self.max_hops > len {
                return Err(Error::Config(format!(
                    "max_hops {} exceeds decay table length {len}",
                    self.max_hops
                )));
            }
        }
        Ok(())
    }

    /// Hop bound for a config that did not state one: under `Max` the largest
    /// `h` with `f(h) >= threshold`; otherwise [`DEFAULT_MAX_HOPS`].
    pub fn default_max_hops(decay: &DecayFunction, aggregation: Aggregation, threshold: f64) -> usize {
        let cap = decay.max_defined_hops().unwrap_or(DERIVED_HOPS_LIMIT);
        if aggregation == Aggregation::Max && threshold > 0.0 {
            let mut h = 0;
            while h < cap {
                match decay.value(h + 1) {
                    Ok(v) if v + STRENGTH_TOLERANCE >= threshold => h += 1,
                    _ => break,
                }
            }
            return h.max(1);
        }
        DEFAULT_MAX_HOPS.min(cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    /// A new Inferred edge was added.
    Inferred,
    /// An existing edge of the pair had its strength set.
    Annotated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub source: NodeId,
    pub target: NodeId,
    pub strength: f64,
    pub shortest_hops: usize,
    pub kind: RecordKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionReport {
    pub rel: String,
    pub inferred_edge_count: usize,
    pub annotated_direct_count: usize,
    pub truncated_pairs_count: usize,
    pub records: Vec<CompletionRecord>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CompletionReport {
    pub fn inferred(&self) -> impl Iterator<Item = &CompletionRecord> {
        self.records.iter().filter(|r| r.kind == RecordKind::Inferred)
    }
}

/// A pair whose aggregated strength cleared the threshold.
#[derive(Debug, Clone)]
pub(crate) struct Accepted {
    pub source: usize,
    pub target: usize,
    pub strength: f64,
    pub shortest_hops: usize,
}

pub(crate) fn passes_threshold(strength: f64, threshold: f64) -> bool {
    strength + STRENGTH_TOLERANCE >= threshold
}

pub(crate) fn check_transitive(g: &KnowledgeGraph, cfg: &RelationshipConfig) -> Result<()> {
    cfg.validate()?;
    let rel = g
        .relationship(&cfg.rel)
        .ok_or_else(|| Error::UnknownRelationship(cfg.rel.clone()))?;
    if !rel.transitive {
        return Err(Error::NonTransitiveRelationship(cfg.rel.clone()));
    }
    Ok(())
}

/// Runs completion for one relationship, returning a new graph.
pub fn complete(g: &KnowledgeGraph, cfg: &RelationshipConfig) -> Result<(KnowledgeGraph, CompletionReport)> {
    let started = Instant::now();
    check_transitive(g, cfg)?;
    let adj = typed_adjacency(g, &cfg.rel)?;
    check_policy(&adj, cfg.cycle_policy)?;

    let n = adj.node_count();
    let per_source: Vec<(Vec<Accepted>, usize)> = (0..n)
        .into_par_iter()
        .map_init(
            || Scratch::new(n),
            |scratch, source| -> Result<(Vec<Accepted>, usize)> {
                let walks = walks_from(&adj, source, cfg.max_hops, scratch)?;
                let mut accepted = Vec::new();
                for (target, counts) in walks.targets {
                    let strength = aggregate_strength(&counts, &cfg.decay, cfg.aggregation)?;
                    if passes_threshold(strength, cfg.threshold) {
                        let shortest_hops = counts.iter().position(|&c| c > 0).map_or(0, |i| i + 1);
                        accepted.push(Accepted {
                            source,
                            target,
                            strength,
                            shortest_hops,
                        });
                    }
                }
                Ok((accepted, walks.truncated))
            },
        )
        .collect::<Result<_>>()?;

    let truncated: usize = per_source.iter().map(|(_, t)| t).sum();
    let accepted = per_source.into_iter().flat_map(|(a, _)| a);
    materialize(g, cfg, &adj, accepted, truncated, started)
}

pub(crate) fn materialize(
    g: &KnowledgeGraph,
    cfg: &RelationshipConfig,
    adj: &crate::graph::TypedAdjacency,
    accepted: impl IntoIterator<Item = Accepted>,
    truncated_pairs_count: usize,
    started: Instant,
) -> Result<(KnowledgeGraph, CompletionReport)> {
    let mut out = g.clone();
    let mut report = CompletionReport {
        rel: cfg.rel.clone(),
        inferred_edge_count: 0,
        annotated_direct_count: 0,
        truncated_pairs_count,
        records: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for a in accepted {
        let source = adj.id(a.source).clone();
        let target = adj.id(a.target).clone();
        let edge = Edge {
            source: source.clone(),
            target: target.clone(),
            rel: cfg.rel.clone(),
            strength: Some(a.strength),
            provenance: Provenance::Inferred,
        };
        let kind = match out.upsert_strength(edge)? {
            UpsertOutcome::Inserted => {
                report.inferred_edge_count += 1;
                RecordKind::Inferred
            }
            UpsertOutcome::Updated(Provenance::Direct) => {
                report.annotated_direct_count += 1;
                RecordKind::Annotated
            }
            UpsertOutcome::Updated(Provenance::Inferred) => RecordKind::Annotated,
        };
        report.records.push(CompletionRecord {
            source,
            target,
            strength: a.strength,
            shortest_hops: a.shortest_hops,
            kind,
        });
    }
    report.elapsed = started.elapsed();
    log::debug!(
        "completed `{}`: {} inferred, {} annotated in {:?}",
        cfg.rel,
        report.inferred_edge_count,
        report.annotated_direct_count,
        report.elapsed
    );
    Ok((out, report))
}
