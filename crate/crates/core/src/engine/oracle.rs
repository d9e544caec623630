//! Exhaustive path enumeration and a brute-force completion built on it.
//! Exponential in the worst case; meant for cross-checking small graphs.

use std::time::Instant;

use super::decay::Aggregation;
use super::{check_transitive, materialize, passes_threshold, Accepted, CompletionReport, RelationshipConfig};
use crate::error::{Error, Result};
use crate::graph::{detect_cycles, typed_adjacency, KnowledgeGraph, NodeId, TypedAdjacency};

/// All simple directed paths from `x` to `z` with at most `max_hops` edges,
/// each given as its node sequence. Unknown endpoints or `x == z` yield an
/// empty list.
pub fn enumerate_simple_paths(adj: &TypedAdjacency, x: &NodeId, z: &NodeId, max_hops: usize) -> Vec<Vec<NodeId>> {
    let (Some(s), Some(t)) = (adj.index_of(x.as_str()), adj.index_of(z.as_str())) else {
        return Vec::new();
    };
    if s == t || max_hops == 0 {
        return Vec::new();
    }
    let mut found = Vec::new();
    let mut on_path = vec![false; adj.node_count()];
    let mut path = vec![s];
    on_path[s] = true;
    dfs(adj, t, max_hops, &mut path, &mut on_path, &mut found);
    found
        .into_iter()
        .map(|p: Vec<usize>| p.into_iter().map(|i| adj.id(i).clone()).collect())
        .collect()
}

fn dfs(
    adj: &TypedAdjacency,
    target: usize,
    max_hops: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    found: &mut Vec<Vec<usize>>,
) {
    let v = *path.last().expect("path starts non-empty");
    for &w in adj.successors(v) {
        if on_path[w] {
            continue;
        }
        if w == target {
            let mut p = path.clone();
            p.push(w);
            found.push(p);
            continue;
        }
        if path.len() < max_hops {
            on_path[w] = true;
            path.push(w);
            dfs(adj, target, max_hops, path, on_path, found);
            path.pop();
            on_path[w] = false;
        }
    }
}

/// Same contract as [`super::complete`], computed pair by pair from the
/// enumerated path set. Only defined on acyclic subgraphs.
pub fn complete_bruteforce(g: &KnowledgeGraph, cfg: &RelationshipConfig) -> Result<(KnowledgeGraph, CompletionReport)> {
    let started = Instant::now();
    check_transitive(g, cfg)?;
    let adj = typed_adjacency(g, &cfg.rel)?;
    if let Some(witness) = detect_cycles(&adj).witness {
        return Err(Error::CyclicGraph {
            rel: cfg.rel.clone(),
            witness: witness.into_iter().map(|id| id.to_string()).collect(),
        });
    }

    let n = adj.node_count();
    let mut accepted = Vec::new();
    let mut truncated = 0;
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let (x, z) = (adj.id(s), adj.id(t));
            let paths = enumerate_simple_paths(&adj, x, z, cfg.max_hops);
            if enumerate_simple_paths(&adj, x, z, n).len() > paths.len() {
                truncated += 1;
            }
            if paths.is_empty() {
                continue;
            }
            let mut per_path = Vec::with_capacity(paths.len());
            for p in &paths {
                per_path.push(cfg.decay.value(p.len() - 1)?);
            }
            let strength = match cfg.aggregation {
                Aggregation::Max => per_path.iter().copied().fold(f64::MIN, f64::max),
                Aggregation::Sum => per_path.iter().sum(),
                Aggregation::Avg => per_path.iter().sum::<f64>() / per_path.len() as f64,
            };
            if passes_threshold(strength, cfg.threshold) {
                accepted.push(Accepted {
                    source: s,
                    target: t,
                    strength,
                    shortest_hops: paths.iter().map(|p| p.len() - 1).min().unwrap_or(0),
                });
            }
        }
    }
    materialize(g, cfg, &adj, accepted, truncated, started)
}
