//! Walk counting by length over a typed adjacency.
//!
//! For each source node the frontier of walk counts is pushed one hop at a
//! time, so `counts[h - 1]` for a target is the number of length-`h` walks
//! reaching it. On an acyclic subgraph walks and simple paths coincide.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{detect_cycles, NodeId, TypedAdjacency};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CyclePolicy {
    /// Refuse to run on a cyclic subgraph.
    #[default]
    RequireDag,
    /// Count walks up to the hop bound even when cycles exist.
    BoundedWalks,
}

/// Counts and (optionally) aggregated strength for one ordered pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairEntry {
    /// `counts[h - 1]` walks of length `h`.
    pub counts: Vec<u64>,
    pub strength: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairStrengths {
    pub max_hops: usize,
    pub pairs: BTreeMap<(NodeId, NodeId), PairEntry>,
    /// Ordered pairs connected by at least one walk longer than `max_hops`.
    pub truncated_pairs: usize,
}

/// Walk counts from a single source, keyed by target index in ascending order.
pub(crate) struct SourceWalks {
    pub targets: Vec<(usize, Vec<u64>)>,
    pub truncated: usize,
}

/// Reusable per-thread buffers sized to the node count.
pub(crate) struct Scratch {
    next: Vec<u64>,
    touched: Vec<usize>,
    slot: Vec<usize>,
    seen: Vec<bool>,
}

impl Scratch {
    pub fn new(n: usize) -> Self {
        Scratch {
            next: vec![0; n],
            touched: Vec::new(),
            slot: vec![usize::MAX; n],
            seen: vec![false; n],
        }
    }
}

pub(crate) fn walks_from(
    adj: &TypedAdjacency,
    source: usize,
    max_hops: usize,
    scratch: &mut Scratch,
) -> Result<SourceWalks> {
    let mut frontier: Vec<(usize, u64)> = vec![(source, 1)];
    let mut targets: Vec<(usize, Vec<u64>)> = Vec::new();

    for h in 1..=max_hops {
        if frontier.is_empty() {
            break;
        }
        for &(v, c) in &frontier {
            for &w in adj.successors(v) {
                if scratch.next[w] == 0 {
                    scratch.touched.push(w);
                }
                scratch.next[w] = scratch.next[w].checked_add(c).ok_or_else(|| Error::CountOverflow {
                    node: adj.id(source).to_string(),
                    hops: h,
                })?;
            }
        }
        scratch.touched.sort_unstable();
        frontier.clear();
        for &w in &scratch.touched {
            let c = std::mem::take(&mut scratch.next[w]);
            frontier.push((w, c));
            if w == source {
                continue;
            }
            if scratch.slot[w] == usize::MAX {
                scratch.slot[w] = targets.len();
                targets.push((w, vec![0; max_hops]));
            }
            targets[scratch.slot[w]].1[h - 1] = c;
        }
        scratch.touched.clear();
    }

    let truncated = count_beyond(adj, source, &frontier, scratch);

    for (w, _) in &targets {
        scratch.slot[*w] = usize::MAX;
    }
    targets.sort_unstable_by_key(|(w, _)| *w);
    Ok(SourceWalks { targets, truncated })
}

/// Number of distinct targets reachable in at least one more hop from the
/// final frontier, i.e. pairs with walks longer than the bound.
fn count_beyond(adj: &TypedAdjacency, source: usize, frontier: &[(usize, u64)], scratch: &mut Scratch) -> usize {
    let mut stack: Vec<usize> = Vec::new();
    let mut visited: Vec<usize> = Vec::new();
    for &(v, _) in frontier {
        for &w in adj.successors(v) {
            if !scratch.seen[w] {
                scratch.seen[w] = true;
                visited.push(w);
                stack.push(w);
            }
        }
    }
    while let Some(v) = stack.pop() {
        for &w in adj.successors(v) {
            if !scratch.seen[w] {
                scratch.seen[w] = true;
                visited.push(w);
                stack.push(w);
            }
        }
    }
    let count = visited.iter().filter(|&&w| w != source).count();
    for w in visited {
        scratch.seen[w] = false;
    }
    count
}

pub(crate) fn check_policy(adj: &TypedAdjacency, policy: CyclePolicy) -> Result<()> {
    if policy == CyclePolicy::RequireDag {
        let report = detect_cycles(adj);
        if let Some(witness) = report.witness {
            return Err(Error::CyclicGraph {
                rel: adj.rel().to_owned(),
                witness: witness.into_iter().map(|id| id.to_string()).collect(),
            });
        }
    }
    Ok(())
}

/// Per-length walk counts for every ordered pair `x != z` joined by at
/// least one walk of length `1..=max_hops`. Strengths are left unset.
pub fn count_paths_by_length(adj: &TypedAdjacency, max_hops: usize, policy: CyclePolicy) -> Result<PairStrengths> {
    if max_hops == 0 {
        return Err(Error::Config("max_hops must be >= 1".into()));
    }
    check_policy(adj, policy)?;
    let mut scratch = Scratch::new(adj.node_count());
    let mut pairs = BTreeMap::new();
    let mut truncated_pairs = 0;
    for source in 0..adj.node_count() {
        let walks = walks_from(adj, source, max_hops, &mut scratch)?;
        truncated_pairs += walks.truncated;
        for (t, counts) in walks.targets {
            pairs.insert(
                (adj.id(source).clone(), adj.id(t).clone()),
                PairEntry { counts, strength: None },
            );
        }
    }
    Ok(PairStrengths {
        max_hops,
        pairs,
        truncated_pairs,
    })
}
