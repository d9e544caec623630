#![allow(dead_code)]

use kc_core::engine::{Aggregation, DecayFunction, RelationshipConfig};
use kc_core::{build_graph, Edge, KnowledgeGraph, Node, RelationshipType};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const REL: &str = "R";

/// Random DAG: arcs only go from lower to higher index.
pub fn random_dag(seed: u64, max_nodes: usize, edge_prob: f64) -> KnowledgeGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_nodes);
    let nodes: Vec<Node> = (0..n).map(|i| Node::new(format!("v{i:02}"), "V")).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(edge_prob) {
                edges.push(Edge::direct(format!("v{i:02}"), format!("v{j:02}"), REL));
            }
        }
    }
    build_graph(nodes, edges, vec![RelationshipType::new(REL, true)]).unwrap()
}

pub fn graph(names: &[&str], arcs: &[(&str, &str)]) -> KnowledgeGraph {
    build_graph(
        names.iter().map(|n| Node::new(*n, "N")).collect(),
        arcs.iter().map(|(s, t)| Edge::direct(*s, *t, REL)).collect(),
        vec![RelationshipType::new(REL, true)],
    )
    .unwrap()
}

pub fn decays() -> [DecayFunction; 3] {
    [
        DecayFunction::halving(),
        DecayFunction::PowerLaw { exponent: 1.0 },
        DecayFunction::Table {
            values: vec![0.9, 0.7, 0.5, 0.35, 0.2, 0.12, 0.08, 0.05, 0.03, 0.02, 0.01],
        },
    ]
}

/// The 9 decay x aggregation combinations with a hop bound covering any
/// path in a 12-node DAG.
pub fn config_matrix(threshold: f64) -> Vec<RelationshipConfig> {
    let mut out = Vec::new();
    for decay in decays() {
        for aggregation in Aggregation::ALL {
            out.push(RelationshipConfig::new(REL, decay.clone(), aggregation, threshold, 11));
        }
    }
    out
}

/// Linear fixed point of baseline-form PageRank solved directly:
/// `(I - d M^T) p = (1 - d) 1`, with dangling rows of `M` left at zero.
pub fn pagerank_direct(g: &KnowledgeGraph, damping: f64) -> Vec<(String, f64)> {
    let n = g.node_count();
    let pos = |id: &str| g.nodes().iter().position(|n| n.id.as_str() == id).unwrap();
    let mut out_deg = vec![0.0; n];
    for e in g.edges() {
        out_deg[pos(e.source.as_str())] += 1.0;
    }
    let mut a = nalgebra::DMatrix::<f64>::identity(n, n);
    for e in g.edges() {
        let (s, t) = (pos(e.source.as_str()), pos(e.target.as_str()));
        a[(t, s)] -= damping / out_deg[s];
    }
    let b = nalgebra::DVector::<f64>::from_element(n, 1.0 - damping);
    let p = a.lu().solve(&b).expect("nonsingular for d < 1");
    g.nodes().iter().map(|n| n.id.to_string()).zip(p.iter().copied()).collect()
}

/// Ordered pairs (x, z), x != z, with z reachable from x, by BFS.
pub fn reachable_pairs(g: &KnowledgeGraph, rel: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for start in g.nodes() {
        let mut seen = std::collections::HashSet::new();
        let mut queue = std::collections::VecDeque::from([start.id.to_string()]);
        while let Some(v) = queue.pop_front() {
            for e in g.edges().iter().filter(|e| e.rel == rel && e.source.as_str() == v) {
                if seen.insert(e.target.to_string()) {
                    queue.push_back(e.target.to_string());
                }
            }
        }
        seen.remove(start.id.as_str());
        let mut targets: Vec<String> = seen.into_iter().collect();
        targets.sort();
        out.extend(targets.into_iter().map(|t| (start.id.to_string(), t)));
    }
    out
}
