//! Property-graph model: typed nodes, typed directed edges and the
//! relationship registry with its transitivity flags.
//!
//! A [`KnowledgeGraph`] is validated on construction and never mutated in
//! place afterwards. Completion produces a new graph value.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl std::borrow::Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Scalar node property value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PropertyValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub label: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub properties: BTreeMap<String, PropertyValue>,
}

impl Node {
    pub fn new(id: impl Into<NodeId>, label: impl Into<String>) -> Self {
        Node {
            id: id.into(),
            label: label.into(),
            properties: BTreeMap::new(),
        }
    }

    pub fn with_property(mut self, key: impl Into<String>, value: PropertyValue) -> Self {
        self.properties.insert(key.into(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationshipType {
    pub name: String,
    pub transitive: bool,
}

impl RelationshipType {
    pub fn new(name: impl Into<String>, transitive: bool) -> Self {
        RelationshipType {
            name: name.into(),
            transitive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Direct,
    Inferred,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Direct => "direct",
            Provenance::Inferred => "inferred",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub rel: String,
    pub strength: Option<f64>,
    pub provenance: Provenance,
}

impl Edge {
    pub fn direct(source: impl Into<NodeId>, target: impl Into<NodeId>, rel: impl Into<String>) -> Self {
        Edge {
            source: source.into(),
            target: target.into(),
            rel: rel.into(),
            strength: None,
            provenance: Provenance::Direct,
        }
    }

    pub fn with_strength(mut self, strength: f64) -> Self {
        self.strength = Some(strength);
        self
    }

    /// Strength used by weighted metrics; edges without one count as 1.
    pub fn weight(&self) -> f64 {
        self.strength.unwrap_or(1.0)
    }
}

type TripleKey = (usize, usize, usize);

/// The `(V, E, R)` tuple: nodes, typed directed edges, relationship registry.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    nodes: Vec<Node>,
    node_index: HashMap<NodeId, usize>,
    edges: Vec<Edge>,
    edge_index: HashMap<TripleKey, usize>,
    registry: Vec<RelationshipType>,
    rel_index: HashMap<String, usize>,
    duplicate_edges: usize,
}

/// Validates raw inputs and assembles a graph.
///
/// Repeated `(source, target, rel)` triples collapse onto the first
/// occurrence; how many were dropped is available from
/// [`KnowledgeGraph::duplicate_edge_count`].
pub fn build_graph(
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    registry: Vec<RelationshipType>,
) -> Result<KnowledgeGraph> {
    let mut rel_index = HashMap::with_capacity(registry.len());
    for (i, rel) in registry.iter().enumerate() {
        if rel_index.insert(rel.name.clone(), i).is_some() {
            return Err(Error::DuplicateRelationship(rel.name.clone()));
        }
    }

    let mut node_index = HashMap::with_capacity(nodes.len());
    for (i, node) in nodes.iter().enumerate() {
        if node.label.is_empty() {
            return Err(Error::EmptyLabel(node.id.to_string()));
        }
        if node_index.insert(node.id.clone(), i).is_some() {
            return Err(Error::DuplicateNode(node.id.to_string()));
        }
    }

    let mut graph = KnowledgeGraph {
        nodes,
        node_index,
        edges: Vec::with_capacity(edges.len()),
        edge_index: HashMap::with_capacity(edges.len()),
        registry,
        rel_index,
        duplicate_edges: 0,
    };

    for edge in edges {
        let key = graph.validate_edge(&edge)?;
        if graph.edge_index.contains_key(&key) {
            graph.duplicate_edges += 1;
            continue;
        }
        graph.edge_index.insert(key, graph.edges.len());
        graph.edges.push(edge);
    }
    if graph.duplicate_edges > 0 {
        log::warn!(
            "collapsed {} duplicate (source, target, type) edge(s)",
            graph.duplicate_edges
        );
    }
    Ok(graph)
}

impl KnowledgeGraph {
    fn validate_edge(&self, edge: &Edge) -> Result<TripleKey> {
        let rel = *self
            .rel_index
            .get(&edge.rel)
            .ok_or_else(|| Error::UnknownRelationship(edge.rel.clone()))?;
        let endpoint = |id: &NodeId| {
            self.node_index
                .get(id)
                .copied()
                .ok_or_else(|| Error::DanglingEndpoint {
                    from: edge.source.to_string(),
                    to: edge.target.to_string(),
                    missing: id.to_string(),
                })
        };
        let s = endpoint(&edge.source)?;
        let t = endpoint(&edge.target)?;
        if s == t {
            return Err(Error::SelfLoop(edge.source.to_string()));
        }
        if let Some(value) = edge.strength {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidStrength {
                    from: edge.source.to_string(),
                    to: edge.target.to_string(),
                    value,
                });
            }
        }
        if edge.provenance == Provenance::Inferred && edge.strength.is_none() {
            return Err(Error::InvalidStrength {
                from: edge.source.to_string(),
                to: edge.target.to_string(),
                value: f64::NAN,
            });
        }
        Ok((s, t, rel))
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn registry(&self) -> &[RelationshipType] {
        &self.registry
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn duplicate_edge_count(&self) -> usize {
        self.duplicate_edges
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.node_index.get(id).map(|&i| &self.nodes[i])
    }

    pub(crate) fn node_position(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn relationship(&self, name: &str) -> Option<&RelationshipType> {
        self.rel_index.get(name).map(|&i| &self.registry[i])
    }

    pub fn find_edge(&self, source: &str, target: &str, rel: &str) -> Option<&Edge> {
        let key = (
            self.node_position(source)?,
            self.node_position(target)?,
            *self.rel_index.get(rel)?,
        );
        self.edge_index.get(&key).map(|&i| &self.edges[i])
    }

    pub fn edges_of<'a>(&'a self, rel: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.rel == rel)
    }

    /// Sets the strength of an existing edge, or appends `edge` when its
    /// triple is new. Only used by completion on a freshly cloned graph.
    pub(crate) fn upsert_strength(&mut self, edge: Edge) -> Result<UpsertOutcome> {
        let key = self.validate_edge(&edge)?;
        match self.edge_index.get(&key) {
            Some(&i) => {
                let existing = &mut self.edges[i];
                let provenance = existing.provenance;
                existing.strength = edge.strength;
                Ok(UpsertOutcome::Updated(provenance))
            }
            None => {
                self.edge_index.insert(key, self.edges.len());
                self.edges.push(edge);
                Ok(UpsertOutcome::Inserted)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum UpsertOutcome {
    Inserted,
    Updated(Provenance),
}

/// Out-neighbour lists of the Direct edges of one relationship type.
///
/// Node indices follow the graph's node order, so every node of the graph
/// has an index even when it has no arcs of this type.
#[derive(Debug, Clone)]
pub struct TypedAdjacency {
    rel: String,
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    out: Vec<Vec<usize>>,
}

pub fn typed_adjacency(g: &KnowledgeGraph, rel: &str) -> Result<TypedAdjacency> {
    if g.relationship(rel).is_none() {
        return Err(Error::UnknownRelationship(rel.to_owned()));
    }
    let ids: Vec<NodeId> = g.nodes.iter().map(|n| n.id.clone()).collect();
    let mut out = vec![Vec::new(); ids.len()];
    for edge in g.edges_of(rel) {
        if edge.provenance != Provenance::Direct {
            continue;
        }
        let s = g.node_index[&edge.source];
        let t = g.node_index[&edge.target];
        out[s].push(t);
    }
    for list in &mut out {
        list.sort_unstable();
    }
    Ok(TypedAdjacency {
        rel: rel.to_owned(),
        index: g.node_index.clone(),
        ids,
        out,
    })
}

impl TypedAdjacency {
    /// Builds an adjacency directly from index arcs. Arcs must reference
    /// indices below `ids.len()`.
    pub fn from_arcs(rel: impl Into<String>, ids: Vec<NodeId>, arcs: &[(usize, usize)]) -> Self {
        let mut out = vec![Vec::new(); ids.len()];
        for &(s, t) in arcs {
            out[s].push(t);
        }
        for list in &mut out {
            list.sort_unstable();
            list.dedup();
        }
        let index = ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();
        TypedAdjacency {
            rel: rel.into(),
            ids,
            index,
            out,
        }
    }

    pub fn rel(&self) -> &str {
        &self.rel
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn id(&self, index: usize) -> &NodeId {
        &self.ids[index]
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn successors(&self, index: usize) -> &[usize] {
        &self.out[index]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |&t| (s, t)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    pub acyclic: bool,
    /// Closed node sequence `[v0, v1, ..., v0]` when a cycle exists.
    pub witness: Option<Vec<NodeId>>,
}

pub fn detect_cycles(adj: &TypedAdjacency) -> CycleReport {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }

    let n = adj.node_count();
    let mut mark = vec![Mark::White; n];
    let mut parent = vec![usize::MAX; n];
    // (node, next successor position)
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if mark[root] != Mark::White {
            continue;
        }
        mark[root] = Mark::Grey;
        stack.push((root, 0));
        while let Some(&mut (v, ref mut pos)) = stack.last_mut() {
            let succ = adj.successors(v);
            if *pos == succ.len() {
                mark[v] = Mark::Black;
                stack.pop();
                continue;
            }
            let w = succ[*pos];
            *pos += 1;
            match mark[w] {
                Mark::White => {
                    mark[w] = Mark::Grey;
                    parent[w] = v;
                    stack.push((w, 0));
                }
                Mark::Grey => {
                    let mut cycle = vec![v];
                    let mut cur = v;
                    while cur != w {
                        cur = parent[cur];
                        cycle.push(cur);
                    }
                    cycle.reverse();
                    cycle.push(w);
                    return CycleReport {
                        acyclic: false,
                        witness: Some(cycle.into_iter().map(|i| adj.id(i).clone()).collect()),
                    };
                }
                Mark::Black => {}
            }
        }
    }
    CycleReport {
        acyclic: true,
        witness: None,
    }
}
