//! Node and edge CSV tables.
//!
//! Nodes: `id,label[,props]` where `props` is a flat JSON object.
//! Edges: `source,target,type[,strength][,provenance]`. Output always carries
//! every column; an absent strength is an empty cell.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Edge, KnowledgeGraph, Node, NodeId, PropertyValue, Provenance};

pub const NODE_COLUMNS: [&str; 3] = ["id", "label", "props"];
pub const EDGE_COLUMNS: [&str; 5] = ["source", "target", "type", "strength", "provenance"];

struct Columns {
    positions: Vec<Option<usize>>,
}

impl Columns {
    fn resolve(file: &Path, header: &csv::StringRecord, known: &[&str], required: usize) -> Result<Self> {
        for name in header.iter() {
            if !known.contains(&name) {
                return Err(Error::Schema {
                    file: file.to_path_buf(),
                    line: 1,
                    message: format!("unknown column `{name}`"),
                });
            }
        }
        let positions: Vec<Option<usize>> = known.iter().map(|k| header.iter().position(|h| h == *k)).collect();
        if let Some(missing) = known[..required].iter().zip(&positions).find(|(_, p)| p.is_none()) {
            return Err(Error::Schema {
                file: file.to_path_buf(),
                line: 1,
                message: format!("missing required column `{}`", missing.0),
            });
        }
        Ok(Columns { positions })
    }

    fn get<'r>(&self, record: &'r csv::StringRecord, column: usize) -> Option<&'r str> {
        self.positions[column].and_then(|p| record.get(p))
    }
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

fn csv_error(path: &Path, err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        kind => Error::Parse {
            file: path.to_path_buf(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

pub fn read_nodes(path: &Path) -> Result<Vec<Node>> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let cols = Columns::resolve(path, &header, &NODE_COLUMNS, 2)?;
    let mut nodes = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = line_of(&record);
        let parse = |message: String| Error::Parse {
            file: path.to_path_buf(),
            line,
            message,
        };
        let id = cols.get(&record, 0).unwrap_or_default();
        if id.is_empty() {
            return Err(parse("empty node id".into()));
        }
        let label = cols.get(&record, 1).unwrap_or_default();
        if label.is_empty() {
            return Err(parse(format!("node `{id}` has an empty label")));
        }
        let properties = match cols.get(&record, 2) {
            None | Some("") => BTreeMap::new(),
            Some(raw) => serde_json::from_str::<BTreeMap<String, PropertyValue>>(raw)
                .map_err(|e| parse(format!("props must be a flat JSON object of scalars: {e}")))?,
        };
        nodes.push(Node {
            id: NodeId::new(id),
            label: label.to_owned(),
            properties,
        });
    }
    Ok(nodes)
}

/// Reads edges, checking each row against the known node ids and relationship
/// names so errors point at the offending line.
pub fn read_edges(path: &Path, node_ids: &dyn Fn(&str) -> bool, rel_known: &dyn Fn(&str) -> bool) -> Result<Vec<Edge>> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let cols = Columns::resolve(path, &header, &EDGE_COLUMNS, 3)?;
    let mut edges = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = line_of(&record);
        let parse = |message: String| Error::Parse {
            file: path.to_path_buf(),
            line,
            message,
        };
        let schema = |message: String| Error::Schema {
            file: path.to_path_buf(),
            line,
            message,
        };
        let source = cols.get(&record, 0).unwrap_or_default();
        let target = cols.get(&record, 1).unwrap_or_default();
        let rel = cols.get(&record, 2).unwrap_or_default();
        if !rel_known(rel) {
            return Err(schema(format!("unknown relationship type `{rel}`")));
        }
        for endpoint in [source, target] {
            if !node_ids(endpoint) {
                return Err(schema(format!("edge {source} -> {target} references missing node `{endpoint}`")));
            }
        }
        if source == target {
            return Err(schema(format!("self-loop on node `{source}`")));
        }
        let strength = match cols.get(&record, 3) {
            None | Some("") => None,
            Some(raw) => {
                let v: f64 = raw.trim().parse().map_err(|_| parse(format!("invalid strength `{raw}`")))?;
                if !(v.is_finite() && v > 0.0) {
                    return Err(parse(format!("strength {v} must be finite and > 0")));
                }
                Some(v)
            }
        };
        let provenance = match cols.get(&record, 4) {
            None | Some("") | Some("direct") => Provenance::Direct,
            Some("inferred") => Provenance::Inferred,
            Some(other) => return Err(parse(format!("provenance `{other}` is neither `direct` nor `inferred`"))),
        };
        if provenance == Provenance::Inferred && strength.is_none() {
            return Err(parse("inferred edge without strength".into()));
        }
        edges.push(Edge {
            source: NodeId::new(source),
            target: NodeId::new(target),
            rel: rel.to_owned(),
            strength,
            provenance,
        });
    }
    Ok(edges)
}

const IN_MEMORY: &str = "in-memory csv write with fixed-width rows";

/// Shortest representation that parses back to the same `f64`.
pub fn format_strength(v: f64) -> String {
    format!("{v}")
}

pub fn nodes_csv(g: &KnowledgeGraph) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(NODE_COLUMNS).expect(IN_MEMORY);
    for node in g.nodes() {
        let props = if node.properties.is_empty() {
            String::new()
        } else {
            serde_json::to_string(&node.properties).expect("scalar map serializes")
        };
        w.write_record([node.id.as_str(), node.label.as_str(), props.as_str()]).expect(IN_MEMORY);
    }
    w.into_inner().expect(IN_MEMORY)
}

pub fn edges_csv(g: &KnowledgeGraph) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(EDGE_COLUMNS).expect(IN_MEMORY);
    for e in g.edges() {
        let strength = e.strength.map(format_strength).unwrap_or_default();
        w.write_record([
            e.source.as_str(),
            e.target.as_str(),
            e.rel.as_str(),
            strength.as_str(),
            e.provenance.as_str(),
        ])
        .expect(IN_MEMORY);
    }
    w.into_inner().expect(IN_MEMORY)
}
