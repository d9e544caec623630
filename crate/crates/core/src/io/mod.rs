//! Loading and writing graph bundles, reports and Cypher scripts.

mod config;
mod cypher;
mod report;
mod tables;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use config::{parse_relationship_config, CompletionSettings, ConfigFile, RelationshipEntry, CONFIG_SCHEMA_VERSION};
pub use cypher::{cypher_script, quote_name, quote_string};
pub use report::{diff_csv, write_report, MetricsSection, ReportFormat, RunReport, Timings, ToolInfo, REPORT_SCHEMA_VERSION};
pub use tables::{edges_csv, format_strength, nodes_csv, read_edges, read_nodes};

use crate::engine::RelationshipConfig;
use crate::error::{Error, Result};
use crate::graph::{build_graph, KnowledgeGraph, RelationshipType};

pub const NODES_FILE: &str = "nodes.csv";
pub const EDGES_FILE: &str = "edges.csv";
pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphBundle {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    pub config: Option<PathBuf>,
}

impl GraphBundle {
    /// `nodes.csv`, `edges.csv` and, when present, `config.json` in `dir`.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        let config = dir.join(CONFIG_FILE);
        GraphBundle {
            nodes: dir.join(NODES_FILE),
            edges: dir.join(EDGES_FILE),
            config: config.exists().then_some(config),
        }
    }

    pub fn digests(&self) -> Result<Vec<InputDigest>> {
        let mut out = vec![InputDigest::of("nodes", &self.nodes)?, InputDigest::of("edges", &self.edges)?];
        if let Some(config) = &self.config {
            out.push(InputDigest::of("config", config)?);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub file: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(role: &str, path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let digest = Sha256::digest(&bytes);
        Ok(InputDigest {
            role: role.to_owned(),
            file: path
                .file_name()
                .map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned()),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        })
    }
}

/// Loads a bundle into a validated graph plus its completion configs.
///
/// Without a config file every edge type is registered as non-transitive
/// and no completion configs are returned.
pub fn load_bundle(b: &GraphBundle) -> Result<(KnowledgeGraph, Vec<RelationshipConfig>)> {
    let (registry, configs) = match &b.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let file = ConfigFile::parse(&text).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
                other => other,
            })?;
            (Some(file.registry()), file.completion_configs()?)
        }
        None => (None, Vec::new()),
    };

    let nodes = read_nodes(&b.nodes)?;
    let mut ids = HashSet::with_capacity(nodes.len());
    for (i, n) in nodes.iter().enumerate() {
        if !ids.insert(n.id.as_str()) {
            return Err(Error::Schema {
                file: b.nodes.clone(),
                line: i as u64 + 2,
                message: format!("duplicate node id `{}`", n.id),
            });
        }
    }

    let edges = match &registry {
        Some(reg) => {
            let names: HashSet<&str> = reg.iter().map(|r| r.name.as_str()).collect();
            read_edges(&b.edges, &|id| ids.contains(id), &|rel| names.contains(rel))?
        }
        None => read_edges(&b.edges, &|id| ids.contains(id), &|rel| !rel.is_empty())?,
    };

    let registry = registry.unwrap_or_else(|| {
        let mut seen = HashSet::new();
        edges
            .iter()
            .filter(|e| seen.insert(e.rel.clone()))
            .map(|e| RelationshipType::new(e.rel.clone(), false))
            .collect()
    });
    drop(ids);
    let graph = build_graph(nodes, edges, registry)?;
    Ok((graph, configs))
}

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn write_nodes(g: &KnowledgeGraph, path: &Path) -> Result<()> {
    write_atomic(path, &nodes_csv(g))
}

pub fn write_edges(g: &KnowledgeGraph, path: &Path) -> Result<()> {
    write_atomic(path, &edges_csv(g))
}

pub fn write_config(g: &KnowledgeGraph, configs: &[RelationshipConfig], path: &Path) -> Result<()> {
    write_atomic(path, ConfigFile::new(g.registry(), configs).to_json().as_bytes())
}

/// Writes `nodes.csv`, `edges.csv` and `config.json` into `dir`.
pub fn write_bundle(g: &KnowledgeGraph, configs: &[RelationshipConfig], dir: &Path) -> Result<GraphBundle> {
    let bundle = GraphBundle {
        nodes: dir.join(NODES_FILE),
        edges: dir.join(EDGES_FILE),
        config: Some(dir.join(CONFIG_FILE)),
    };
    write_nodes(g, &bundle.nodes)?;
    write_edges(g, &bundle.edges)?;
    write_config(g, configs, bundle.config.as_deref().expect("set above"))?;
    Ok(bundle)
}

pub fn export_cypher(g: &KnowledgeGraph, path: &Path) -> Result<()> {
    write_atomic(path, cypher_script(g).as_bytes())
}
