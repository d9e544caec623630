//! Knowledge completion for scalable transitive relationships.
//!
//! Implicit relationships along chains of a transitive relationship type are
//! materialized with a strength that decays with hop count and is aggregated
//! over all connecting paths. Degree and PageRank snapshots taken before and
//! after completion are diffed to show how the topology changed.
//!
//! ```
//! use kc_core::datasets::{gen_roman_empire, roman_empire_config, RomanEmpireParams, EMPEROR};
//! use kc_core::engine::complete;
//! use kc_core::metrics::{degree_centrality, Direction, RelFilter};
//!
//! let g = gen_roman_empire(&RomanEmpireParams::default()).unwrap();
//! let (completed, report) = complete(&g, &roman_empire_config()).unwrap();
//! assert_eq!(report.inferred_edge_count, 74);
//! let out = degree_centrality(&completed, &RelFilter::All, Direction::Out, false).unwrap();
//! assert_eq!(out.get(EMPEROR), Some(47.0));
//! ```

pub mod datasets;
pub mod engine;
mod error;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod pipeline;

pub use error::{Error, Result};
pub use graph::{build_graph, detect_cycles, typed_adjacency, Edge, KnowledgeGraph, Node, NodeId, Provenance, RelationshipType};
