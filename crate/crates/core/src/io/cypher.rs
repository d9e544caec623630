//! Cypher import script: one statement per line, nodes sorted by id then
//! edges sorted by `(source, target, type)`, wrapped in transaction batches.

use std::fmt::Write as _;

use crate::graph::{KnowledgeGraph, PropertyValue};

pub const STATEMENTS_PER_BATCH: usize = 500;

pub fn quote_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Labels, relationship types and property keys: bare when they are plain
/// identifiers, otherwise backtick-quoted.
pub fn quote_name(s: &str) -> String {
    let plain = s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        s.to_owned()
    } else {
        format!("`{}`", s.replace('`', "``"))
    }
}

fn float_literal(v: f64) -> String {
    // Debug keeps a decimal point or exponent, so Cypher reads a float.
    format!("{v:?}")
}

fn property_literal(v: &PropertyValue) -> String {
    match v {
        PropertyValue::Bool(b) => b.to_string(),
        PropertyValue::Int(i) => i.to_string(),
        PropertyValue::Float(f) => float_literal(*f),
        PropertyValue::Str(s) => quote_string(s),
    }
}

pub fn cypher_script(g: &KnowledgeGraph) -> String {
    let mut statements = Vec::with_capacity(g.node_count() + g.edge_count());

    let mut nodes: Vec<_> = g.nodes().iter().collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    for node in nodes {
        let mut props = format!("id: {}", quote_string(node.id.as_str()));
        for (k, v) in &node.properties {
            if k == "id" {
                continue;
            }
            let _ = write!(props, ", {}: {}", quote_name(k), property_literal(v));
        }
        statements.push(format!("CREATE (:{} {{{props}}});", quote_name(&node.label)));
    }

    let mut edges: Vec<_> = g.edges().iter().collect();
    edges.sort_by(|a, b| (&a.source, &a.target, &a.rel).cmp(&(&b.source, &b.target, &b.rel)));
    for e in edges {
        let mut props = String::new();
        if let Some(s) = e.strength {
            let _ = write!(props, "strength: {}, ", float_literal(s));
        }
        let _ = write!(props, "provenance: {}", quote_string(e.provenance.as_str()));
        statements.push(format!(
            "MATCH (a {{id: {}}}),(b {{id: {}}}) CREATE (a)-[:{} {{{props}}}]->(b);",
            quote_string(e.source.as_str()),
            quote_string(e.target.as_str()),
            quote_name(&e.rel),
        ));
    }

    let mut out = format!(
        "// {} nodes, {} relationships\n",
        g.node_count(),
        g.edge_count()
    );
    for batch in statements.chunks(STATEMENTS_PER_BATCH) {
        out.push_str(":begin\n");
        for stmt in batch {
            out.push_str(stmt);
            out.push('\n');
        }
        out.push_str(":commit\n");
    }
    out
}
