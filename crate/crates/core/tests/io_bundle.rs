mod common;

use std::fs;
use std::path::Path;

use common::{graph, random_dag, REL};
use kc_core::engine::{complete, RelationshipConfig};
use kc_core::io::{
    cypher_script, edges_csv, export_cypher, load_bundle, nodes_csv, write_bundle, write_report, GraphBundle,
    ReportFormat, RunReport, MetricsSection,
};
use kc_core::metrics::{degree_centrality, diff_metrics, Direction, RelFilter};
use kc_core::{build_graph, Edge, Error, Node, RelationshipType};
use proptest::prelude::*;

const CHAIN_CONFIG: &str = r#"{
  "schema_version": 1,
  "relationships": [
    {"name": "COMMANDS", "transitive": true,
     "completion": {"decay": {"kind": "exponential", "base": 0.5}, "aggregation": "sum", "threshold": 0.001, "max_hops": 7}}
  ]
}"#;

fn write_chain_bundle(dir: &Path, edges: &str) -> GraphBundle {
    fs::write(dir.join("nodes.csv"), "id,label\na,Thing\nb,Thing\nc,Thing\n").unwrap();
    fs::write(dir.join("edges.csv"), edges).unwrap();
    fs::write(dir.join("config.json"), CHAIN_CONFIG).unwrap();
    GraphBundle::in_dir(dir)
}

#[test]
fn loads_minimal_chain() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = write_chain_bundle(dir.path(), "source,target,type\na,b,COMMANDS\nb,c,COMMANDS\n");
    let (g, configs) = load_bundle(&bundle).unwrap();
    assert_eq!(g.node_count(), 3);
    assert_eq!(g.edge_count(), 2);
    assert_eq!(configs.len(), 1);
    assert_eq!(configs[0].threshold, 0.001);
    assert!(g.relationship("COMMANDS").unwrap().transitive);
}

#[test]
fn unknown_type_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = write_chain_bundle(dir.path(), "source,target,type\na,b,COMMANDS\nb,c,OWNS\n");
    match load_bundle(&bundle) {
        Err(Error::Schema { line, message, .. }) => {
            assert_eq!(line, 3);
            assert!(message.contains("OWNS"));
        }
        other => panic!("expected schema error, got {other:?}"),
    }
}

#[test]
fn parse_and_schema_errors_carry_locations() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = write_chain_bundle(dir.path(), "source,target,type,strength\na,b,COMMANDS,abc\n");
    assert!(matches!(load_bundle(&bundle), Err(Error::Parse { line: 2, .. })));

    let bundle = write_chain_bundle(dir.path(), "source,type\na,COMMANDS\n");
    assert!(matches!(load_bundle(&bundle), Err(Error::Schema { line: 1, .. })));

    let bundle = write_chain_bundle(dir.path(), "source,target,type\na,x,COMMANDS\n");
    assert!(matches!(load_bundle(&bundle), Err(Error::Schema { line: 2, .. })));

    let bundle = write_chain_bundle(dir.path(), "source,target,type,provenance\na,b,COMMANDS,guessed\n");
    assert!(matches!(load_bundle(&bundle), Err(Error::Parse { line: 2, .. })));

    let bundle = write_chain_bundle(dir.path(), "source,target,type\na,b,COMMANDS,extra\n");
    assert!(matches!(load_bundle(&bundle), Err(Error::Parse { .. })));

    fs::write(dir.path().join("config.json"), r#"{"schema_version":1,"relationships":[],"extra":1}"#).unwrap();
    assert!(matches!(load_bundle(&GraphBundle::in_dir(dir.path())), Err(Error::Config(_))));
}

#[test]
fn without_config_types_are_registered_non_transitive() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("nodes.csv"), "id,label\na,X\nb,X\n").unwrap();
    fs::write(dir.path().join("edges.csv"), "source,target,type\na,b,LIKES\n").unwrap();
    let (g, configs) = load_bundle(&GraphBundle::in_dir(dir.path())).unwrap();
    assert!(configs.is_empty());
    assert_eq!(g.registry(), &[RelationshipType::new("LIKES", false)]);
}

#[test]
fn completed_diamond_row() {
    let g = graph(&["a", "b", "c", "d"], &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]);
    let (done, _) = complete(&g, &RelationshipConfig::kinship(REL)).unwrap();
    let text = String::from_utf8(edges_csv(&done)).unwrap();
    assert!(text.lines().any(|l| l == "a,d,R,0.5,inferred"), "{text}");
}

#[test]
fn empty_graph_is_header_only() {
    let g = build_graph(vec![], vec![], vec![]).unwrap();
    assert_eq!(String::from_utf8(nodes_csv(&g)).unwrap(), "id,label,props\n");
    assert_eq!(String::from_utf8(edges_csv(&g)).unwrap(), "source,target,type,strength,provenance\n");
}

#[test]
fn cypher_for_completed_chain() {
    let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
    let (done, _) = complete(&g, &RelationshipConfig::kinship(REL)).unwrap();
    let script = cypher_script(&done);
    assert_eq!(script.lines().filter(|l| l.starts_with("CREATE (")).count(), 3);
    let rels: Vec<&str> = script.lines().filter(|l| l.starts_with("MATCH")).collect();
    assert_eq!(rels.len(), 3);
    assert_eq!(rels.iter().filter(|l| l.contains("\"inferred\"")).count(), 1);
    assert_eq!(rels.iter().filter(|l| l.contains("\"direct\"")).count(), 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.cypher");
    export_cypher(&done, &path).unwrap();
    assert_eq!(fs::read_to_string(path).unwrap(), script);
}

#[test]
fn report_json_and_tables() {
    let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
    let (done, completion) = complete(&g, &RelationshipConfig::kinship(REL)).unwrap();
    let before = degree_centrality(&g, &RelFilter::All, Direction::In, false).unwrap();
    let after = degree_centrality(&done, &RelFilter::All, Direction::In, false).unwrap();
    let mut report = RunReport::new(vec![], vec![RelationshipConfig::kinship(REL)]);
    report.completions.push(completion);
    report.metrics.push(MetricsSection {
        name: "degree".into(),
        before: before.params.clone(),
        after: after.params.clone(),
        diff: diff_metrics(&before, &after).unwrap(),
    });

    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    write_report(&report, &json_path, ReportFormat::Json).unwrap();
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    let records = json["metrics"][0]["diff"]["records"].as_array().unwrap();
    let a = records.iter().find(|r| r["node"] == "a").unwrap();
    assert_eq!(a["pct"], 0.0);
    let c = records.iter().find(|r| r["node"] == "c").unwrap();
    assert_eq!((c["before"].as_f64(), c["after"].as_f64(), c["pct"].as_f64()), (Some(1.0), Some(2.0), Some(100.0)));
    assert!(json.get("timings").is_none());
    let back: RunReport = serde_json::from_value(json).unwrap();
    assert_eq!(back.metrics, report.metrics);

    // b has in-degree 1 before and after; make a zero-baseline case explicit
    let before0 = degree_centrality(&g, &RelFilter::All, Direction::Out, false).unwrap();
    let after0 = degree_centrality(&done, &RelFilter::All, Direction::Total, false).unwrap();
    report.metrics[0].diff = diff_metrics(&before0, &after0).unwrap();
    let text = report.to_json();
    assert!(text.contains("\"pct\": \"new\""), "{text}");

    let tables = write_report(&report, &dir.path().join("tables"), ReportFormat::CsvTables).unwrap();
    assert_eq!(tables.len(), 1);
    let csv = fs::read_to_string(&tables[0]).unwrap();
    assert!(csv.starts_with("node,before,after,delta,pct\n"));
    assert!(csv.lines().any(|l| l == "c,0,2,2,new"), "{csv}");
}

fn with_properties(seed: u64) -> kc_core::KnowledgeGraph {
    let g = random_dag(seed, 10, 0.4);
    let nodes: Vec<Node> = g
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| {
            Node::new(format!("{}, \"q\"", n.id), "V")
                .with_property("rank", kc_core::graph::PropertyValue::Int(i as i64))
                .with_property("w", kc_core::graph::PropertyValue::Float(i as f64 / 3.0))
        })
        .collect();
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .map(|e| Edge::direct(format!("{}, \"q\"", e.source), format!("{}, \"q\"", e.target), REL))
        .collect();
    build_graph(nodes, edges, vec![RelationshipType::new(REL, true)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bundle_round_trip_is_exact_and_byte_stable(seed in any::<u64>(), base in 0.05f64..0.95) {
        let g = with_properties(seed);
        let cfg = RelationshipConfig::new(REL, kc_core::engine::DecayFunction::Exponential { base }, kc_core::engine::Aggregation::Sum, 0.0, 9);
        let (done, _) = complete(&g, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let bundle = write_bundle(&done, std::slice::from_ref(&cfg), dir.path()).unwrap();
        let first = (fs::read(&bundle.nodes).unwrap(), fs::read(&bundle.edges).unwrap());
        let (back, configs) = load_bundle(&bundle).unwrap();
        prop_assert_eq!(back.nodes(), done.nodes());
        prop_assert_eq!(back.edges(), done.edges());
        prop_assert_eq!(back.registry(), done.registry());
        prop_assert_eq!(&configs, &vec![cfg.clone()]);
        let again = write_bundle(&back, &configs, dir.path()).unwrap();
        prop_assert_eq!(fs::read(&again.nodes).unwrap(), first.0);
        prop_assert_eq!(fs::read(&again.edges).unwrap(), first.1);
    }
}
