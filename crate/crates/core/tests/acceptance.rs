//! Acceptance criteria, one test each. Run with `--nocapture` to see the
//! per-criterion PASS/FAIL lines.

mod common;

use std::collections::{BTreeMap, HashSet};
use std::time::{Duration, Instant};

use common::{config_matrix, graph, pagerank_direct, random_dag, reachable_pairs, REL};
use kc_core::datasets::{
    family_tree_config, gen_family_tree, gen_roman_empire, roman_empire_config, FamilyTreeParams, RomanEmpireParams,
    COMMANDS, EMPEROR, RELATIVE_OF,
};
use kc_core::engine::{complete, complete_bruteforce, Aggregation, DecayFunction, RecordKind, RelationshipConfig};
use kc_core::io::{write_bundle, GraphBundle};
use kc_core::metrics::{
    degree_centrality, diff_metrics, pagerank, top_changes, ChangeDirection, Direction, MetricParams, MetricsSnapshot,
    PageRankParams, Pct, RelFilter,
};
use kc_core::pipeline::{run_pipeline, PipelineOptions, REPORT_FILE};
use kc_core::{KnowledgeGraph, NodeId, Provenance};

fn verdict(id: u32, name: &str, ok: bool, detail: impl AsRef<str>) {
    println!(
        "[{}] criterion {id}: {name} ({})",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    assert!(ok, "criterion {id} failed: {}", detail.as_ref());
}

fn inferred_edges(g: &KnowledgeGraph) -> BTreeMap<(String, String), f64> {
    g.edges()
        .iter()
        .filter(|e| e.provenance == Provenance::Inferred)
        .map(|e| ((e.source.to_string(), e.target.to_string()), e.strength.unwrap()))
        .collect()
}

fn all_strengths(g: &KnowledgeGraph) -> BTreeMap<(String, String), Option<f64>> {
    g.edges()
        .iter()
        .map(|e| ((e.source.to_string(), e.target.to_string()), e.strength))
        .collect()
}

#[test]
fn c1_oracle_equivalence_on_random_dags() {
    let started = Instant::now();
    let mut mismatches = Vec::new();
    let mut max_err = 0.0f64;
    let mut runs = 0;
    for seed in 0..200u64 {
        let g = random_dag(seed, 12, 0.3);
        for cfg in config_matrix(0.05) {
            runs += 1;
            let (fast, _) = complete(&g, &cfg).unwrap();
            let (slow, _) = complete_bruteforce(&g, &cfg).unwrap();
            let (fi, si) = (inferred_edges(&fast), inferred_edges(&slow));
            if fi.keys().ne(si.keys()) {
                mismatches.push(format!("seed {seed} {:?}/{:?}: edge sets differ", cfg.decay, cfg.aggregation));
                continue;
            }
            for ((_, a), (_, b)) in all_strengths(&fast).iter().zip(all_strengths(&slow).iter()) {
                if let (Some(a), Some(b)) = (a, b) {
                    max_err = max_err.max((a - b).abs());
                }
            }
        }
    }
    let elapsed = started.elapsed();
    verdict(
        1,
        "complete == complete_bruteforce on 200 random DAGs x 9 configs",
        mismatches.is_empty() && max_err <= 1e-12 && elapsed < Duration::from_secs(30),
        format!("{runs} runs, {} mismatches, max |dS| = {max_err:e}, {elapsed:.2?}", mismatches.len()),
    );
}

#[test]
fn c2_kinship_threshold_semantics() {
    // p0 .. p8: p0 -> p7 is 7 hops, p0 -> p8 is 8 hops
    let names: Vec<String> = (0..9).map(|i| format!("p{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let arcs: Vec<(&str, &str)> = refs.windows(2).map(|w| (w[0], w[1])).collect();
    let g = graph(&refs, &arcs);
    let cfg = RelationshipConfig::new(REL, DecayFunction::halving(), Aggregation::Sum, 1.0 / 128.0, 7);
    let (out, _) = complete(&g, &cfg).unwrap();
    let seven = out.find_edge("p0", "p7", REL).and_then(|e| e.strength);
    let eight = out.find_edge("p0", "p8", REL);
    verdict(
        2,
        "7-hop pair kept at S = tau = 1/128, 8-hop pair dropped",
        seven == Some(0.0078125) && eight.is_none(),
        format!("S(p0,p7) = {seven:?}, p0->p8 present: {}", eight.is_some()),
    );
}

#[test]
fn c3_diamond_aggregation() {
    let g = graph(&["a", "b", "c", "d"], &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]);
    let mut got = Vec::new();
    for (agg, expected) in [(Aggregation::Sum, 0.5), (Aggregation::Max, 0.25), (Aggregation::Avg, 0.25)] {
        let cfg = RelationshipConfig::new(REL, DecayFunction::halving(), agg, 0.0, 7);
        let (out, _) = complete(&g, &cfg).unwrap();
        let s = out.find_edge("a", "d", REL).and_then(|e| e.strength);
        got.push((agg, s, expected));
    }
    verdict(
        3,
        "double-descent diamond: Sum 0.5, Max 0.25, Avg 0.25",
        got.iter().all(|(_, s, e)| *s == Some(*e)),
        format!("{got:?}"),
    );
}

#[test]
fn c4_roman_empire_reconstruction() {
    let started = Instant::now();
    let g = gen_roman_empire(&RomanEmpireParams::default()).unwrap();
    let (done, report) = complete(&g, &roman_empire_config()).unwrap();

    let reachable = reachable_pairs(&g, COMMANDS);
    let emperor_reach = reachable.iter().filter(|(s, _)| s == EMPEROR).count();
    let out_after = degree_centrality(&done, &RelFilter::All, Direction::Out, false).unwrap();
    let a = out_after.get(EMPEROR) == Some(emperor_reach as f64);

    let before = degree_centrality(&g, &RelFilter::All, Direction::Total, false).unwrap();
    let after = degree_centrality(&done, &RelFilter::All, Direction::Total, false).unwrap();
    let diff = diff_metrics(&before, &after).unwrap();
    let top = top_changes(&diff, 3, ChangeDirection::Increase);
    let b = top[0].node.as_str() == EMPEROR;
    let emperor_pct = diff.records.iter().find(|r| r.node.as_str() == EMPEROR).unwrap().pct;
    let c = matches!(emperor_pct, Pct::Finite(p) if p >= 1000.0);

    let provinces: Vec<&NodeId> = g.nodes().iter().filter(|n| n.label == "Province").map(|n| &n.id).collect();
    let d = provinces.iter().all(|id| out_after.get(id.as_str()) == Some(0.0));

    let closure = report.inferred_edge_count == reachable.len() - g.edge_count();
    let elapsed = started.elapsed();
    verdict(
        4,
        "Roman Empire hierarchy: Emperor reach, top increase, >= 1000%, leaves stay at out-degree 0",
        a && b && c && d && closure && elapsed < Duration::from_secs(1),
        format!(
            "48 nodes/{} edges, inferred {} (closure oracle {}), Emperor out {:?} vs reach {emperor_reach}, \
             top = {}, pct = {emperor_pct}, {} provinces at 0, {elapsed:.2?}",
            g.edge_count(),
            report.inferred_edge_count,
            reachable.len() - g.edge_count(),
            out_after.get(EMPEROR),
            top[0].node,
            provinces.len(),
        ),
    );
}

#[test]
fn c5_pagerank_correctness() {
    let started = Instant::now();
    let params = PageRankParams::default();
    let mut corpus: Vec<KnowledgeGraph> = vec![
        graph(&["a"], &[]),
        graph(&["a", "b"], &[("a", "b"), ("b", "a")]),
        graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]),
        graph(&["a", "b", "c", "d"], &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]),
        graph(&["h", "x", "y", "z"], &[("x", "h"), ("y", "h"), ("z", "h"), ("h", "x")]),
        graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]),
    ];
    for seed in 0..40 {
        let dag = random_dag(seed, 8, 0.4);
        corpus.push(complete(&dag, &RelationshipConfig::kinship(REL)).unwrap().0);
        corpus.push(dag);
    }

    let mut max_err = 0.0f64;
    let mut unconverged = 0;
    for g in &corpus {
        let it = pagerank(g, &RelFilter::All, &params).unwrap();
        unconverged += usize::from(!it.converged());
        for (id, expected) in pagerank_direct(g, params.damping) {
            max_err = max_err.max((it.get(&id).unwrap() - expected).abs());
        }
    }
    let two = pagerank(&corpus[1], &RelFilter::All, &params).unwrap();
    let two_ok = two.values.values().all(|v| (v - 1.0).abs() <= 1e-9);
    let single = pagerank(&corpus[0], &RelFilter::All, &params).unwrap().get("a").unwrap();
    let single_ok = (single - 0.15).abs() <= 1e-12;
    let elapsed = started.elapsed();
    verdict(
        5,
        "PageRank matches the linear fixed point; 2-cycle = 1.0; isolated = 0.15",
        max_err < 1e-6 && two_ok && single_ok && elapsed < Duration::from_secs(1),
        format!(
            "{} graphs ({unconverged} hit the iteration cap), max |dp| = {max_err:e}, 2-cycle {:?}, isolated {single}, {elapsed:.2?}",
            corpus.len(),
            two.values.values().collect::<Vec<_>>()
        ),
    );
}

#[test]
fn c6_idempotence_and_monotonicity() {
    let mut failures = Vec::new();
    for seed in 0..200u64 {
        let g = random_dag(seed, 12, 0.3);
        for cfg in config_matrix(0.05) {
            let (once, _) = complete(&g, &cfg).unwrap();
            let (twice, second) = complete(&once, &cfg).unwrap();
            if second.inferred_edge_count != 0 || once.edges() != twice.edges() {
                failures.push(format!("seed {seed}: not idempotent"));
            }
            let before = degree_centrality(&g, &RelFilter::All, Direction::Total, false).unwrap();
            let after = degree_centrality(&once, &RelFilter::All, Direction::Total, false).unwrap();
            if before.values.iter().any(|(id, v)| after.values[id] < *v) {
                failures.push(format!("seed {seed}: degree decreased"));
            }
        }
    }
    verdict(
        6,
        "re-completion adds nothing; total degree never decreases",
        failures.is_empty(),
        format!("1800 runs, {} failures {:?}", failures.len(), failures.iter().take(3).collect::<Vec<_>>()),
    );
}

#[test]
fn c7_pedigree_collapse_and_pct_convention() {
    let collapsed = FamilyTreeParams {
        generations: 3,
        couples_per_generation: 1,
        children_per_couple: 2,
        intermarriage_rate: 0.9,
        seed: 0,
    };
    let plain = FamilyTreeParams {
        intermarriage_rate: 0.0,
        ..collapsed
    };

    let run = |p: &FamilyTreeParams| {
        let g = gen_family_tree(p).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_bundle(&g, &[family_tree_config()], dir.path()).unwrap();
        let out = dir.path().join("out");
        let outcome = run_pipeline(&PipelineOptions::new(GraphBundle::in_dir(dir.path()), &out)).unwrap();
        outcome.report
    };
    let grandparent_strengths = |report: &kc_core::io::RunReport| -> Vec<f64> {
        report.completions[0]
            .records
            .iter()
            .filter(|r| r.kind == RecordKind::Inferred && r.source.as_str() == "P0.0" && r.shortest_hops == 2)
            .map(|r| r.strength)
            .collect()
    };
    let doubled = grandparent_strengths(&run(&collapsed));
    let single = grandparent_strengths(&run(&plain));
    let collapse_ok = !doubled.is_empty() && doubled.iter().all(|&s| s == 0.5) && single.iter().all(|&s| s == 0.25);

    let snap = |v: f64| MetricsSnapshot {
        params: MetricParams::Degree {
            rel: RelFilter::Only(RELATIVE_OF.into()),
            direction: Direction::Total,
            weighted: false,
        },
        values: BTreeMap::from([(NodeId::from("Albert"), v)]),
    };
    let pct = diff_metrics(&snap(9.0), &snap(112.0)).unwrap().records[0].pct;
    let pct_ok = matches!(pct, Pct::Finite(p) if (p - 1144.4).abs() < 0.05);
    verdict(
        7,
        "pedigree collapse doubles the grandparent strength; 9 -> 112 reports +1144.4%",
        collapse_ok && pct_ok,
        format!("collapsed S = {doubled:?}, single-descent S = {single:?}, pct = {pct}"),
    );
}

fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

#[test]
fn c8_desk_scale_performance() {
    let params = FamilyTreeParams {
        generations: 8,
        couples_per_generation: 667,
        children_per_couple: 2,
        intermarriage_rate: 0.1,
        seed: 2024,
    };
    let g = gen_family_tree(&params).unwrap();
    let started = Instant::now();
    let (done, report) = complete(&g, &family_tree_config()).unwrap();
    let elapsed = started.elapsed();
    let rss = peak_rss_bytes();
    let rss_ok = rss.is_none_or(|b| b < 1 << 30);
    verdict(
        8,
        "~10k-node family tree completes in < 10 s and < 1 GB with no truncation",
        (9_500..=10_500).contains(&g.node_count())
            && elapsed < Duration::from_secs(10)
            && rss_ok
            && report.truncated_pairs_count == 0,
        format!(
            "{} nodes, {} -> {} edges, {:.2?}, peak RSS {} MiB, truncated {}",
            g.node_count(),
            g.edge_count(),
            done.edge_count(),
            elapsed,
            rss.map_or("n/a".to_string(), |b| (b >> 20).to_string()),
            report.truncated_pairs_count
        ),
    );
}

#[test]
fn c9_pipeline_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_roman_empire(&RomanEmpireParams::default()).unwrap();
    write_bundle(&g, &[roman_empire_config()], dir.path()).unwrap();
    let bundle = GraphBundle::in_dir(dir.path());
    let first = run_pipeline(&PipelineOptions::new(bundle.clone(), dir.path().join("run1"))).unwrap();
    let second = run_pipeline(&PipelineOptions::new(bundle, dir.path().join("run2"))).unwrap();

    let read = |run: &str, file: &str| std::fs::read(dir.path().join(run).join(file)).unwrap();
    let report_same = read("run1", REPORT_FILE) == read("run2", REPORT_FILE);
    let names: HashSet<_> = first.written.iter().map(|p| p.file_name().unwrap().to_owned()).collect();
    let all_same = names
        .iter()
        .all(|f| read("run1", f.to_str().unwrap()) == read("run2", f.to_str().unwrap()));
    verdict(
        9,
        "two pipeline runs on the Roman Empire bundle give byte-identical reports",
        report_same && all_same && second.written.len() == first.written.len(),
        format!("{} files compared, report.json {} bytes", names.len(), read("run1", REPORT_FILE).len()),
    );
}
