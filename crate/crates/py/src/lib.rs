//! Python bindings: load or generate a graph, complete it, measure and diff.

use std::path::PathBuf;

use kc_core::datasets::{
    family_tree_config, gen_family_tree, gen_roman_empire, roman_empire_config, FamilyTreeParams, RomanEmpireParams,
};
use kc_core::engine::{complete, CompletionReport, RelationshipConfig};
use kc_core::io::{export_cypher, load_bundle, parse_relationship_config, write_bundle, GraphBundle};
use kc_core::metrics::{degree_centrality, diff_metrics, pagerank, Direction, MetricsSnapshot, PageRankParams, RelFilter};
use kc_core::pipeline::{run_pipeline, PipelineOptions};
use kc_core::{Error, KnowledgeGraph};
use pyo3::exceptions::{PyException, PyOSError, PyValueError};
use pyo3::prelude::*;

pyo3::create_exception!(kcgraph, KcGraphError, PyException);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io { .. } => PyOSError::new_err(err.to_string()),
        Error::InvalidParams(_) => PyValueError::new_err(err.to_string()),
        _ => KcGraphError::new_err(err.to_string()),
    }
}

fn json_value<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| KcGraphError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn rel_filter(rel: Option<String>) -> RelFilter {
    rel.map_or(RelFilter::All, RelFilter::Only)
}

fn direction(name: &str) -> PyResult<Direction> {
    match name {
        "in" => Ok(Direction::In),
        "out" => Ok(Direction::Out),
        "total" => Ok(Direction::Total),
        other => Err(PyValueError::new_err(format!("direction must be in, out or total, got {other:?}"))),
    }
}

/// A knowledge graph plus the completion settings it was loaded or generated with.
#[pyclass(name = "Graph", module = "kcgraph", frozen)]
struct PyGraph {
    graph: KnowledgeGraph,
    configs: Vec<RelationshipConfig>,
}

#[pymethods]
impl PyGraph {
    /// Load a bundle directory holding nodes.csv, edges.csv and optionally config.json.
    #[staticmethod]
    fn load_bundle(dir: PathBuf) -> PyResult<Self> {
        let (graph, configs) = load_bundle(&GraphBundle::in_dir(dir)).map_err(to_py)?;
        Ok(PyGraph { graph, configs })
    }

    #[staticmethod]
    #[pyo3(signature = (prefectures = 4, dioceses = 12, provinces = 31))]
    fn roman_empire(prefectures: usize, dioceses: usize, provinces: usize) -> PyResult<Self> {
        let graph = gen_roman_empire(&RomanEmpireParams {
            prefecture_count: prefectures,
            diocese_count: dioceses,
            province_count: provinces,
        })
        .map_err(to_py)?;
        Ok(PyGraph {
            graph,
            configs: vec![roman_empire_config()],
        })
    }

    #[staticmethod]
    #[pyo3(signature = (generations = 8, couples = 1, children = 1, intermarriage_rate = 0.0, seed = 0))]
    fn family_tree(generations: usize, couples: usize, children: usize, intermarriage_rate: f64, seed: u64) -> PyResult<Self> {
        let graph = gen_family_tree(&FamilyTreeParams {
            generations,
            couples_per_generation: couples,
            children_per_couple: children,
            intermarriage_rate,
            seed,
        })
        .map_err(to_py)?;
        Ok(PyGraph {
            graph,
            configs: vec![family_tree_config()],
        })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Edges as (source, target, type, strength, provenance) tuples.
    fn edges(&self) -> Vec<(String, String, String, Option<f64>, &'static str)> {
        self.graph
            .edges()
            .iter()
            .map(|e| (e.source.to_string(), e.target.to_string(), e.rel.clone(), e.strength, e.provenance.as_str()))
            .collect()
    }

    /// Complete the graph. With `settings` (a completion JSON object) only
    /// `rel` is completed; otherwise every configured relationship is.
    /// Returns the completed graph and the list of completion reports.
    #[pyo3(signature = (rel = None, settings = None))]
    fn complete<'py>(&self, py: Python<'py>, rel: Option<&str>, settings: Option<&str>) -> PyResult<(PyGraph, Bound<'py, PyAny>)> {
        let configs = match (rel, settings) {
            (Some(rel), Some(json)) => vec![parse_relationship_config(rel, json).map_err(to_py)?],
            (None, Some(_)) => return Err(PyValueError::new_err("settings require rel")),
            (Some(rel), None) => self.configs.iter().filter(|c| c.rel == rel).cloned().collect(),
            (None, None) => self.configs.clone(),
        };
        if configs.is_empty() {
            return Err(to_py(Error::Config("no relationship has completion settings".into())));
        }
        let (graph, reports) = py
            .detach(|| -> kc_core::Result<(KnowledgeGraph, Vec<CompletionReport>)> {
                let mut current = self.graph.clone();
                let mut reports = Vec::new();
                for cfg in &configs {
                    let (next, report) = complete(&current, cfg)?;
                    current = next;
                    reports.push(report);
                }
                Ok((current, reports))
            })
            .map_err(to_py)?;
        let reports = json_value(py, &reports)?;
        Ok((PyGraph { graph, configs }, reports))
    }

    #[pyo3(signature = (rel = None, direction = "total", weighted = false))]
    fn degree(&self, rel: Option<String>, direction: &str, weighted: bool) -> PyResult<Snapshot> {
        let dir = self::direction(direction)?;
        let inner = degree_centrality(&self.graph, &rel_filter(rel), dir, weighted).map_err(to_py)?;
        Ok(Snapshot { inner })
    }

    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (rel = None, damping = 0.85, tolerance = 1e-7, max_iterations = 100, weighted = false, normalized = false))]
    fn pagerank(
        &self,
        py: Python<'_>,
        rel: Option<String>,
        damping: f64,
        tolerance: f64,
        max_iterations: usize,
        weighted: bool,
        normalized: bool,
    ) -> PyResult<Snapshot> {
        let params = PageRankParams {
            damping,
            tolerance,
            max_iterations,
            weighted,
            normalized,
        };
        let inner = py.detach(|| pagerank(&self.graph, &rel_filter(rel), &params)).map_err(to_py)?;
        Ok(Snapshot { inner })
    }

    /// Write nodes.csv, edges.csv and config.json into `dir`.
    fn write_bundle(&self, dir: PathBuf) -> PyResult<()> {
        std::fs::create_dir_all(&dir).map_err(|e| PyOSError::new_err(format!("{}: {e}", dir.display())))?;
        write_bundle(&self.graph, &self.configs, &dir).map_err(to_py)?;
        Ok(())
    }

    fn export_cypher(&self, path: PathBuf) -> PyResult<()> {
        export_cypher(&self.graph, &path).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Graph(nodes={}, edges={})", self.graph.node_count(), self.graph.edge_count())
    }
}

/// Per-node metric values plus the parameters that produced them.
#[pyclass(module = "kcgraph", frozen)]
struct Snapshot {
    inner: MetricsSnapshot,
}

#[pymethods]
impl Snapshot {
    #[getter]
    fn algorithm<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_value(py, &self.inner.algorithm())
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged()
    }

    /// Node id to value, in id order.
    #[getter]
    fn values<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_value(py, &self.inner.values)
    }

    fn get(&self, node: &str) -> Option<f64> {
        self.inner.get(node)
    }

    /// Parameters and values as a JSON-compatible dict.
    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_value(py, &self.inner)
    }
}

/// Diff two snapshots of the same algorithm. `pct` is a float or the string "new".
#[pyfunction]
fn diff<'py>(py: Python<'py>, before: &Snapshot, after: &Snapshot) -> PyResult<Bound<'py, PyAny>> {
    let d = diff_metrics(&before.inner, &after.inner).map_err(to_py)?;
    json_value(py, &d)
}

/// Run the full pipeline on a bundle directory and return the printed summary.
#[pyfunction]
#[pyo3(signature = (bundle_dir, out_dir, top_k = 5, cypher = false))]
fn run_pipeline_dir(py: Python<'_>, bundle_dir: PathBuf, out_dir: PathBuf, top_k: usize, cypher: bool) -> PyResult<String> {
    let mut opts = PipelineOptions::new(GraphBundle::in_dir(bundle_dir), out_dir);
    opts.top_k = top_k;
    opts.cypher = cypher;
    let outcome = py.detach(|| run_pipeline(&opts)).map_err(to_py)?;
    Ok(outcome.summary)
}

#[pymodule]
fn kcgraph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<Snapshot>()?;
    m.add_function(wrap_pyfunction!(diff, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline_dir, m)?)?;
    m.add("KcGraphError", m.py().get_type::<KcGraphError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
