//! Python bindings: token counting, fragment extraction, and corpus
//! analysis exposed as a small extension module.

use codefrag::callgraph;
use codefrag::metrics;
use codefrag::source_model;
use codefrag::tokenizer::{self, ContextBudget, Tokenizer};
use codefrag::translate::ProjectIndex;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use std::path::{Path, PathBuf};

/// A loaded BPE merge table.
#[pyclass]
struct TokenModel {
    inner: tokenizer::TokenModel,
}

#[pymethods]
impl TokenModel {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        tokenizer::load_token_model(&path)
            .map(|inner| TokenModel { inner })
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn count(&self, text: &[u8]) -> usize {
        tokenizer::count_tokens(&self.inner, text)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn hash(&self) -> String {
        self.inner.hash().to_string()
    }

    #[getter]
    fn vocab_size(&self) -> usize {
        self.inner.vocab_size()
    }
}

/// Lexeme-fallback token count (no merge table).
#[pyfunction]
fn count_tokens_fallback(text: &[u8]) -> usize {
    tokenizer::count_tokens_fallback(text)
}

/// Inclusive budget check: input + overhead + reserved <= window.
#[pyfunction]
#[pyo3(signature = (window, input_tokens, reserved_output=0, prompt_overhead=0))]
fn fits(window: usize, input_tokens: usize, reserved_output: usize, prompt_overhead: usize) -> bool {
    let budget = ContextBudget::new(window, reserved_output, prompt_overhead);
    tokenizer::fits(&budget, input_tokens)
}

/// Method fragments of one source text, as a list of dicts with byte
/// spans (`full_span`/`body_span` are [start, end) pairs).
#[pyfunction]
#[pyo3(signature = (source, rel_path="input.java"))]
fn extract_fragments(py: Python<'_>, source: &[u8], rel_path: &str) -> PyResult<Py<PyAny>> {
    let (mut frags, _) = source_model::extract_from_bytes(rel_path, source)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let frozen = frags.clone();
    for fr in &mut frags {
        fr.token_count = Some(tokenizer::count_tokens_fallback(
            &source_model::fragment_token_text(fr, &frozen, source),
        ));
    }
    let value = source_model::fragments_to_json(&frags);
    json_to_py(py, &value)
}

/// One project report over a directory tree, as a dict.
#[pyfunction]
#[pyo3(signature = (root, window=2048, include_tests=true, tokenizer_path=None))]
fn analyze_project(
    py: Python<'_>,
    root: PathBuf,
    window: usize,
    include_tests: bool,
    tokenizer_path: Option<PathBuf>,
) -> PyResult<Py<PyAny>> {
    let tok = match tokenizer_path {
        None => Tokenizer::Fallback,
        Some(p) => Tokenizer::Model(
            tokenizer::load_token_model(&p).map_err(|e| PyValueError::new_err(e.to_string()))?,
        ),
    };
    let name = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "project".to_string());
    let report = metrics::compute_project_report(
        Path::new(&root),
        &name,
        &ContextBudget::raw(window),
        &tok,
        include_tests,
    )
    .map_err(|e| PyIOError::new_err(e.to_string()))?;
    let value = serde_json::to_value(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &value)
}

/// Fragment call graph of a directory tree: dict with nodes, edges,
/// unresolved call sites, and bottom-up batches.
#[pyfunction]
#[pyo3(signature = (root, include_tests=true))]
fn call_graph(py: Python<'_>, root: PathBuf, include_tests: bool) -> PyResult<Py<PyAny>> {
    let files = source_model::scan_corpus(&root, include_tests)
        .map_err(|e| PyIOError::new_err(e.to_string()))?;
    let (_, per_file) = ProjectIndex::build(&files);
    let graph = callgraph::build_call_graph(&per_file, &files);
    let dag = callgraph::condense(&graph);
    let mut value: serde_json::Value =
        serde_json::from_slice(&callgraph::export_graph(&graph, callgraph::GraphFormat::Json))
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
    value["batches"] = serde_json::json!(dag.batches());
    json_to_py(py, &value)
}

fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use pyo3::types::{PyDict, PyList};
    let obj = match value {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().unbind().into_any(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.unbind().into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.unbind().into_any()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.unbind().into_any(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.unbind().into_any()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.unbind().into_any()
        }
    };
    Ok(obj)
}

#[pymodule]
fn codefrag_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<TokenModel>()?;
    m.add_function(wrap_pyfunction!(count_tokens_fallback, m)?)?;
    m.add_function(wrap_pyfunction!(fits, m)?)?;
    m.add_function(wrap_pyfunction!(extract_fragments, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_project, m)?)?;
    m.add_function(wrap_pyfunction!(call_graph, m)?)?;
    Ok(())
}
