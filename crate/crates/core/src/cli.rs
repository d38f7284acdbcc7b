//! Command implementations, configuration, and the on-disk token-count
//! cache. Exit-code contract: 0 success, 1 error, 2 empty corpus.

use crate::callgraph::{self, GraphFormat};
use crate::metrics::{self, CorpusSummary, MetricsError, ReportFormat};
use crate::source_model::{self};
use crate::tokenizer::{self, hex_sha256, CountTokens, Tokenizer};
use crate::translate::{
    self, Backend, HttpBackend, Manifest, MockBackend, MockTransform, Mode, ProjectIndex,
    PromptTemplate, RunOptions, RunSummary, Status, TranslationResult,
};
use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_EMPTY: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Mock,
    Http,
}

/// Resolved run configuration: defaults, overlaid by an optional
/// `key=value` config file, overlaid by command-line flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub corpus_root: PathBuf,
    pub window: usize,
    pub reserved_output: Option<usize>,
    pub tokenizer_path: Option<PathBuf>,
    pub include_tests: bool,
    pub mode: Mode,
    pub backend: BackendKind,
    pub backend_url: Option<String>,
    pub model: Option<String>,
    pub api_key_env: String,
    pub template_path: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub format: ReportFormat,
    pub out: Option<PathBuf>,
    pub source_lang: String,
    pub target_lang: String,
    pub max_in_flight: usize,
    pub rps_limit: Option<f64>,
    pub retries: usize,
    pub fail_fast: bool,
    pub compare: bool,
    pub cache_path: Option<PathBuf>,
    pub verify_cache: bool,
    pub jobs: Option<usize>,
    pub mock_transform: MockTransform,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus_root: PathBuf::from("."),
            window: 2048,
            reserved_output: None,
            tokenizer_path: None,
            include_tests: true,
            mode: Mode::MethodDecomposition,
            backend: BackendKind::Mock,
            backend_url: None,
            model: None,
            api_key_env: "CODEFRAG_API_KEY".to_string(),
            template_path: None,
            output_dir: None,
            format: ReportFormat::Markdown,
            out: None,
            source_lang: "Java".to_string(),
            target_lang: "Python".to_string(),
            max_in_flight: 1,
            rps_limit: None,
            retries: 2,
            fail_fast: false,
            compare: false,
            cache_path: None,
            verify_cache: false,
            jobs: None,
            mock_transform: MockTransform::Identity,
        }
    }
}

/// Parse a `key=value` config file. Unknown keys are an error so typos
/// do not pass silently.
pub fn apply_config_file(cfg: &mut RunConfig, path: &Path) -> Result<(), String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "corpus_root" => cfg.corpus_root = PathBuf::from(value),
            "window" => cfg.window = value.parse().map_err(|_| bad(path, lineno, key))?,
            "reserved_output" => {
                cfg.reserved_output = Some(value.parse().map_err(|_| bad(path, lineno, key))?)
            }
            "tokenizer" => cfg.tokenizer_path = Some(PathBuf::from(value)),
            "include_tests" => {
                cfg.include_tests = value.parse().map_err(|_| bad(path, lineno, key))?
            }
            "mode" => cfg.mode = parse_mode(value).ok_or_else(|| bad(path, lineno, key))?,
            "backend" => {
                cfg.backend = match value {
                    "mock" => BackendKind::Mock,
                    "http" => BackendKind::Http,
                    _ => return Err(bad(path, lineno, key)),
                }
            }
            "backend_url" => cfg.backend_url = Some(value.to_string()),
            "model" => cfg.model = Some(value.to_string()),
            "api_key_env" => cfg.api_key_env = value.to_string(),
            "template" => cfg.template_path = Some(PathBuf::from(value)),
            "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
            "format" => cfg.format = value.parse().map_err(|_| bad(path, lineno, key))?,
            "source_lang" => cfg.source_lang = value.to_string(),
            "target_lang" => cfg.target_lang = value.to_string(),
            "max_in_flight" => {
                cfg.max_in_flight = value.parse().map_err(|_| bad(path, lineno, key))?
            }
            "rps_limit" => cfg.rps_limit = Some(value.parse().map_err(|_| bad(path, lineno, key))?),
            "retries" => cfg.retries = value.parse().map_err(|_| bad(path, lineno, key))?,
            "fail_fast" => cfg.fail_fast = value.parse().map_err(|_| bad(path, lineno, key))?,
            "cache" => cfg.cache_path = Some(PathBuf::from(value)),
            "jobs" => cfg.jobs = Some(value.parse().map_err(|_| bad(path, lineno, key))?),
            other => {
                return Err(format!(
                    "{}:{}: unknown config key: {other}",
                    path.display(),
                    lineno + 1
                ))
            }
        }
    }
    Ok(())
}

fn bad(path: &Path, lineno: usize, key: &str) -> String {
    format!("{}:{}: bad value for {key}", path.display(), lineno + 1)
}

pub fn parse_mode(s: &str) -> Option<Mode> {
    match s {
        "whole_file" | "whole-file" => Some(Mode::WholeFile),
        "method_decomposition" | "method" => Some(Mode::MethodDecomposition),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Token-count cache
// ---------------------------------------------------------------------------

/// Single-file cache of (tokenizer_hash, content_hash) -> token count.
/// Writes are atomic (temp file + rename). With verification enabled, a
/// deterministic ~1% sample of hits is recomputed and compared.
pub struct TokenCountCache {
    path: PathBuf,
    entries: Mutex<HashMap<String, usize>>,
    verify: bool,
    pub mismatches: AtomicUsize,
    pub verified_hits: AtomicUsize,
}

impl TokenCountCache {
    pub fn load(path: &Path, verify: bool) -> Self {
        let entries = std::fs::read(path)
            .ok()
            .and_then(|bytes| serde_json::from_slice(&bytes).ok())
            .unwrap_or_default();
        TokenCountCache {
            path: path.to_path_buf(),
            entries: Mutex::new(entries),
            verify,
            mismatches: AtomicUsize::new(0),
            verified_hits: AtomicUsize::new(0),
        }
    }

    pub fn save(&self) -> std::io::Result<()> {
        let entries = self.entries.lock().unwrap();
        let sorted: std::collections::BTreeMap<&String, &usize> = entries.iter().collect();
        let bytes = serde_json::to_vec_pretty(&sorted)?;
        let tmp = self.path.with_extension("tmp");
        std::fs::write(&tmp, bytes)?;
        std::fs::rename(&tmp, &self.path)
    }
}

pub struct CachedCounter<'a> {
    pub inner: &'a Tokenizer,
    pub cache: &'a TokenCountCache,
}

impl CountTokens for CachedCounter<'_> {
    fn count(&self, text: &[u8]) -> usize {
        let key = format!("{}:{}", self.inner.hash(), hex_sha256(text));
        if let Some(&cached) = self.cache.entries.lock().unwrap().get(&key) {
            // deterministic ~1% sample: first byte of the content hash
            if self.cache.verify && u8::from_str_radix(&key[key.len() - 2..], 16).unwrap_or(255) < 3
            {
                self.cache.verified_hits.fetch_add(1, Ordering::Relaxed);
                if self.inner.count(text) != cached {
                    self.cache.mismatches.fetch_add(1, Ordering::Relaxed);
                }
            }
            return cached;
        }
        let computed = self.inner.count(text);
        self.cache
            .entries
            .lock()
            .unwrap()
            .insert(key, computed);
        computed
    }
    fn tokenizer_name(&self) -> &str {
        self.inner.name()
    }
    fn tokenizer_hash(&self) -> &str {
        self.inner.hash()
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn load_tokenizer(cfg: &RunConfig) -> Result<Tokenizer, String> {
    match &cfg.tokenizer_path {
        None => Ok(Tokenizer::Fallback),
        Some(p) => tokenizer::load_token_model(p)
            .map(Tokenizer::Model)
            .map_err(|e| format!("tokenizer {}: {e}", p.display())),
    }
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes),
        None => std::io::stdout().write_all(bytes),
    }
}

fn thread_pool(cfg: &RunConfig) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .expect("thread pool")
}

/// Project rows for analyze: each immediate subdirectory of the root that
/// contains sources is one project; a root with sources of its own is a
/// single project.
fn discover_projects(root: &Path) -> std::io::Result<Vec<(String, PathBuf)>> {
    let mut projects = Vec::new();
    let mut subdirs: Vec<PathBuf> = std::fs::read_dir(root)?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().map(|t| t.is_dir()).unwrap_or(false))
        .map(|e| e.path())
        .collect();
    subdirs.sort();
    for dir in subdirs {
        if contains_java(&dir) {
            let name = dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| dir.display().to_string());
            projects.push((name, dir));
        }
    }
    if projects.is_empty() && contains_java(root) {
        let name = root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "corpus".to_string());
        projects.push((name, root.to_path_buf()));
    }
    Ok(projects)
}

fn contains_java(dir: &Path) -> bool {
    walkdir::WalkDir::new(dir)
        .into_iter()
        .filter_map(|e| e.ok())
        .any(|e| {
            e.file_type().is_file()
                && e.path().extension().and_then(|x| x.to_str()) == Some("java")
        })
}

fn finish_cache(cache: &Option<TokenCountCache>) -> i32 {
    if let Some(c) = cache {
        if let Err(e) = c.save() {
            eprintln!("error: saving cache: {e}");
            return EXIT_ERROR;
        }
        let mism = c.mismatches.load(Ordering::Relaxed);
        if mism > 0 {
            eprintln!(
                "error: token cache verification failed: {mism} mismatched entries (stale cache?)"
            );
            return EXIT_ERROR;
        }
        if c.verify {
            eprintln!(
                "cache verification: {} sampled hits, 0 mismatches",
                c.verified_hits.load(Ordering::Relaxed)
            );
        }
    }
    EXIT_OK
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

pub fn cmd_analyze(cfg: &RunConfig) -> i32 {
    let tok = match load_tokenizer(cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let cache = cfg
        .cache_path
        .as_ref()
        .map(|p| TokenCountCache::load(p, cfg.verify_cache));
    let counter_holder;
    let counter: &dyn CountTokens = match &cache {
        Some(c) => {
            counter_holder = CachedCounter {
                inner: &tok,
                cache: c,
            };
            &counter_holder
        }
        None => &tok,
    };
    let projects = match discover_projects(&cfg.corpus_root) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {}: {e}", cfg.corpus_root.display());
            return EXIT_ERROR;
        }
    };
    if projects.is_empty() {
        eprintln!(
            "error: empty corpus: no source files under {}",
            cfg.corpus_root.display()
        );
        return EXIT_EMPTY;
    }
    let budget = tokenizer::ContextBudget::raw(cfg.window);
    let pool = thread_pool(cfg);
    let results: Vec<Result<metrics::ProjectReport, MetricsError>> = pool.install(|| {
        use rayon::prelude::*;
        projects
            .par_iter()
            .map(|(name, dir)| {
                metrics::compute_project_report(dir, name, &budget, counter, cfg.include_tests)
            })
            .collect()
    });
    let mut rows = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(MetricsError::EmptyCorpus(p)) => eprintln!("warning: empty project skipped: {p}"),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_ERROR;
            }
        }
    }
    if rows.is_empty() {
        eprintln!("error: empty corpus: no parsable projects");
        return EXIT_EMPTY;
    }
    let summary = CorpusSummary::from_rows(rows);
    let rendered = metrics::render_report(&summary, cfg.format);
    if let Err(e) = write_output(&cfg.out, &rendered) {
        eprintln!("error: writing report: {e}");
        return EXIT_ERROR;
    }
    finish_cache(&cache)
}

pub fn cmd_decompose(cfg: &RunConfig) -> i32 {
    let files = match source_model::scan_corpus(&cfg.corpus_root, cfg.include_tests) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    if files.is_empty() {
        eprintln!("error: empty corpus");
        return EXIT_EMPTY;
    }
    let tok = match load_tokenizer(cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let mut per_file = serde_json::Map::new();
    let mut skipped = Vec::new();
    for f in &files {
        match source_model::extract_fragments(f) {
            Ok((mut frags, _)) => {
                let frozen = frags.clone();
                for fr in &mut frags {
                    fr.token_count = Some(tok.count(&source_model::fragment_token_text(
                        fr,
                        &frozen,
                        &f.content,
                    )));
                }
                per_file.insert(
                    f.rel_path.clone(),
                    source_model::fragments_to_json(&frags),
                );
            }
            Err(e) => {
                eprintln!("warning: skipped: {e}");
                skipped.push(f.rel_path.clone());
            }
        }
    }
    let doc = serde_json::json!({
        "files": per_file,
        "skipped_files": skipped.len(),
        "skipped": skipped,
        "tokenizer_name": tok.name(),
        "tokenizer_hash": tok.hash(),
    });
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("decompose serialization");
    bytes.push(b'\n');
    if let Err(e) = write_output(&cfg.out, &bytes) {
        eprintln!("error: writing output: {e}");
        return EXIT_ERROR;
    }
    EXIT_OK
}

pub fn cmd_graph(cfg: &RunConfig) -> i32 {
    let files = match source_model::scan_corpus(&cfg.corpus_root, cfg.include_tests) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    if files.is_empty() {
        eprintln!("error: empty corpus");
        return EXIT_EMPTY;
    }
    let (index, per_file) = ProjectIndex::build(&files);
    for skipped in &index.skipped {
        eprintln!("warning: skipped unparsable file: {skipped}");
    }
    let graph = callgraph::build_call_graph(&per_file, &files);
    let dag = callgraph::condense(&graph);
    let batches = dag.batches();
    let bytes = match cfg.format {
        ReportFormat::Json => {
            let mut value: serde_json::Value =
                serde_json::from_slice(&callgraph::export_graph(&graph, GraphFormat::Json))
                    .expect("graph json");
            value["batches"] = serde_json::json!(batches);
            let mut b = serde_json::to_vec_pretty(&value).expect("graph json");
            b.push(b'\n');
            b
        }
        _ => {
            let mut dot = callgraph::export_graph(&graph, GraphFormat::Dot);
            for (i, batch) in batches.iter().enumerate() {
                dot.extend_from_slice(
                    format!("// batch {}: {}\n", i, batch.join(", ")).as_bytes(),
                );
            }
            dot
        }
    };
    if let Err(e) = write_output(&cfg.out, &bytes) {
        eprintln!("error: writing output: {e}");
        return EXIT_ERROR;
    }
    EXIT_OK
}

fn make_backend(cfg: &RunConfig) -> Result<Box<dyn Backend>, String> {
    match cfg.backend {
        BackendKind::Mock => Ok(Box::new(MockBackend {
            transform: cfg.mock_transform.clone(),
        })),
        BackendKind::Http => {
            let url = cfg
                .backend_url
                .as_ref()
                .ok_or("http backend requires backend_url")?;
            let model = cfg.model.as_ref().ok_or("http backend requires model")?;
            let key = std::env::var(&cfg.api_key_env).unwrap_or_default();
            Ok(Box::new(HttpBackend::new(
                url,
                model,
                &key,
                cfg.retries,
                std::time::Duration::from_secs(120),
                cfg.rps_limit,
            )))
        }
    }
}

struct TranslateArtifacts {
    results: Vec<TranslationResult>,
    summary: RunSummary,
    n_files: usize,
}

#[allow(clippy::too_many_arguments)]
fn run_mode(
    cfg: &RunConfig,
    mode: Mode,
    files: &[source_model::SourceFile],
    index: &ProjectIndex,
    graph: &callgraph::CallGraph,
    dag: &callgraph::SccDag,
    backend: &dyn Backend,
    template: &PromptTemplate,
    counter: &dyn CountTokens,
) -> Result<TranslateArtifacts, translate::TranslateError> {
    let plan = match mode {
        Mode::WholeFile => {
            translate::make_whole_file_plan(files, &cfg.source_lang, &cfg.target_lang)
        }
        Mode::MethodDecomposition => {
            translate::make_method_plan(dag, &cfg.source_lang, &cfg.target_lang)
        }
    };
    let opts = RunOptions {
        reserved_output: cfg.reserved_output,
        window: cfg.window,
        fail_fast: cfg.fail_fast,
    };
    let (results, summary) =
        translate::run_translation(&plan, graph, index, &opts, backend, template, counter)?;
    Ok(TranslateArtifacts {
        results,
        summary,
        n_files: files.len(),
    })
}

fn write_whole_file_outputs(
    art: &TranslateArtifacts,
    index: &ProjectIndex,
    target_dir: &Path,
    target_lang: &str,
) -> Result<Manifest, translate::TranslateError> {
    let mut inputs = Vec::new();
    for r in &art.results {
        let out_rel = {
            let ext = match target_lang.to_ascii_lowercase().as_str() {
                "python" => "py",
                "rust" => "rs",
                _ => "txt",
            };
            match r.fragment_id.rsplit_once('.') {
                Some((stem, _)) => format!("{stem}.{ext}"),
                None => format!("{}.{ext}", r.fragment_id),
            }
        };
        let out_path = target_dir.join(&out_rel);
        if let Some(parent) = out_path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| translate::TranslateError::Io {
                path: parent.to_path_buf(),
                source: e,
            })?;
        }
        let content = match r.status {
            Status::Translated => r.output_text.clone(),
            _ => {
                let original = index
                    .file_contents
                    .get(&r.fragment_id)
                    .map(|b| String::from_utf8_lossy(b).into_owned())
                    .unwrap_or_default();
                format!(
                    "// [stub:{}] whole-file input did not fit the context window\n{original}",
                    match r.status {
                        Status::OutOfContext => "out_of_context",
                        _ => "backend_error",
                    }
                )
            }
        };
        std::fs::write(&out_path, content).map_err(|e| translate::TranslateError::Io {
            path: out_path.clone(),
            source: e,
        })?;
        inputs.push(translate::ManifestInput {
            id: r.fragment_id.clone(),
            status: r.status,
            input_tokens: r.input_tokens,
            output_path: out_rel,
        });
    }
    inputs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(Manifest {
        mode: art.summary.mode,
        inputs,
        summary: translate::ManifestSummary {
            n_inputs: art.summary.n_inputs,
            n_out_of_context: art.summary.n_out_of_context,
            pct_context_occupied: art.summary.pct_context_occupied,
        },
    })
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut bytes = serde_json::to_vec_pretty(manifest)?;
    bytes.push(b'\n');
    std::fs::write(dir.join("manifest.json"), bytes)
}

fn summary_row(label: &str, n_files: usize, s: &RunSummary) -> String {
    format!(
        "| {} | {} | {} | {:.2}% |\n",
        label, n_files, s.n_out_of_context, s.pct_context_occupied
    )
}

pub fn cmd_translate(cfg: &RunConfig) -> i32 {
    let files = match source_model::scan_corpus(&cfg.corpus_root, cfg.include_tests) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    if files.is_empty() {
        eprintln!("error: empty corpus");
        return EXIT_EMPTY;
    }
    let tok = match load_tokenizer(cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let template = match &cfg.template_path {
        Some(p) => match PromptTemplate::from_file(p) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_ERROR;
            }
        },
        None => PromptTemplate::default(),
    };
    let backend = match make_backend(cfg) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let (index, per_file) = ProjectIndex::build(&files);
    if index.frags_by_file.is_empty() {
        eprintln!("error: empty corpus: no parsable files");
        return EXIT_EMPTY;
    }
    for skipped in &index.skipped {
        eprintln!("warning: skipped unparsable file: {skipped}");
    }
    let graph = callgraph::build_call_graph(&per_file, &files);
    let dag = callgraph::condense(&graph);

    let modes: Vec<Mode> = if cfg.compare {
        vec![Mode::WholeFile, Mode::MethodDecomposition]
    } else {
        vec![cfg.mode]
    };
    let mut table = String::new();
    if cfg.compare {
        table.push_str(
            "| Decomposition Technique | # Source Files | # Out-of-Context Inputs | % Context Occupied |\n|---|---|---|---|\n",
        );
    }
    for mode in modes {
        let art = match run_mode(
            cfg, mode, &files, &index, &graph, &dag, backend.as_ref(), &template, &tok,
        ) {
            Ok(a) => a,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_ERROR;
            }
        };
        if let Some(base) = &cfg.output_dir {
            let dir = if cfg.compare {
                base.join(match mode {
                    Mode::WholeFile => "whole_file",
                    Mode::MethodDecomposition => "method_decomposition",
                })
            } else {
                base.clone()
            };
            if let Err(e) = std::fs::create_dir_all(&dir) {
                eprintln!("error: {}: {e}", dir.display());
                return EXIT_ERROR;
            }
            let manifest = match mode {
                Mode::MethodDecomposition => translate::assemble_outputs(
                    &art.results,
                    &index,
                    &art.summary,
                    &dir,
                    &cfg.target_lang,
                ),
                Mode::WholeFile => {
                    write_whole_file_outputs(&art, &index, &dir, &cfg.target_lang)
                }
            };
            let manifest = match manifest {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_ERROR;
                }
            };
            if let Err(e) = write_manifest(&dir, &manifest) {
                eprintln!("error: writing manifest: {e}");
                return EXIT_ERROR;
            }
        }
        let label = match mode {
            Mode::WholeFile => "No Decomposition",
            Mode::MethodDecomposition => "Method Decomposition",
        };
        if cfg.compare {
            table.push_str(&summary_row(label, art.n_files, &art.summary));
        } else {
            table.push_str(&format!(
                "{label}: inputs={} out_of_context={} backend_errors={} pct_context_occupied={:.2}%\n",
                art.summary.n_inputs,
                art.summary.n_out_of_context,
                art.summary.n_backend_errors,
                art.summary.pct_context_occupied
            ));
        }
    }
    if let Err(e) = write_output(&cfg.out, table.as_bytes()) {
        eprintln!("error: writing summary: {e}");
        return EXIT_ERROR;
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_overrides_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg");
        std::fs::write(&path, "window=1024\nmode=whole_file\n# comment\nretries=5\n").unwrap();
        let mut cfg = RunConfig::default();
        apply_config_file(&mut cfg, &path).unwrap();
        assert_eq!(cfg.window, 1024);
        assert_eq!(cfg.mode, Mode::WholeFile);
        assert_eq!(cfg.retries, 5);
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg");
        std::fs::write(&path, "wnidow=1024\n").unwrap();
        let mut cfg = RunConfig::default();
        assert!(apply_config_file(&mut cfg, &path).is_err());
    }

    #[test]
    fn cache_hits_match_fresh_counts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let tok = Tokenizer::Fallback;
        let cache = TokenCountCache::load(&path, false);
        let counter = CachedCounter {
            inner: &tok,
            cache: &cache,
        };
        let texts: Vec<Vec<u8>> = (0..50).map(|i| format!("int x{i} = {i};").into_bytes()).collect();
        let fresh: Vec<usize> = texts.iter().map(|t| tok.count(t)).collect();
        let first: Vec<usize> = texts.iter().map(|t| counter.count(t)).collect();
        let second: Vec<usize> = texts.iter().map(|t| counter.count(t)).collect();
        assert_eq!(fresh, first);
        assert_eq!(fresh, second);
        cache.save().unwrap();
        // reload and re-hit
        let cache2 = TokenCountCache::load(&path, true);
        let counter2 = CachedCounter {
            inner: &tok,
            cache: &cache2,
        };
        let third: Vec<usize> = texts.iter().map(|t| counter2.count(t)).collect();
        assert_eq!(fresh, third);
        assert_eq!(cache2.mismatches.load(Ordering::Relaxed), 0);
    }

    #[test]
    fn discover_projects_subdirs_and_flat_root() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir_all(dir.path().join("p1/src")).unwrap();
        std::fs::create_dir_all(dir.path().join("p2")).unwrap();
        std::fs::create_dir_all(dir.path().join("empty")).unwrap();
        std::fs::write(dir.path().join("p1/src/A.java"), "class A {}").unwrap();
        std::fs::write(dir.path().join("p2/B.java"), "class B {}").unwrap();
        let projects = discover_projects(dir.path()).unwrap();
        let names: Vec<&str> = projects.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["p1", "p2"]);

        let flat = tempfile::tempdir().unwrap();
        std::fs::write(flat.path().join("A.java"), "class A {}").unwrap();
        let projects = discover_projects(flat.path()).unwrap();
        assert_eq!(projects.len(), 1);
    }
}
