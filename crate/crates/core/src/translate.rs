//! Bottom-up, budget-aware translation of a project's fragments through a
//! pluggable backend, and assembly of the outputs.
//!
//! Batches follow the SCC DAG so every out-of-batch callee has a final
//! status before its callers are packed. Dependency context degrades
//! translated body -> signature only -> omitted under the token budget.

use crate::callgraph::{CallGraph, SccDag};
use crate::source_model::{self, FileSkeleton, MethodFragment, SourceFile};
use crate::tokenizer::{ContextBudget, CountTokens};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum TranslateError {
    #[error("io error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Backend(#[from] BackendError),
}

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error("request timed out")]
    Timeout,
    #[error("http status {0}")]
    HttpStatus(u16),
    #[error("malformed backend response: {0}")]
    MalformedResponse(String),
    #[error("transport error: {0}")]
    Transport(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    WholeFile,
    MethodDecomposition,
}

#[derive(Debug, Clone)]
pub struct TranslationPlan {
    pub batches: Vec<Vec<String>>,
    pub mode: Mode,
    pub source_lang: String,
    pub target_lang: String,
}

/// Whole-file plan: one singleton batch per file, in path order.
pub fn make_whole_file_plan(files: &[SourceFile], source_lang: &str, target_lang: &str) -> TranslationPlan {
    let mut paths: Vec<String> = files.iter().map(|f| f.rel_path.clone()).collect();
    paths.sort();
    TranslationPlan {
        batches: paths.into_iter().map(|p| vec![p]).collect(),
        mode: Mode::WholeFile,
        source_lang: source_lang.to_string(),
        target_lang: target_lang.to_string(),
    }
}

/// Method-decomposition plan: one batch per SCC, in bottom-up order.
pub fn make_method_plan(dag: &SccDag, source_lang: &str, target_lang: &str) -> TranslationPlan {
    TranslationPlan {
        batches: dag.batches(),
        mode: Mode::MethodDecomposition,
        source_lang: source_lang.to_string(),
        target_lang: target_lang.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepRepr {
    TranslatedBody,
    SignatureOnly,
}

#[derive(Debug, Clone)]
pub struct PromptPacket {
    pub fragment_ids: Vec<String>,
    pub instruction_text: String,
    pub source_text: Vec<u8>,
    pub dependency_context: Vec<(String, DepRepr)>,
    pub rendered_context: String,
    pub total_input_tokens: usize,
    pub budget: ContextBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Translated,
    OutOfContext,
    BackendError,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranslationResult {
    pub fragment_id: String,
    pub status: Status,
    pub output_text: String,
    pub input_tokens: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunSummary {
    pub mode: Mode,
    pub n_inputs: usize,
    pub n_out_of_context: usize,
    pub n_backend_errors: usize,
    /// Mean input_tokens / window over all attempted prompts, in percent.
    pub pct_context_occupied: f64,
}

// ---------------------------------------------------------------------------
// Prompt template
// ---------------------------------------------------------------------------

pub const DEFAULT_TEMPLATE: &str = "Translate the following {SOURCE_LANG} code to {TARGET_LANG}.\n\
Preserve behavior and names. Output only code.\n\n\
Already-translated dependencies:\n{CONTEXT}\n\n\
Source:\n{SOURCE}\n";

#[derive(Debug, Clone)]
pub struct PromptTemplate {
    text: String,
}

impl PromptTemplate {
    pub fn new(text: &str) -> Self {
        PromptTemplate {
            text: text.to_string(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, TranslateError> {
        let text = std::fs::read_to_string(path).map_err(|e| TranslateError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Ok(Self::new(&text))
    }

    pub fn instantiate(
        &self,
        source_lang: &str,
        target_lang: &str,
        context: &str,
        source: &str,
    ) -> String {
        self.text
            .replace("{SOURCE_LANG}", source_lang)
            .replace("{TARGET_LANG}", target_lang)
            .replace("{CONTEXT}", context)
            .replace("{SOURCE}", source)
    }

    /// Template cost: the instantiated template with empty holes.
    pub fn overhead(&self, source_lang: &str, target_lang: &str, counter: &dyn CountTokens) -> usize {
        counter.count(self.instantiate(source_lang, target_lang, "", "").as_bytes())
    }
}

impl Default for PromptTemplate {
    fn default() -> Self {
        Self::new(DEFAULT_TEMPLATE)
    }
}

// ---------------------------------------------------------------------------
// Project index
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct FragmentInfo {
    pub id: String,
    pub file: String,
    /// Token-accounting text: full span minus nested fragments.
    pub source: Vec<u8>,
    pub signature: Vec<u8>,
    pub span_start: usize,
}

/// Everything translation needs about a parsed project, keyed by id.
#[derive(Debug, Clone, Default)]
pub struct ProjectIndex {
    pub fragments: BTreeMap<String, FragmentInfo>,
    /// Fragment ids per file, in span order.
    pub frags_by_file: BTreeMap<String, Vec<String>>,
    pub file_contents: BTreeMap<String, Vec<u8>>,
    pub skeletons: HashMap<String, FileSkeleton>,
    /// Files skipped because they did not parse.
    pub skipped: Vec<String>,
}

impl ProjectIndex {
    pub fn build(files: &[SourceFile]) -> (Self, Vec<(String, Vec<MethodFragment>)>) {
        let mut index = ProjectIndex::default();
        let mut per_file = Vec::new();
        for f in files {
            index
                .file_contents
                .insert(f.rel_path.clone(), f.content.clone());
            match source_model::extract_fragments(f) {
                Ok((frags, skeleton)) => {
                    let ids: Vec<String> = frags.iter().map(|x| x.id.clone()).collect();
                    for fr in &frags {
                        index.fragments.insert(
                            fr.id.clone(),
                            FragmentInfo {
                                id: fr.id.clone(),
                                file: f.rel_path.clone(),
                                source: source_model::fragment_token_text(fr, &frags, &f.content),
                                signature: fr.signature_text.clone(),
                                span_start: fr.full_span.0,
                            },
                        );
                    }
                    index.frags_by_file.insert(f.rel_path.clone(), ids);
                    index.skeletons.insert(f.rel_path.clone(), skeleton);
                    per_file.push((f.rel_path.clone(), frags));
                }
                Err(_) => {
                    index.skipped.push(f.rel_path.clone());
                }
            }
        }
        (index, per_file)
    }
}

// ---------------------------------------------------------------------------
// Packing
// ---------------------------------------------------------------------------

pub const FRAGMENT_MARKER_OPEN: &str = "<<fragment:";
pub const FRAGMENT_MARKER_CLOSE: &str = ">>";

fn fragment_marker(id: &str) -> String {
    format!("// {FRAGMENT_MARKER_OPEN}{id}{FRAGMENT_MARKER_CLOSE}")
}

/// Batch source: each member's text preceded by an id marker line (the
/// marker survives line-preserving transforms, letting outputs be split
/// back per fragment).
pub fn batch_source_text(batch: &[String], index: &ProjectIndex) -> Vec<u8> {
    let mut out = Vec::new();
    for id in batch {
        out.extend_from_slice(fragment_marker(id).as_bytes());
        out.push(b'\n');
        if let Some(info) = index.fragments.get(id) {
            out.extend_from_slice(&info.source);
        }
        out.push(b'\n');
    }
    out
}

#[derive(Debug)]
pub struct OutOfContext {
    pub mandatory_tokens: usize,
}

fn render_dep(id: &str, repr: DepRepr, text: &[u8]) -> String {
    let label = match repr {
        DepRepr::TranslatedBody => "dependency",
        DepRepr::SignatureOnly => "dependency signature",
    };
    let mut s = format!("// {label} {id}\n");
    s.push_str(&String::from_utf8_lossy(text));
    match repr {
        DepRepr::SignatureOnly => s.push_str(";\n"),
        DepRepr::TranslatedBody => s.push('\n'),
    }
    s
}

/// Pack one batch into a prompt under the budget. Dependency candidates
/// are the out-of-batch callees, ordered by descending call-site count
/// then id; each degrades translated body -> signature -> omitted.
#[allow(clippy::too_many_arguments)]
pub fn pack_prompt(
    batch: &[String],
    completed: &BTreeMap<String, TranslationResult>,
    graph: &CallGraph,
    index: &ProjectIndex,
    budget: &ContextBudget,
    template: &PromptTemplate,
    langs: (&str, &str),
    counter: &dyn CountTokens,
) -> Result<PromptPacket, OutOfContext> {
    let instruction_text = template.instantiate(langs.0, langs.1, "", "");
    let instruction_tokens = counter.count(instruction_text.as_bytes());
    let source_text = batch_source_text(batch, index);
    let source_tokens = counter.count(&source_text);
    let mandatory = instruction_tokens + source_tokens;
    let limit = budget.window.saturating_sub(budget.reserved_output);
    if mandatory > limit {
        return Err(OutOfContext {
            mandatory_tokens: mandatory,
        });
    }
    // Out-of-batch callees with aggregated call-site counts.
    let mut callee_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for ((from, to), count) in &graph.edges {
        if batch.contains(from) && !batch.contains(to) {
            *callee_counts.entry(to.as_str()).or_insert(0) += count;
        }
    }
    let mut candidates: Vec<(&str, usize)> =
        callee_counts.into_iter().collect();
    candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));

    let mut total = mandatory;
    let mut deps = Vec::new();
    let mut rendered_context = String::new();
    for (callee, _) in candidates {
        let translated = completed
            .get(callee)
            .filter(|r| r.status == Status::Translated);
        let mut placed = false;
        if let Some(r) = translated {
            let piece = render_dep(callee, DepRepr::TranslatedBody, r.output_text.as_bytes());
            let cost = counter.count(piece.as_bytes());
            if total + cost <= limit {
                total += cost;
                rendered_context.push_str(&piece);
                deps.push((callee.to_string(), DepRepr::TranslatedBody));
                placed = true;
            }
        }
        if !placed {
            let sig: Vec<u8> = index
                .fragments
                .get(callee)
                .map(|i| i.signature.clone())
                .unwrap_or_default();
            let piece = render_dep(callee, DepRepr::SignatureOnly, &sig);
            let cost = counter.count(piece.as_bytes());
            if total + cost <= limit {
                total += cost;
                rendered_context.push_str(&piece);
                deps.push((callee.to_string(), DepRepr::SignatureOnly));
            }
        }
    }
    assert!(
        total + budget.reserved_output <= budget.window,
        "budget safety violated: {total} + {} > {}",
        budget.reserved_output,
        budget.window
    );
    Ok(PromptPacket {
        fragment_ids: batch.to_vec(),
        instruction_text,
        source_text,
        dependency_context: deps,
        rendered_context,
        total_input_tokens: total,
        budget: *budget,
    })
}

/// Default output reservation: half the window, capped at twice the
/// largest source in the batch (translations assumed at most 2x source).
pub fn default_reserved_output(window: usize, max_source_tokens: usize) -> usize {
    (window / 2).min(max_source_tokens.saturating_mul(2))
}

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

pub trait Backend: Sync {
    /// Translate one packed prompt. `rendered_prompt` is the full
    /// instantiated template; `packet` carries the raw pieces.
    fn complete(&self, packet: &PromptPacket, rendered_prompt: &str) -> Result<String, BackendError>;
}

#[derive(Debug, Clone)]
pub enum MockTransform {
    Identity,
    LinePrefix(String),
}

/// Deterministic offline backend: a pure transform of the source text.
#[derive(Debug, Clone)]
pub struct MockBackend {
    pub transform: MockTransform,
}

impl MockBackend {
    pub fn apply(&self, source: &[u8]) -> String {
        let text = String::from_utf8_lossy(source);
        match &self.transform {
            MockTransform::Identity => text.into_owned(),
            MockTransform::LinePrefix(prefix) => {
                let mut out = String::new();
                for line in text.split_inclusive('\n') {
                    out.push_str(prefix);
                    out.push_str(line);
                }
                out
            }
        }
    }
}

impl Backend for MockBackend {
    fn complete(&self, packet: &PromptPacket, _prompt: &str) -> Result<String, BackendError> {
        Ok(self.apply(&packet.source_text))
    }
}

/// Chat-completions-compatible HTTP backend.
pub struct HttpBackend {
    pub base_url: String,
    pub model: String,
    pub api_key: String,
    pub retries: usize,
    pub timeout: std::time::Duration,
    pub min_interval: Option<std::time::Duration>,
    client: reqwest::blocking::Client,
    last_request: std::sync::Mutex<Option<std::time::Instant>>,
}

impl HttpBackend {
    pub fn new(
        base_url: &str,
        model: &str,
        api_key: &str,
        retries: usize,
        timeout: std::time::Duration,
        rps_limit: Option<f64>,
    ) -> Self {
        HttpBackend {
            base_url: base_url.trim_end_matches('/').to_string(),
            model: model.to_string(),
            api_key: api_key.to_string(),
            retries,
            timeout,
            min_interval: rps_limit.map(|rps| std::time::Duration::from_secs_f64(1.0 / rps)),
            client: reqwest::blocking::Client::new(),
            last_request: std::sync::Mutex::new(None),
        }
    }

    fn throttle(&self) {
        if let Some(interval) = self.min_interval {
            let mut last = self.last_request.lock().unwrap();
            if let Some(t) = *last {
                let elapsed = t.elapsed();
                if elapsed < interval {
                    std::thread::sleep(interval - elapsed);
                }
            }
            *last = Some(std::time::Instant::now());
        }
    }

    fn request_once(&self, prompt: &str, max_tokens: usize) -> Result<String, BackendError> {
        self.throttle();
        let body = serde_json::json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "max_tokens": max_tokens,
        });
        let resp = self
            .client
            .post(format!("{}/chat/completions", self.base_url))
            .bearer_auth(&self.api_key)
            .timeout(self.timeout)
            .json(&body)
            .send()
            .map_err(|e| {
                if e.is_timeout() {
                    BackendError::Timeout
                } else {
                    BackendError::Transport(e.to_string())
                }
            })?;
        let status = resp.status();
        if !status.is_success() {
            return Err(BackendError::HttpStatus(status.as_u16()));
        }
        let value: serde_json::Value = resp
            .json()
            .map_err(|e| BackendError::MalformedResponse(e.to_string()))?;
        extract_chat_text(&value)
    }
}

pub fn extract_chat_text(value: &serde_json::Value) -> Result<String, BackendError> {
    value["choices"][0]["message"]["content"]
        .as_str()
        .or_else(|| value["choices"][0]["text"].as_str())
        .map(str::to_string)
        .ok_or_else(|| BackendError::MalformedResponse("no choices[0] text".to_string()))
}

impl Backend for HttpBackend {
    fn complete(&self, packet: &PromptPacket, prompt: &str) -> Result<String, BackendError> {
        let mut delay = std::time::Duration::from_millis(250);
        let mut last_err = BackendError::Transport("no attempt made".to_string());
        for attempt in 0..=self.retries {
            if attempt > 0 {
                std::thread::sleep(delay);
                delay *= 2;
            }
            match self.request_once(prompt, packet.budget.reserved_output.max(1)) {
                Ok(text) => return Ok(text),
                Err(e) => last_err = e,
            }
        }
        Err(last_err)
    }
}

// ---------------------------------------------------------------------------
// Run
// ---------------------------------------------------------------------------

pub struct RunOptions {
    /// Fixed output reservation; None picks the per-batch default.
    pub reserved_output: Option<usize>,
    pub window: usize,
    pub fail_fast: bool,
}

/// Execute a plan in order, recording per-input status and token usage.
pub fn run_translation(
    plan: &TranslationPlan,
    graph: &CallGraph,
    index: &ProjectIndex,
    opts: &RunOptions,
    backend: &dyn Backend,
    template: &PromptTemplate,
    counter: &dyn CountTokens,
) -> Result<(Vec<TranslationResult>, RunSummary), TranslateError> {
    let langs = (plan.source_lang.as_str(), plan.target_lang.as_str());
    let mut completed: BTreeMap<String, TranslationResult> = BTreeMap::new();
    let mut prompt_fractions: Vec<f64> = Vec::new();
    let mut n_ooc = 0usize;
    let mut n_err = 0usize;
    let mut n_inputs = 0usize;
    for batch in &plan.batches {
        n_inputs += 1;
        let (packet, source_only_tokens) = match plan.mode {
            Mode::MethodDecomposition => {
                debug_assert!(batch.iter().all(|id| {
                    graph
                        .edges
                        .iter()
                        .filter(|((from, to), _)| from == id && !batch.contains(to))
                        .all(|((_, to), _)| {
                            completed.contains_key(to) || !index.fragments.contains_key(to)
                        })
                }));
                let max_src = batch
                    .iter()
                    .filter_map(|id| index.fragments.get(id))
                    .map(|i| counter.count(&i.source))
                    .max()
                    .unwrap_or(0);
                let reserved = opts
                    .reserved_output
                    .unwrap_or_else(|| default_reserved_output(opts.window, max_src));
                let overhead = template.overhead(langs.0, langs.1, counter);
                let budget = ContextBudget::new(opts.window, reserved.min(opts.window - 1), overhead);
                (
                    pack_prompt(
                        batch, &completed, graph, index, &budget, template, langs, counter,
                    ),
                    None,
                )
            }
            Mode::WholeFile => {
                let rel = &batch[0];
                let content = index.file_contents.get(rel).cloned().unwrap_or_default();
                let src_tokens = counter.count(&content);
                let reserved = opts
                    .reserved_output
                    .unwrap_or_else(|| default_reserved_output(opts.window, src_tokens));
                let overhead = template.overhead(langs.0, langs.1, counter);
                let budget = ContextBudget::new(opts.window, reserved.min(opts.window - 1), overhead);
                let instruction_text = template.instantiate(langs.0, langs.1, "", "");
                let mandatory = overhead + src_tokens;
                if mandatory > budget.window - budget.reserved_output {
                    (Err(OutOfContext { mandatory_tokens: mandatory }), Some(src_tokens))
                } else {
                    (
                        Ok(PromptPacket {
                            fragment_ids: batch.clone(),
                            instruction_text,
                            source_text: content,
                            dependency_context: Vec::new(),
                            rendered_context: String::new(),
                            total_input_tokens: mandatory,
                            budget,
                        }),
                        Some(src_tokens),
                    )
                }
            }
        };
        let _ = source_only_tokens;
        match packet {
            Err(ooc) => {
                n_ooc += 1;
                prompt_fractions.push(ooc.mandatory_tokens as f64 / opts.window as f64);
                for id in batch {
                    completed.insert(
                        id.clone(),
                        TranslationResult {
                            fragment_id: id.clone(),
                            status: Status::OutOfContext,
                            output_text: String::new(),
                            input_tokens: ooc.mandatory_tokens,
                        },
                    );
                }
            }
            Ok(packet) => {
                assert!(
                    packet.total_input_tokens + packet.budget.reserved_output
                        <= packet.budget.window,
                    "budget safety violated"
                );
                prompt_fractions.push(packet.total_input_tokens as f64 / opts.window as f64);
                let prompt = template.instantiate(
                    langs.0,
                    langs.1,
                    &packet.rendered_context,
                    &String::from_utf8_lossy(&packet.source_text),
                );
                match backend.complete(&packet, &prompt) {
                    Ok(output) => {
                        let outputs = split_batch_output(batch, &output, plan.mode);
                        for (id, text) in outputs {
                            completed.insert(
                                id.clone(),
                                TranslationResult {
                                    fragment_id: id,
                                    status: Status::Translated,
                                    output_text: text,
                                    input_tokens: packet.total_input_tokens,
                                },
                            );
                        }
                    }
                    Err(e) => {
                        if opts.fail_fast {
                            return Err(TranslateError::Backend(e));
                        }
                        n_err += 1;
                        for id in batch {
                            completed.insert(
                                id.clone(),
                                TranslationResult {
                                    fragment_id: id.clone(),
                                    status: Status::BackendError,
                                    output_text: String::new(),
                                    input_tokens: packet.total_input_tokens,
                                },
                            );
                        }
                    }
                }
            }
        }
    }
    let pct = if prompt_fractions.is_empty() {
        0.0
    } else {
        100.0 * prompt_fractions.iter().sum::<f64>() / prompt_fractions.len() as f64
    };
    let results: Vec<TranslationResult> = completed.into_values().collect();
    Ok((
        results,
        RunSummary {
            mode: plan.mode,
            n_inputs,
            n_out_of_context: n_ooc,
            n_backend_errors: n_err,
            pct_context_occupied: pct,
        },
    ))
}

/// Split a batch response on the per-fragment marker lines. If any marker
/// is missing the whole output is attributed to every member.
fn split_batch_output(batch: &[String], output: &str, mode: Mode) -> Vec<(String, String)> {
    if mode == Mode::WholeFile || batch.len() == 1 && !output.contains(FRAGMENT_MARKER_OPEN) {
        return vec![(batch[0].clone(), output.to_string())];
    }
    let lines: Vec<&str> = output.lines().collect();
    let mut positions: Vec<(usize, &String)> = Vec::new();
    for id in batch {
        let marker = format!("{FRAGMENT_MARKER_OPEN}{id}{FRAGMENT_MARKER_CLOSE}");
        match lines.iter().position(|l| l.contains(&marker)) {
            Some(p) => positions.push((p, id)),
            None => return batch.iter().map(|i| (i.clone(), output.to_string())).collect(),
        }
    }
    positions.sort();
    let mut out = Vec::new();
    for (k, (start, id)) in positions.iter().enumerate() {
        let end = positions
            .get(k + 1)
            .map(|(p, _)| *p)
            .unwrap_or(lines.len());
        let body = lines[start + 1..end].join("\n");
        out.push(((*id).clone(), body.trim_end().to_string() + "\n"));
    }
    out
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestInput {
    pub id: String,
    pub status: Status,
    pub input_tokens: usize,
    pub output_path: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestSummary {
    pub n_inputs: usize,
    pub n_out_of_context: usize,
    pub pct_context_occupied: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub mode: Mode,
    pub inputs: Vec<ManifestInput>,
    pub summary: ManifestSummary,
}

fn target_extension(lang: &str) -> &str {
    match lang.to_ascii_lowercase().as_str() {
        "python" => "py",
        "rust" => "rs",
        "java" => "java",
        "go" => "go",
        "c" => "c",
        "cpp" | "c++" => "cpp",
        "javascript" => "js",
        "typescript" => "ts",
        "kotlin" => "kt",
        "csharp" | "c#" => "cs",
        _ => "txt",
    }
}

fn output_rel_path(rel: &str, target_lang: &str) -> String {
    let ext = target_extension(target_lang);
    match rel.rsplit_once('.') {
        Some((stem, _)) => format!("{stem}.{ext}"),
        None => format!("{rel}.{ext}"),
    }
}

/// Write one output file per source file: translated bodies in original
/// fragment order, stub comments embedding the original signature for
/// failed fragments, and a verbatim copy for fragment-free files.
pub fn assemble_outputs(
    results: &[TranslationResult],
    index: &ProjectIndex,
    summary: &RunSummary,
    target_dir: &Path,
    target_lang: &str,
) -> Result<Manifest, TranslateError> {
    let by_id: BTreeMap<&str, &TranslationResult> = results
        .iter()
        .map(|r| (r.fragment_id.as_str(), r))
        .collect();
    let mut inputs = Vec::new();
    for (rel, frag_ids) in &index.frags_by_file {
        let out_rel = output_rel_path(rel, target_lang);
        let out_path = target_dir.join(&out_rel);
        if let Some(parent) = out_path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| TranslateError::Io {
                path: parent.to_path_buf(),
                source: e,
            })?;
        }
        let mut content = String::new();
        if frag_ids.is_empty() {
            content.push_str("// copied verbatim: no method fragments to translate\n");
            content.push_str(&String::from_utf8_lossy(
                index.file_contents.get(rel).map(Vec::as_slice).unwrap_or(b""),
            ));
        } else {
            let mut ordered: Vec<&String> = frag_ids.iter().collect();
            ordered.sort_by_key(|id| {
                index
                    .fragments
                    .get(id.as_str())
                    .map(|i| i.span_start)
                    .unwrap_or(0)
            });
            for id in ordered {
                match by_id.get(id.as_str()) {
                    Some(r) if r.status == Status::Translated => {
                        content.push_str(r.output_text.trim_end());
                        content.push_str("\n\n");
                    }
                    other => {
                        let status = match other.map(|r| r.status) {
                            Some(Status::OutOfContext) => "out_of_context",
                            Some(Status::BackendError) => "backend_error",
                            _ => "untranslated",
                        };
                        let sig = index
                            .fragments
                            .get(id.as_str())
                            .map(|i| String::from_utf8_lossy(&i.signature).into_owned())
                            .unwrap_or_default();
                        content.push_str(&format!("// [stub:{status}] {sig}\n\n"));
                    }
                }
            }
        }
        std::fs::write(&out_path, content).map_err(|e| TranslateError::Io {
            path: out_path.clone(),
            source: e,
        })?;
        for id in frag_ids {
            if let Some(r) = by_id.get(id.as_str()) {
                inputs.push(ManifestInput {
                    id: id.clone(),
                    status: r.status,
                    input_tokens: r.input_tokens,
                    output_path: out_rel.clone(),
                });
            }
        }
    }
    inputs.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(Manifest {
        mode: summary.mode,
        inputs,
        summary: ManifestSummary {
            n_inputs: summary.n_inputs,
            n_out_of_context: summary.n_out_of_context,
            pct_context_occupied: summary.pct_context_occupied,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::callgraph::{build_call_graph, condense};
    use crate::tokenizer::Tokenizer;

    fn project(files: &[(&str, &str)]) -> (ProjectIndex, CallGraph, SccDag, Vec<SourceFile>) {
        let sources: Vec<SourceFile> = files
            .iter()
            .map(|(rel, src)| SourceFile::from_bytes(rel, src.as_bytes().to_vec()))
            .collect();
        let (index, per_file) = ProjectIndex::build(&sources);
        let graph = build_call_graph(&per_file, &sources);
        let dag = condense(&graph);
        (index, graph, dag, sources)
    }

    #[test]
    fn whole_file_plan_is_path_ordered_singletons() {
        let (_, _, _, files) = project(&[
            ("b/B.java", "class B {}"),
            ("a/A.java", "class A {}"),
        ]);
        let plan = make_whole_file_plan(&files, "Java", "Python");
        assert_eq!(
            plan.batches,
            vec![vec!["a/A.java".to_string()], vec!["b/B.java".to_string()]]
        );
    }

    #[test]
    fn method_plan_passes_dag_order_through() {
        let (_, _, dag, _) = project(&[(
            "A.java",
            "class A { void a() { b(); } void b() { c(); } void c() {} }",
        )]);
        let plan = make_method_plan(&dag, "Java", "Python");
        assert_eq!(plan.batches, dag.batches());
        assert_eq!(plan.batches.len(), 3);
    }

    #[test]
    fn pack_without_callees_has_no_context() {
        let (index, graph, _, _) = project(&[("A.java", "class A { void f() { int x = 1; } }")]);
        let budget = ContextBudget::new(2048, 128, 0);
        let tpl = PromptTemplate::default();
        let packet = pack_prompt(
            &["A.java#A.f/0".to_string()],
            &BTreeMap::new(),
            &graph,
            &index,
            &budget,
            &tpl,
            ("Java", "Python"),
            &Tokenizer::Fallback,
        )
        .unwrap();
        assert!(packet.dependency_context.is_empty());
        let counter = Tokenizer::Fallback;
        let expected = counter.count(packet.instruction_text.as_bytes())
            + counter.count(&packet.source_text);
        assert_eq!(packet.total_input_tokens, expected);
    }

    #[test]
    fn second_dependency_degrades_to_signature() {
        // callee `big` has a large body; callee `small` is called twice so
        // it gets priority and fits as a full body.
        let big_body: String = (0..60).map(|i| format!("int v{i} = {i}; ")).collect();
        let src = format!(
            "class A {{ void caller() {{ small(); small(); big(); }} void small() {{ int x = 1; }} void big() {{ {big_body} }} }}"
        );
        let (index, graph, _, _) = project(&[("A.java", &src)]);
        let counter = Tokenizer::Fallback;
        let mut completed = BTreeMap::new();
        for id in ["A.java#A.small/0", "A.java#A.big/0"] {
            let info = &index.fragments[id];
            completed.insert(
                id.to_string(),
                TranslationResult {
                    fragment_id: id.to_string(),
                    status: Status::Translated,
                    output_text: String::from_utf8_lossy(&info.source).into_owned(),
                    input_tokens: 0,
                },
            );
        }
        let tpl = PromptTemplate::default();
        let overhead = tpl.overhead("Java", "Python", &counter);
        let caller_src = counter.count(&batch_source_text(
            &["A.java#A.caller/0".to_string()],
            &index,
        ));
        let small_body_cost = counter.count(
            render_dep(
                "A.java#A.small/0",
                DepRepr::TranslatedBody,
                &index.fragments["A.java#A.small/0"].source,
            )
            .as_bytes(),
        );
        // window sized to admit instruction + source + small's body but
        // not big's body (big's signature still fits)
        let window = overhead + caller_src + small_body_cost + 30;
        let budget = ContextBudget::new(window, 0, overhead);
        let packet = pack_prompt(
            &["A.java#A.caller/0".to_string()],
            &completed,
            &graph,
            &index,
            &budget,
            &tpl,
            ("Java", "Python"),
            &counter,
        )
        .unwrap();
        assert_eq!(
            packet.dependency_context,
            vec![
                ("A.java#A.small/0".to_string(), DepRepr::TranslatedBody),
                ("A.java#A.big/0".to_string(), DepRepr::SignatureOnly),
            ]
        );
    }

    #[test]
    fn oversized_fragment_is_out_of_context() {
        let body: String = (0..1200).map(|i| format!("int v{i} = {i}; ")).collect();
        let src = format!("class A {{ void huge() {{ {body} }} }}");
        let (index, graph, _, _) = project(&[("A.java", &src)]);
        let budget = ContextBudget::new(2048, 0, 0);
        let err = pack_prompt(
            &["A.java#A.huge/0".to_string()],
            &BTreeMap::new(),
            &graph,
            &index,
            &budget,
            &PromptTemplate::default(),
            ("Java", "Python"),
            &Tokenizer::Fallback,
        )
        .unwrap_err();
        assert!(err.mandatory_tokens > 2048);
    }

    #[test]
    fn empty_plan_summary_is_zero() {
        let plan = TranslationPlan {
            batches: vec![],
            mode: Mode::MethodDecomposition,
            source_lang: "Java".into(),
            target_lang: "Python".into(),
        };
        let (results, summary) = run_translation(
            &plan,
            &CallGraph::default(),
            &ProjectIndex::default(),
            &RunOptions {
                reserved_output: None,
                window: 2048,
                fail_fast: false,
            },
            &MockBackend {
                transform: MockTransform::Identity,
            },
            &PromptTemplate::default(),
            &Tokenizer::Fallback,
        )
        .unwrap();
        assert!(results.is_empty());
        assert_eq!(summary.n_inputs, 0);
        assert_eq!(summary.n_out_of_context, 0);
    }

    #[test]
    fn mock_identity_echoes_source() {
        let (index, graph, dag, _) = project(&[(
            "A.java",
            "class A { void a() { b(); } void b() {} }",
        )]);
        let plan = make_method_plan(&dag, "Java", "Python");
        let (results, summary) = run_translation(
            &plan,
            &graph,
            &index,
            &RunOptions {
                reserved_output: Some(64),
                window: 2048,
                fail_fast: false,
            },
            &MockBackend {
                transform: MockTransform::Identity,
            },
            &PromptTemplate::default(),
            &Tokenizer::Fallback,
        )
        .unwrap();
        assert_eq!(summary.n_out_of_context, 0);
        for r in &results {
            assert_eq!(r.status, Status::Translated);
            let info = &index.fragments[&r.fragment_id];
            assert!(r
                .output_text
                .contains(&String::from_utf8_lossy(&info.source).trim_end().to_string()));
        }
    }

    #[test]
    fn mock_line_prefix_transforms_all_lines() {
        let mock = MockBackend {
            transform: MockTransform::LinePrefix("// t: ".into()),
        };
        assert_eq!(mock.apply(b"a\nb\n"), "// t: a\n// t: b\n");
    }

    #[test]
    fn assemble_writes_bodies_and_stubs() {
        let (index, graph, dag, _) = project(&[(
            "p/A.java",
            "class A { void a() {} void b() {} }",
        )]);
        let plan = make_method_plan(&dag, "Java", "Python");
        let (mut results, summary) = run_translation(
            &plan,
            &graph,
            &index,
            &RunOptions {
                reserved_output: Some(64),
                window: 2048,
                fail_fast: false,
            },
            &MockBackend {
                transform: MockTransform::Identity,
            },
            &PromptTemplate::default(),
            &Tokenizer::Fallback,
        )
        .unwrap();
        // force one failure
        results[1].status = Status::OutOfContext;
        results[1].output_text.clear();
        let dir = tempfile::tempdir().unwrap();
        let manifest =
            assemble_outputs(&results, &index, &summary, dir.path(), "Python").unwrap();
        let out = std::fs::read_to_string(dir.path().join("p/A.py")).unwrap();
        assert_eq!(out.matches("[stub:").count(), 1);
        assert!(out.contains("void a() {}"));
        assert_eq!(manifest.inputs.len(), 2);
    }

    #[test]
    fn fragment_free_file_copies_verbatim() {
        let (index, _, _, _) = project(&[("A.java", "interface I { void f(); }")]);
        let summary = RunSummary {
            mode: Mode::MethodDecomposition,
            n_inputs: 0,
            n_out_of_context: 0,
            n_backend_errors: 0,
            pct_context_occupied: 0.0,
        };
        let dir = tempfile::tempdir().unwrap();
        assemble_outputs(&[], &index, &summary, dir.path(), "Python").unwrap();
        let out = std::fs::read_to_string(dir.path().join("A.py")).unwrap();
        assert!(out.starts_with("// copied verbatim"));
        assert!(out.contains("interface I"));
    }

    #[test]
    fn batch_output_splits_on_markers() {
        let batch = vec!["x".to_string(), "y".to_string()];
        let output = "// <<fragment:x>>\nbody x\n// <<fragment:y>>\nbody y\n";
        let split = split_batch_output(&batch, output, Mode::MethodDecomposition);
        assert_eq!(split[0], ("x".to_string(), "body x\n".to_string()));
        assert_eq!(split[1], ("y".to_string(), "body y\n".to_string()));
    }
}
