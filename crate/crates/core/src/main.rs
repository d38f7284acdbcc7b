use clap::{Args, Parser, Subcommand};
use codefrag::cli::{self, parse_mode, BackendKind, RunConfig};
use codefrag::metrics::ReportFormat;
use codefrag::translate::MockTransform;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "codefrag",
    about = "Method-level decomposition, token budgeting, call graphs, and bottom-up translation"
)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Per-project corpus statistics (files and methods vs the window)
    Analyze(CommonArgs),
    /// Extract method fragments with byte spans as JSON
    Decompose(CommonArgs),
    /// Build the fragment call graph and bottom-up batch order
    Graph(CommonArgs),
    /// Translate a project through the configured backend
    Translate(TranslateArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Corpus root directory
    corpus_root: PathBuf,
    /// key=value config file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Context window size in tokens
    #[arg(long)]
    window: Option<usize>,
    /// BPE merge-table file; lexeme fallback when absent
    #[arg(long)]
    tokenizer: Option<PathBuf>,
    /// Include files under test/ or tests/ path segments
    #[arg(long)]
    include_tests: Option<bool>,
    /// Output format: json, csv, markdown (graph: json or dot)
    #[arg(long)]
    format: Option<String>,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Token-count cache file
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Recompute a sample of cache hits and fail on mismatch
    #[arg(long)]
    verify_cache: bool,
    /// Worker pool size (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct TranslateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// whole_file or method_decomposition
    #[arg(long)]
    mode: Option<String>,
    /// mock or http
    #[arg(long)]
    backend: Option<String>,
    /// Chat-completions base URL (http backend)
    #[arg(long)]
    backend_url: Option<String>,
    /// Model name (http backend)
    #[arg(long)]
    model: Option<String>,
    /// Environment variable holding the API key
    #[arg(long)]
    api_key_env: Option<String>,
    /// Prompt template file with {SOURCE_LANG} {TARGET_LANG} {CONTEXT} {SOURCE}
    #[arg(long)]
    template: Option<PathBuf>,
    /// Directory for translated outputs and the manifest
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Tokens reserved for the model's output (default: adaptive)
    #[arg(long)]
    reserved_output: Option<usize>,
    #[arg(long)]
    source_lang: Option<String>,
    #[arg(long)]
    target_lang: Option<String>,
    /// Run both modes and print the comparison table
    #[arg(long)]
    compare: bool,
    /// Abort on the first backend error instead of recording it
    #[arg(long)]
    fail_fast: bool,
    /// Retry count for backend calls
    #[arg(long)]
    retries: Option<usize>,
    /// Max concurrent backend requests
    #[arg(long)]
    max_in_flight: Option<usize>,
    /// Requests-per-second cap for the http backend
    #[arg(long)]
    rps_limit: Option<f64>,
    /// Mock transform: identity or a line prefix string
    #[arg(long)]
    mock_prefix: Option<String>,
}

fn build_config(common: &CommonArgs) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        cli::apply_config_file(&mut cfg, path)?;
    }
    cfg.corpus_root = common.corpus_root.clone();
    if let Some(w) = common.window {
        cfg.window = w;
    }
    if let Some(t) = &common.tokenizer {
        cfg.tokenizer_path = Some(t.clone());
    }
    if let Some(it) = common.include_tests {
        cfg.include_tests = it;
    }
    if let Some(f) = &common.format {
        cfg.format = f
            .parse::<ReportFormat>()
            .or_else(|_| {
                if f == "dot" {
                    Ok(ReportFormat::Markdown) // graph command treats non-json as dot
                } else {
                    Err(format!("unknown format: {f}"))
                }
            })?;
    }
    if let Some(o) = &common.out {
        cfg.out = Some(o.clone());
    }
    if let Some(c) = &common.cache {
        cfg.cache_path = Some(c.clone());
    }
    cfg.verify_cache = common.verify_cache;
    if let Some(j) = common.jobs {
        cfg.jobs = Some(j);
    }
    Ok(cfg)
}

fn build_translate_config(args: &TranslateArgs) -> Result<RunConfig, String> {
    let mut cfg = build_config(&args.common)?;
    if let Some(m) = &args.mode {
        cfg.mode = parse_mode(m).ok_or_else(|| format!("unknown mode: {m}"))?;
    }
    if let Some(b) = &args.backend {
        cfg.backend = match b.as_str() {
            "mock" => BackendKind::Mock,
            "http" => BackendKind::Http,
            other => return Err(format!("unknown backend: {other}")),
        };
    }
    if let Some(u) = &args.backend_url {
        cfg.backend_url = Some(u.clone());
    }
    if let Some(m) = &args.model {
        cfg.model = Some(m.clone());
    }
    if let Some(e) = &args.api_key_env {
        cfg.api_key_env = e.clone();
    }
    if let Some(t) = &args.template {
        cfg.template_path = Some(t.clone());
    }
    if let Some(o) = &args.output_dir {
        cfg.output_dir = Some(o.clone());
    }
    if let Some(r) = args.reserved_output {
        cfg.reserved_output = Some(r);
    }
    if let Some(s) = &args.source_lang {
        cfg.source_lang = s.clone();
    }
    if let Some(t) = &args.target_lang {
        cfg.target_lang = t.clone();
    }
    cfg.compare = args.compare;
    cfg.fail_fast = cfg.fail_fast || args.fail_fast;
    if let Some(r) = args.retries {
        cfg.retries = r;
    }
    if let Some(m) = args.max_in_flight {
        cfg.max_in_flight = m;
    }
    if let Some(r) = args.rps_limit {
        cfg.rps_limit = Some(r);
    }
    if let Some(p) = &args.mock_prefix {
        cfg.mock_transform = MockTransform::LinePrefix(p.clone());
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = CliArgs::parse();
    let code = match &args.command {
        Command::Analyze(common) => match build_config(common) {
            Ok(cfg) => cli::cmd_analyze(&cfg),
            Err(e) => {
                eprintln!("error: {e}");
                cli::EXIT_ERROR
            }
        },
        Command::Decompose(common) => match build_config(common) {
            Ok(cfg) => cli::cmd_decompose(&cfg),
            Err(e) => {
                eprintln!("error: {e}");
                cli::EXIT_ERROR
            }
        },
        Command::Graph(common) => match build_config(common) {
            Ok(cfg) => cli::cmd_graph(&cfg),
            Err(e) => {
                eprintln!("error: {e}");
                cli::EXIT_ERROR
            }
        },
        Command::Translate(targs) => match build_translate_config(targs) {
            Ok(cfg) => cli::cmd_translate(&cfg),
            Err(e) => {
                eprintln!("error: {e}");
                cli::EXIT_ERROR
            }
        },
    };
    ExitCode::from(code as u8)
}
