//! Per-project corpus statistics (files over budget, tokens per method,
//! context consumption) and the derived cross-decomposition figures, plus
//! report rendering in JSON, CSV, and markdown.

use crate::source_model::{self, SourceError};
use crate::tokenizer::{ContextBudget, CountTokens};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("empty corpus: no parsable source files under {0}")]
    EmptyCorpus(String),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
}

/// One report row: the five corpus statistics for a project, plus the
/// tokenizer provenance needed for replication audits.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProjectReport {
    pub project: String,
    pub n_files: usize,
    pub skipped_files: usize,
    pub pct_files_over: f64,
    pub n_methods: usize,
    pub avg_tokens_per_method: f64,
    pub pct_methods_over: f64,
    pub pct_context: f64,
    pub window: usize,
    pub tokenizer_name: String,
    pub tokenizer_hash: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CorpusSummary {
    pub rows: Vec<ProjectReport>,
    pub averages: Option<ProjectReport>,
}

impl CorpusSummary {
    /// Rows sorted by project name, with an unweighted column-mean row.
    pub fn from_rows(mut rows: Vec<ProjectReport>) -> Self {
        rows.sort_by(|a, b| a.project.cmp(&b.project));
        let averages = unweighted_average(&rows);
        CorpusSummary { rows, averages }
    }
}

fn unweighted_average(rows: &[ProjectReport]) -> Option<ProjectReport> {
    if rows.is_empty() {
        return None;
    }
    let n = rows.len() as f64;
    let mean = |f: &dyn Fn(&ProjectReport) -> f64| rows.iter().map(f).sum::<f64>() / n;
    Some(ProjectReport {
        project: "Average".to_string(),
        n_files: 0,
        skipped_files: rows.iter().map(|r| r.skipped_files).sum(),
        pct_files_over: mean(&|r| r.pct_files_over),
        n_methods: 0,
        avg_tokens_per_method: mean(&|r| r.avg_tokens_per_method),
        pct_methods_over: mean(&|r| r.pct_methods_over),
        pct_context: mean(&|r| r.pct_context),
        window: rows[0].window,
        tokenizer_name: rows[0].tokenizer_name.clone(),
        tokenizer_hash: rows[0].tokenizer_hash.clone(),
    })
}

/// Average methods-per-row and files-per-row for the Average line, kept
/// out of the struct so `averages` stays schema-compatible.
pub fn average_counts(rows: &[ProjectReport]) -> (f64, f64) {
    if rows.is_empty() {
        return (0.0, 0.0);
    }
    let n = rows.len() as f64;
    (
        rows.iter().map(|r| r.n_files as f64).sum::<f64>() / n,
        rows.iter().map(|r| r.n_methods as f64).sum::<f64>() / n,
    )
}

/// Compute one project row. File statistics cover every scanned file;
/// fragment statistics cover the parsable ones. "Over budget" compares
/// raw token counts against the bare window (no overhead, no reserve).
pub fn compute_project_report(
    project: &Path,
    project_name: &str,
    budget: &ContextBudget,
    counter: &dyn CountTokens,
    include_tests: bool,
) -> Result<ProjectReport, MetricsError> {
    let files = source_model::scan_corpus(project, include_tests)?;
    if files.is_empty() {
        return Err(MetricsError::EmptyCorpus(project.display().to_string()));
    }
    struct FileStats {
        file_tokens: usize,
        fragment_tokens: Vec<usize>,
        skipped: bool,
    }
    let stats: Vec<FileStats> = files
        .par_iter()
        .map(|f| {
            let file_tokens = counter.count(&f.content);
            match source_model::extract_fragments(f) {
                Ok((frags, _)) => FileStats {
                    file_tokens,
                    fragment_tokens: frags
                        .iter()
                        .map(|fr| {
                            counter.count(&source_model::fragment_token_text(
                                fr, &frags, &f.content,
                            ))
                        })
                        .collect(),
                    skipped: false,
                },
                Err(_) => FileStats {
                    file_tokens,
                    fragment_tokens: Vec::new(),
                    skipped: true,
                },
            }
        })
        .collect();
    let skipped_files = stats.iter().filter(|s| s.skipped).count();
    if skipped_files == files.len() {
        return Err(MetricsError::EmptyCorpus(project.display().to_string()));
    }
    let n_files = files.len();
    let files_over = stats
        .iter()
        .filter(|s| s.file_tokens > budget.window)
        .count();
    let method_tokens: Vec<usize> = stats
        .iter()
        .flat_map(|s| s.fragment_tokens.iter().copied())
        .collect();
    let n_methods = method_tokens.len();
    let methods_over = method_tokens
        .iter()
        .filter(|&&t| t > budget.window)
        .count();
    let avg_tokens_per_method = if n_methods == 0 {
        0.0
    } else {
        method_tokens.iter().sum::<usize>() as f64 / n_methods as f64
    };
    Ok(ProjectReport {
        project: project_name.to_string(),
        n_files,
        skipped_files,
        pct_files_over: 100.0 * files_over as f64 / n_files as f64,
        n_methods,
        avg_tokens_per_method,
        pct_methods_over: if n_methods == 0 {
            0.0
        } else {
            100.0 * methods_over as f64 / n_methods as f64
        },
        pct_context: 100.0 * avg_tokens_per_method / budget.window as f64,
        window: budget.window,
        tokenizer_name: counter.tokenizer_name().to_string(),
        tokenizer_hash: counter.tokenizer_hash().to_string(),
    })
}

/// Percentage reduction of an out-of-context rate: (1 - after/before) x 100.
pub fn reduction_ratio(before_pct: f64, after_pct: f64) -> Result<f64, MetricsError> {
    if before_pct == 0.0 {
        return Err(MetricsError::DivisionByZero("reduction_ratio before_pct"));
    }
    Ok((1.0 - after_pct / before_pct) * 100.0)
}

/// Context-consumption improvement factor: before / after.
pub fn improvement_factor(before_pct: f64, after_pct: f64) -> Result<f64, MetricsError> {
    if after_pct == 0.0 {
        return Err(MetricsError::DivisionByZero("improvement_factor after_pct"));
    }
    Ok(before_pct / after_pct)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown format: {other}")),
        }
    }
}

const CSV_HEADER: &str = "project,n_files,skipped_files,pct_files_over,n_methods,avg_tokens_per_method,pct_methods_over,pct_context,window,tokenizer_name,tokenizer_hash";

/// Deterministic rendering: JSON with full precision, CSV with a fixed
/// header, markdown in the six-column corpus-table layout.
pub fn render_report(summary: &CorpusSummary, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(summary).expect("report serialization");
            out.push(b'\n');
            out
        }
        ReportFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in summary.rows.iter().chain(summary.averages.iter()) {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.project,
                    r.n_files,
                    r.skipped_files,
                    r.pct_files_over,
                    r.n_methods,
                    r.avg_tokens_per_method,
                    r.pct_methods_over,
                    r.pct_context,
                    r.window,
                    r.tokenizer_name,
                    r.tokenizer_hash
                ));
            }
            out.into_bytes()
        }
        ReportFormat::Markdown => {
            let mut out = String::new();
            out.push_str(
                "| Project | % Files >2K Tokens | # Methods | Avg. Tokens / Method | % Methods >2K Tokens | % 2K Context |\n",
            );
            out.push_str("|---|---|---|---|---|---|\n");
            for r in &summary.rows {
                out.push_str(&format!(
                    "| {} | {:.2}% | {} | {:.2} | {:.2}% | {:.2}% |\n",
                    r.project,
                    r.pct_files_over,
                    r.n_methods,
                    r.avg_tokens_per_method,
                    r.pct_methods_over,
                    r.pct_context
                ));
            }
            if let Some(avg) = &summary.averages {
                let (_, avg_methods) = average_counts(&summary.rows);
                out.push_str(&format!(
                    "| **{}** | **{:.2}%** | **{:.2}** | **{:.2}** | **{:.2}%** | **{:.2}%** |\n",
                    avg.project,
                    avg.pct_files_over,
                    avg_methods,
                    avg.avg_tokens_per_method,
                    avg.pct_methods_over,
                    avg.pct_context
                ));
            }
            out.into_bytes()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::Tokenizer;

    #[test]
    fn degenerate_project_reports_zero_methods() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("A.java"), "class A {}").unwrap();
        let r = compute_project_report(
            dir.path(),
            "p",
            &ContextBudget::raw(2048),
            &Tokenizer::Fallback,
            true,
        )
        .unwrap();
        assert_eq!(r.n_files, 1);
        assert_eq!(r.pct_files_over, 0.0);
        assert_eq!(r.n_methods, 0);
        assert_eq!(r.avg_tokens_per_method, 0.0);
        assert_eq!(r.pct_context, 0.0);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            compute_project_report(
                dir.path(),
                "p",
                &ContextBudget::raw(2048),
                &Tokenizer::Fallback,
                true
            ),
            Err(MetricsError::EmptyCorpus(_))
        ));
    }

    #[test]
    fn context_identity_holds_exactly() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("A.java"),
            "class A { void f() { int x = 1; } void g() { int yyyyyyyyyyy = 2; } }",
        )
        .unwrap();
        let r = compute_project_report(
            dir.path(),
            "p",
            &ContextBudget::raw(2048),
            &Tokenizer::Fallback,
            true,
        )
        .unwrap();
        assert_eq!(r.pct_context * r.window as f64, r.avg_tokens_per_method * 100.0);
    }

    #[test]
    fn reduction_ratio_matches_hand_arithmetic() {
        assert!((reduction_ratio(27.73, 0.14).unwrap() - 99.4951).abs() < 5e-3);
        assert_eq!(reduction_ratio(42.0, 42.0).unwrap(), 0.0);
        assert_eq!(reduction_ratio(50.0, 0.0).unwrap(), 100.0);
        assert!(reduction_ratio(0.0, 1.0).is_err());
    }

    #[test]
    fn improvement_factor_matches_hand_arithmetic() {
        assert_eq!(improvement_factor(36.0, 3.0).unwrap(), 12.0);
        assert_eq!(improvement_factor(5.0, 5.0).unwrap(), 1.0);
        assert_eq!(improvement_factor(10.0, 4.0).unwrap(), 2.5);
        assert!(improvement_factor(1.0, 0.0).is_err());
    }

    #[test]
    fn empty_summary_renders_headers_only() {
        let s = CorpusSummary::from_rows(vec![]);
        let md = String::from_utf8(render_report(&s, ReportFormat::Markdown)).unwrap();
        assert_eq!(md.lines().count(), 2);
        let csv = String::from_utf8(render_report(&s, ReportFormat::Csv)).unwrap();
        assert_eq!(csv.lines().count(), 1);
        let json: CorpusSummary =
            serde_json::from_slice(&render_report(&s, ReportFormat::Json)).unwrap();
        assert!(json.rows.is_empty());
    }

    #[test]
    fn markdown_row_format() {
        let row = ProjectReport {
            project: "cli".into(),
            n_files: 39,
            skipped_files: 0,
            pct_files_over: 30.77,
            n_methods: 582,
            avg_tokens_per_method: 97.91,
            pct_methods_over: 0.17,
            pct_context: 4.78,
            window: 2048,
            tokenizer_name: "t".into(),
            tokenizer_hash: "h".into(),
        };
        let s = CorpusSummary::from_rows(vec![row]);
        let md = String::from_utf8(render_report(&s, ReportFormat::Markdown)).unwrap();
        assert!(md.contains("| cli | 30.77% | 582 | 97.91 | 0.17% | 4.78% |"));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let row = ProjectReport {
            project: "p".into(),
            n_files: 2,
            skipped_files: 0,
            pct_files_over: 50.0,
            n_methods: 3,
            avg_tokens_per_method: 10.5,
            pct_methods_over: 0.0,
            pct_context: 100.0 * 10.5 / 2048.0,
            window: 2048,
            tokenizer_name: "t".into(),
            tokenizer_hash: "h".into(),
        };
        let s = CorpusSummary::from_rows(vec![row]);
        let first = render_report(&s, ReportFormat::Json);
        let parsed: CorpusSummary = serde_json::from_slice(&first).unwrap();
        let second = render_report(&parsed, ReportFormat::Json);
        assert_eq!(first, second);
    }

    #[test]
    fn averages_are_unweighted_row_means() {
        let mk = |p: &str, files_over: f64, avg: f64| ProjectReport {
            project: p.into(),
            n_files: 10,
            skipped_files: 0,
            pct_files_over: files_over,
            n_methods: 100,
            avg_tokens_per_method: avg,
            pct_methods_over: 0.0,
            pct_context: 100.0 * avg / 2048.0,
            window: 2048,
            tokenizer_name: "t".into(),
            tokenizer_hash: "h".into(),
        };
        let s = CorpusSummary::from_rows(vec![mk("a", 10.0, 50.0), mk("b", 30.0, 150.0)]);
        let avg = s.averages.as_ref().unwrap();
        assert_eq!(avg.pct_files_over, 20.0);
        assert_eq!(avg.avg_tokens_per_method, 100.0);
        assert_eq!(avg.pct_context, (100.0 * 50.0 / 2048.0 + 100.0 * 150.0 / 2048.0) / 2.0);
    }
}
