//! End-to-end runs of the installed binary: exit codes, formats, the
//! token-count cache, and the http backend against a local stub server.

use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_codefrag"))
}

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn empty_corpus_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["analyze", "decompose", "graph"] {
        let out = run(&[sub, dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{sub}");
    }
}

#[test]
fn missing_root_exits_1() {
    let out = run(&["analyze", "/nonexistent/corpus/root"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_format_exits_1() {
    let out = run(&["analyze", fixture("table2").to_str().unwrap(), "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_formats_and_tokenizer_hash() {
    let root = fixture("table2");
    let csv = run(&["analyze", root.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(csv.status.code(), Some(0));
    let text = stdout(&csv);
    assert!(text.starts_with(
        "project,n_files,skipped_files,pct_files_over,n_methods,avg_tokens_per_method,"
    ));
    assert!(text.contains("fallback"));

    let json = run(&[
        "analyze",
        root.to_str().unwrap(),
        "--format",
        "json",
        "--tokenizer",
        fixture("tiny.merges").to_str().unwrap(),
    ]);
    assert_eq!(json.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows[0]["tokenizer_name"], "tiny");
    assert_eq!(rows[0]["tokenizer_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn cache_does_not_change_the_report() {
    let root = fixture("table2");
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let plain = run(&["analyze", root.to_str().unwrap(), "--format", "csv"]);
    let cached1 = run(&[
        "analyze", root.to_str().unwrap(), "--format", "csv",
        "--cache", cache.to_str().unwrap(),
    ]);
    assert!(cache.is_file(), "cache written");
    let cached2 = run(&[
        "analyze", root.to_str().unwrap(), "--format", "csv",
        "--cache", cache.to_str().unwrap(), "--verify-cache",
    ]);
    assert_eq!(plain.status.code(), Some(0));
    assert_eq!(cached2.status.code(), Some(0));
    assert_eq!(stdout(&plain), stdout(&cached1));
    assert_eq!(stdout(&plain), stdout(&cached2));
}

#[test]
fn decompose_and_graph_are_consistent() {
    let root = fixture("table2");
    let dec = run(&["decompose", root.to_str().unwrap()]);
    assert_eq!(dec.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&dec)).unwrap();
    assert_eq!(doc["files"].as_object().unwrap().len(), 22);
    assert_eq!(doc["skipped_files"], 0);

    let graph = run(&["graph", root.to_str().unwrap(), "--format", "json"]);
    assert_eq!(graph.status.code(), Some(0));
    let gdoc: serde_json::Value = serde_json::from_str(&stdout(&graph)).unwrap();
    let n_frags: usize = doc["files"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.as_array().unwrap().len())
        .sum();
    assert_eq!(gdoc["nodes"].as_array().unwrap().len(), n_frags);
    let n_batched: usize = gdoc["batches"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b.as_array().unwrap().len())
        .sum();
    assert_eq!(n_batched, n_frags);

    let dot = run(&["graph", root.to_str().unwrap(), "--format", "dot"]);
    assert!(stdout(&dot).starts_with("digraph"));
}

#[test]
fn translate_compare_writes_both_manifests() {
    let root = fixture("table2");
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "translate", root.to_str().unwrap(),
        "--backend", "mock",
        "--compare",
        "--output-dir", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("| No Decomposition | 22 | 8 |"), "{text}");
    assert!(text.contains("| Method Decomposition | 22 | 0 |"), "{text}");
    for mode in ["whole_file", "method_decomposition"] {
        let manifest: serde_json::Value = serde_json::from_slice(
            &std::fs::read(dir.path().join(mode).join("manifest.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(manifest["mode"], mode);
    }
    let assembled = dir
        .path()
        .join("method_decomposition/src/ArgumentParser.py");
    let body = std::fs::read_to_string(&assembled).unwrap();
    assert!(body.contains("step00"), "assembled output keeps method bodies");
}

#[test]
fn mock_prefix_reaches_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    std::fs::create_dir_all(&src).unwrap();
    std::fs::write(
        src.join("Tiny.java"),
        "class Tiny {\n    int one() {\n        return 1;\n    }\n}\n",
    )
    .unwrap();
    let outputs = dir.path().join("out");
    let out = run(&[
        "translate", dir.path().to_str().unwrap(),
        "--backend", "mock",
        "--mock-prefix", "# ",
        "--output-dir", outputs.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(outputs.join("src/Tiny.py")).unwrap();
    assert!(body.contains("# int one() {"), "{body}");
}

/// Minimal chat-completions stub: one canned response per request,
/// connection closed after each.
fn spawn_stub(reply: &'static str) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut buf = Vec::new();
            let mut chunk = [0u8; 4096];
            let body_len;
            loop {
                let n = stream.read(&mut chunk).unwrap_or(0);
                if n == 0 {
                    return;
                }
                buf.extend_from_slice(&chunk[..n]);
                if let Some(pos) = buf.windows(4).position(|w| w == b"\r\n\r\n") {
                    let head = String::from_utf8_lossy(&buf[..pos]).to_lowercase();
                    let want: usize = head
                        .lines()
                        .find_map(|l| l.strip_prefix("content-length:"))
                        .and_then(|v| v.trim().parse().ok())
                        .unwrap_or(0);
                    body_len = pos + 4 + want;
                    break;
                }
            }
            while buf.len() < body_len {
                let n = stream.read(&mut chunk).unwrap_or(0);
                if n == 0 {
                    break;
                }
                buf.extend_from_slice(&chunk[..n]);
            }
            let body = serde_json::json!({
                "choices": [{"message": {"content": reply}}]
            })
            .to_string();
            let _ = write!(
                stream,
                "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                body.len(),
                body
            );
        }
    });
    format!("http://{addr}")
}

#[test]
fn http_backend_round_trip() {
    let url = spawn_stub("# stub translation\n");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    std::fs::create_dir_all(&src).unwrap();
    std::fs::write(
        src.join("Tiny.java"),
        "class Tiny {\n    int one() {\n        return 1;\n    }\n}\n",
    )
    .unwrap();
    let outputs = dir.path().join("out");
    let out = bin()
        .args([
            "translate", dir.path().to_str().unwrap(),
            "--backend", "http",
            "--backend-url", &url,
            "--model", "stub-model",
            "--output-dir", outputs.to_str().unwrap(),
        ])
        .env("CODEFRAG_API_KEY", "test-key")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(outputs.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["summary"]["n_out_of_context"], 0);
    let body = std::fs::read_to_string(outputs.join("src/Tiny.py")).unwrap();
    assert!(body.contains("# stub translation"), "{body}");
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let root = fixture("table2");
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "format=csv\nwindow=1024\n").unwrap();
    let from_file = run(&[
        "analyze", root.to_str().unwrap(),
        "--config", cfg.to_str().unwrap(),
    ]);
    assert!(stdout(&from_file).starts_with("project,"));
    let overridden = run(&[
        "analyze", root.to_str().unwrap(),
        "--config", cfg.to_str().unwrap(),
        "--format", "markdown",
    ]);
    assert!(stdout(&overridden).starts_with("| Project |"));
}
