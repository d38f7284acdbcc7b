//! Shared generators and brute-force oracles for the integration suites.
//! Each test target compiles this module separately, so any one target
//! uses only a subset of it.
#![allow(dead_code)]

use codefrag::callgraph::CallGraph;
use codefrag::tokenizer::TokenModel;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

// ---------------------------------------------------------------------------
// Random Java-ish source files (brace-balanced by construction)
// ---------------------------------------------------------------------------

const STATEMENTS: &[&str] = &[
    "int x = 1;",
    "count += 2;",
    "String s = \"{ not a brace }\";",
    "String q = \"escaped \\\" quote } here\";",
    "char c = '{';",
    "char d = '}';",
    "char e = '\\'';",
    "// line comment with } stray brace",
    "/* block comment { unbalanced */",
    "if (x > 0) { x--; }",
    "while (x > 0) { x -= 1; }",
    "helper(x, \"})\");",
    "return;",
];

const TEXT_BLOCK: &str = "String tb = \"\"\"\n            { \"inside\" } // not a comment\n            \"\"\";";

fn indent(s: &mut String, depth: usize) {
    for _ in 0..depth {
        s.push_str("    ");
    }
}

fn gen_body(rng: &mut impl Rng, s: &mut String, depth: usize) {
    let n = rng.random_range(0..5);
    for _ in 0..n {
        indent(s, depth);
        if rng.random_bool(0.06) {
            s.push_str(TEXT_BLOCK);
        } else {
            s.push_str(STATEMENTS[rng.random_range(0..STATEMENTS.len())]);
        }
        s.push('\n');
    }
    if depth < 4 && rng.random_bool(0.15) {
        indent(s, depth);
        s.push_str("Runnable r = new Runnable() {\n");
        indent(s, depth + 1);
        s.push_str("public void run() {\n");
        gen_body(rng, s, depth + 2);
        indent(s, depth + 1);
        s.push_str("}\n");
        indent(s, depth);
        s.push_str("};\n");
    }
}

fn gen_method(rng: &mut impl Rng, s: &mut String, idx: usize, depth: usize) {
    if rng.random_bool(0.3) {
        indent(s, depth);
        s.push_str("/** Doc for the next member. */\n");
    }
    if rng.random_bool(0.2) {
        indent(s, depth);
        s.push_str("@Override\n");
    }
    indent(s, depth);
    let vis = ["public ", "private ", "protected ", "", "static ", "public static "];
    s.push_str(vis[rng.random_range(0..vis.len())]);
    let params = ["()", "(int a)", "(int a, String b)", "(String... rest)"];
    s.push_str(&format!(
        "void m{idx}{} {{\n",
        params[rng.random_range(0..params.len())]
    ));
    gen_body(rng, s, depth + 1);
    indent(s, depth);
    s.push_str("}\n");
}

fn gen_class(rng: &mut impl Rng, s: &mut String, idx: usize, depth: usize) {
    indent(s, depth);
    let kinds = ["class", "final class", "abstract class", "interface", "enum"];
    let kind = kinds[rng.random_range(0..if depth == 0 { kinds.len() } else { 3 })];
    s.push_str(&format!("{} C{}_{} {{\n", kind, depth, idx));
    if kind == "enum" {
        indent(s, depth + 1);
        s.push_str("ALPHA, BETA { void hook() { int y = 0; } }, GAMMA;\n");
    }
    let members = rng.random_range(0..5);
    for m in 0..members {
        match rng.random_range(0..10) {
            0 if depth < 2 => gen_class(rng, s, m, depth + 1),
            1 => {
                indent(s, depth + 1);
                s.push_str("static { int init = 42; }\n");
            }
            2 => {
                indent(s, depth + 1);
                s.push_str("private int field = \"{\".length();\n");
            }
            _ => gen_method(rng, s, m, depth + 1),
        }
    }
    indent(s, depth);
    s.push_str("}\n");
}

/// One random brace-balanced Java-ish file with opaque regions that
/// contain stray braces.
pub fn gen_java(rng: &mut impl Rng) -> Vec<u8> {
    let mut s = String::new();
    if rng.random_bool(0.4) {
        s.push_str("package fuzz.example;\n\n");
    }
    for _ in 0..rng.random_range(0..3) {
        s.push_str("import java.util.List;\n");
    }
    let n = rng.random_range(1..=3);
    for i in 0..n {
        gen_class(rng, &mut s, i, 0);
        s.push('\n');
    }
    s.into_bytes()
}

// ---------------------------------------------------------------------------
// BPE: random derivable models and the one-merge-per-step oracle
// ---------------------------------------------------------------------------

/// Random merge table over a small alphabet; every symbol is derivable
/// from earlier merges, which is what the loader enforces.
pub fn gen_model(rng: &mut impl Rng) -> TokenModel {
    let alphabet: &[u8] = b"ab {}\n";
    let mut derivable: Vec<Vec<u8>> = alphabet.iter().map(|&b| vec![b]).collect();
    let mut seen = HashSet::new();
    let mut merges = Vec::new();
    for _ in 0..rng.random_range(0..25) {
        let l = derivable[rng.random_range(0..derivable.len())].clone();
        let r = derivable[rng.random_range(0..derivable.len())].clone();
        if l.len() + r.len() > 8 || !seen.insert((l.clone(), r.clone())) {
            continue;
        }
        let mut merged = l.clone();
        merged.extend_from_slice(&r);
        merges.push((l, r));
        derivable.push(merged);
    }
    TokenModel::from_merges("fuzz", merges)
}

pub fn gen_text(rng: &mut impl Rng) -> Vec<u8> {
    let alphabet: &[u8] = b"ab {}\n";
    (0..rng.random_range(0..64))
        .map(|_| alphabet[rng.random_range(0..alphabet.len())])
        .collect()
}

/// Reference tokenization: apply exactly one merge per step, always the
/// lowest-rank pair present, at its leftmost occurrence.
pub fn oracle_token_count(model: &TokenModel, text: &[u8]) -> usize {
    let ranks: HashMap<(&[u8], &[u8]), usize> = model
        .merges()
        .iter()
        .enumerate()
        .map(|(i, (l, r))| ((l.as_slice(), r.as_slice()), i))
        .collect();
    let mut syms: Vec<Vec<u8>> = text.iter().map(|&b| vec![b]).collect();
    loop {
        let mut best: Option<(usize, usize)> = None;
        for i in 0..syms.len().saturating_sub(1) {
            if let Some(&r) = ranks.get(&(syms[i].as_slice(), syms[i + 1].as_slice())) {
                if best.is_none_or(|(br, _)| r < br) {
                    best = Some((r, i));
                }
            }
        }
        match best {
            Some((_, i)) => {
                let right = syms.remove(i + 1);
                syms[i].extend_from_slice(&right);
            }
            None => return syms.len(),
        }
    }
}

// ---------------------------------------------------------------------------
// SCC: random digraphs and the mutual-reachability oracle
// ---------------------------------------------------------------------------

pub fn gen_graph(rng: &mut impl Rng) -> CallGraph {
    let n = rng.random_range(1..=12);
    let nodes: Vec<String> = (0..n).map(|i| format!("n{i:02}")).collect();
    let mut edges = BTreeMap::new();
    for a in &nodes {
        for b in &nodes {
            if rng.random_bool(0.15) {
                edges.insert((a.clone(), b.clone()), 1);
            }
        }
    }
    CallGraph {
        nodes: nodes.into_iter().collect(),
        edges,
        unresolved: BTreeSet::new(),
    }
}

/// SCC partition by brute force: transitive closure, then group nodes
/// that reach each other.
#[allow(clippy::needless_range_loop)]
pub fn oracle_components(graph: &CallGraph) -> BTreeSet<BTreeSet<String>> {
    let nodes: Vec<&String> = graph.nodes.iter().collect();
    let idx: HashMap<&String, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let n = nodes.len();
    let mut reach = vec![vec![false; n]; n];
    for i in 0..n {
        reach[i][i] = true;
    }
    for (a, b) in graph.edges.keys() {
        reach[idx[a]][idx[b]] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out: BTreeSet<BTreeSet<String>> = BTreeSet::new();
    for i in 0..n {
        let comp: BTreeSet<String> = (0..n)
            .filter(|&j| reach[i][j] && reach[j][i])
            .map(|j| nodes[j].clone())
            .collect();
        out.insert(comp);
    }
    out
}
