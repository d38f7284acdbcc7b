//! Best-effort static call graph over method fragments, resolved by
//! name/arity with locality tiers, plus SCC condensation into bottom-up
//! translation batches.
//!
//! There is no type inference: receiver expressions resolve by method
//! name and arity alone, so the graph over-approximates. That is enough
//! for translation ordering and context packing.

use crate::source_model::{self, FragmentKind, MethodFragment, SourceFile, TokKind};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CallGraph {
    pub nodes: BTreeSet<String>,
    /// (caller, callee) -> call-site count, used for packing priority.
    pub edges: BTreeMap<(String, String), usize>,
    /// Call sites with no in-corpus candidate: (caller, name, arity).
    pub unresolved: BTreeSet<(String, String, usize)>,
}

#[derive(Debug, Clone)]
pub struct SccDag {
    /// Non-empty fragment-id sets, sorted internally; indexed by position.
    pub components: Vec<Vec<String>>,
    /// Bottom-up permutation of component indices: callees come first.
    pub order: Vec<usize>,
    pub component_of: HashMap<String, usize>,
}

impl SccDag {
    /// Component member sets in bottom-up translation order.
    pub fn batches(&self) -> Vec<Vec<String>> {
        self.order
            .iter()
            .map(|&c| self.components[c].clone())
            .collect()
    }
}

/// Words that look like calls but never are. `this` and `super` are
/// handled separately as constructor invocations.
fn is_excluded_keyword(word: &str) -> bool {
    matches!(
        word,
        "if" | "for"
            | "while"
            | "switch"
            | "catch"
            | "return"
            | "new"
            | "synchronized"
            | "assert"
            | "do"
            | "try"
            | "else"
            | "throw"
            | "instanceof"
            | "yield"
    )
}

#[derive(Debug)]
struct Decl {
    id: String,
    owner: String,
    file: String,
    dir: String,
    arity: usize,
    varargs: bool,
    kind: FragmentKind,
}

#[derive(Debug)]
struct CallSite {
    name: String,
    arity: usize,
    kind: CallKind,
}

#[derive(Debug, PartialEq)]
enum CallKind {
    Plain,
    This,
    Super,
}

fn dir_of(rel: &str) -> String {
    match rel.rfind('/') {
        Some(p) => rel[..p].to_string(),
        None => String::new(),
    }
}

fn simple_owner(owner: &str) -> &str {
    owner.rsplit('.').next().unwrap_or(owner)
}

/// Build the fragment-level call graph for a set of files. Deterministic
/// in the edge set regardless of input ordering.
pub fn build_call_graph(
    fragments: &[(String, Vec<MethodFragment>)],
    files: &[SourceFile],
) -> CallGraph {
    let contents: HashMap<&str, &[u8]> = files
        .iter()
        .map(|f| (f.rel_path.as_str(), f.content.as_slice()))
        .collect();
    let mut by_name: HashMap<&str, Vec<Decl>> = HashMap::new();
    for (rel, frags) in fragments {
        for f in frags {
            by_name.entry(f.name.as_str()).or_default().push(Decl {
                id: f.id.clone(),
                owner: f.owner.clone(),
                file: rel.clone(),
                dir: dir_of(rel),
                arity: f.arity,
                varargs: f.is_varargs,
                kind: f.kind,
            });
        }
    }
    let mut graph = CallGraph::default();
    for (rel, frags) in fragments {
        for f in frags {
            graph.nodes.insert(f.id.clone());
        }
        let Some(src) = contents.get(rel.as_str()) else {
            continue;
        };
        for f in frags {
            for site in scan_call_sites(f, frags, src) {
                resolve_site(&mut graph, &by_name, f, rel, &site);
            }
        }
    }
    graph
}

fn resolve_site(
    graph: &mut CallGraph,
    by_name: &HashMap<&str, Vec<Decl>>,
    caller: &MethodFragment,
    caller_file: &str,
    site: &CallSite,
) {
    let lookup_name = match site.kind {
        CallKind::This => simple_owner(&caller.owner).to_string(),
        _ => site.name.clone(),
    };
    let arity_matches = |d: &Decl| d.arity == site.arity || (d.varargs && d.arity <= site.arity);
    let caller_dir = dir_of(caller_file);
    let empty = Vec::new();
    let candidates: Vec<&Decl> = match site.kind {
        CallKind::Super => {
            // any constructor except the caller's own type
            by_name
                .values()
                .flatten()
                .filter(|d| {
                    d.kind == FragmentKind::Constructor
                        && arity_matches(d)
                        && !(d.file == caller_file && d.owner == caller.owner)
                })
                .collect()
        }
        CallKind::This => by_name
            .get(lookup_name.as_str())
            .unwrap_or(&empty)
            .iter()
            .filter(|d| {
                d.kind == FragmentKind::Constructor
                    && arity_matches(d)
                    && d.file == caller_file
                    && d.owner == caller.owner
            })
            .collect(),
        CallKind::Plain => by_name
            .get(lookup_name.as_str())
            .unwrap_or(&empty)
            .iter()
            .filter(|d| arity_matches(d))
            .collect(),
    };
    let chosen: Vec<&&Decl> = match site.kind {
        CallKind::This => candidates.iter().collect(),
        CallKind::Super | CallKind::Plain => {
            type TierPred<'a> = Box<dyn Fn(&Decl) -> bool + 'a>;
            let tiers: [TierPred; 4] = [
                Box::new(|d: &Decl| d.file == caller_file && d.owner == caller.owner),
                Box::new(|d: &Decl| d.file == caller_file),
                Box::new(|d: &Decl| d.dir == caller_dir),
                Box::new(|_: &Decl| true),
            ];
            let start = if site.kind == CallKind::Super { 1 } else { 0 };
            let mut picked = Vec::new();
            for tier in &tiers[start..] {
                picked = candidates.iter().filter(|d| tier(d)).collect();
                if !picked.is_empty() {
                    break;
                }
            }
            picked
        }
    };
    if chosen.is_empty() {
        graph
            .unresolved
            .insert((caller.id.clone(), site.name.clone(), site.arity));
    } else {
        for d in chosen {
            *graph
                .edges
                .entry((caller.id.clone(), d.id.clone()))
                .or_insert(0) += 1;
        }
    }
}

/// Call-shaped occurrences `ident(args...)` inside a fragment body,
/// outside strings/comments and outside nested fragments.
fn scan_call_sites(frag: &MethodFragment, all: &[MethodFragment], src: &[u8]) -> Vec<CallSite> {
    let mut sites = Vec::new();
    for (s, e) in source_model::body_scan_ranges(frag, all) {
        let slice = &src[s..e];
        let toks = source_model::lex(slice);
        let code: Vec<_> = toks
            .iter()
            .filter(|t| {
                !matches!(
                    t.kind,
                    TokKind::LineComment | TokKind::BlockComment { .. }
                )
            })
            .collect();
        for idx in 0..code.len() {
            if code[idx].kind != TokKind::Ident {
                continue;
            }
            if idx + 1 >= code.len() || code[idx + 1].kind != TokKind::Punct(b'(') {
                continue;
            }
            let word = match std::str::from_utf8(&slice[code[idx].start..code[idx].end]) {
                Ok(w) => w,
                Err(_) => continue,
            };
            if idx > 0 && code[idx - 1].kind == TokKind::At {
                continue; // annotation
            }
            let kind = match word {
                "this" => CallKind::This,
                "super" => {
                    // `obj.super(...)` / `X.super.m(...)` are rare; only a
                    // bare `super(` is a constructor call.
                    if idx > 0 && code[idx - 1].kind == TokKind::Punct(b'.') {
                        continue;
                    }
                    CallKind::Super
                }
                w if is_excluded_keyword(w) => continue,
                _ => CallKind::Plain,
            };
            let arity = call_arity(&code, idx + 1);
            sites.push(CallSite {
                name: word.to_string(),
                arity,
                kind,
            });
        }
    }
    sites
}

/// Arity by top-level commas in the balanced parens starting at `open`.
fn call_arity(code: &[&source_model::Tok], open: usize) -> usize {
    let mut depth = 0i32;
    let mut commas = 0usize;
    let mut any = false;
    for t in &code[open..] {
        match t.kind {
            TokKind::Punct(b'(') | TokKind::Punct(b'[') => {
                depth += 1;
                if depth > 1 {
                    any = true;
                }
            }
            TokKind::Punct(b')') | TokKind::Punct(b']') => {
                depth -= 1;
                if depth == 0 {
                    break;
                }
                any = true;
            }
            TokKind::Punct(b',') if depth == 1 => {
                any = true;
                commas += 1;
            }
            _ => {
                if depth >= 1 {
                    any = true;
                }
            }
        }
    }
    if any {
        commas + 1
    } else {
        0
    }
}

/// Condense the graph into its SCC DAG with a deterministic bottom-up
/// order: callees first, ties broken by smallest fragment id.
pub fn condense(graph: &CallGraph) -> SccDag {
    let ids: Vec<&String> = graph.nodes.iter().collect();
    let index: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut pg = petgraph::graph::DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..ids.len()).map(|i| pg.add_node(i)).collect();
    for (from, to) in graph.edges.keys() {
        pg.add_edge(nodes[index[from.as_str()]], nodes[index[to.as_str()]], ());
    }
    let sccs = petgraph::algo::tarjan_scc(&pg);
    let mut components: Vec<Vec<String>> = sccs
        .iter()
        .map(|c| {
            let mut members: Vec<String> = c.iter().map(|&n| ids[pg[n]].clone()).collect();
            members.sort();
            members
        })
        .collect();
    components.sort_by(|a, b| a[0].cmp(&b[0]));
    let mut component_of = HashMap::new();
    for (ci, comp) in components.iter().enumerate() {
        for id in comp {
            component_of.insert(id.clone(), ci);
        }
    }
    // Kahn over reversed condensation edges (callee comp -> caller comp),
    // so zero-indegree components are pure callees.
    let n = components.len();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut indeg = vec![0usize; n];
    for (from, to) in graph.edges.keys() {
        let cf = component_of[from];
        let ct = component_of[to];
        if cf != ct && succ[ct].insert(cf) {
            indeg[cf] += 1;
        }
    }
    let mut ready: BTreeSet<(String, usize)> = (0..n)
        .filter(|&c| indeg[c] == 0)
        .map(|c| (components[c][0].clone(), c))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(first) = ready.iter().next().cloned() {
        ready.remove(&first);
        let c = first.1;
        order.push(c);
        for &next in &succ[c] {
            indeg[next] -= 1;
            if indeg[next] == 0 {
                ready.insert((components[next][0].clone(), next));
            }
        }
    }
    debug_assert_eq!(order.len(), n);
    SccDag {
        components,
        order,
        component_of,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeJson {
    from: String,
    to: String,
    count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct UnresolvedJson {
    from: String,
    name: String,
    arity: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphJson {
    nodes: Vec<String>,
    edges: Vec<EdgeJson>,
    unresolved: Vec<UnresolvedJson>,
}

/// Deterministic DOT or JSON rendering, nodes and edges in sorted order.
pub fn export_graph(graph: &CallGraph, format: GraphFormat) -> Vec<u8> {
    match format {
        GraphFormat::Dot => {
            let mut out = String::from("digraph cg {\n");
            for n in &graph.nodes {
                out.push_str(&format!("  \"{}\";\n", escape_dot(n)));
            }
            for ((from, to), count) in &graph.edges {
                out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                    escape_dot(from),
                    escape_dot(to),
                    count
                ));
            }
            out.push_str("}\n");
            out.into_bytes()
        }
        GraphFormat::Json => {
            let g = GraphJson {
                nodes: graph.nodes.iter().cloned().collect(),
                edges: graph
                    .edges
                    .iter()
                    .map(|((from, to), &count)| EdgeJson {
                        from: from.clone(),
                        to: to.clone(),
                        count,
                    })
                    .collect(),
                unresolved: graph
                    .unresolved
                    .iter()
                    .map(|(from, name, arity)| UnresolvedJson {
                        from: from.clone(),
                        name: name.clone(),
                        arity: *arity,
                    })
                    .collect(),
            };
            let mut bytes = serde_json::to_vec_pretty(&g).expect("graph serialization");
            bytes.push(b'\n');
            bytes
        }
    }
}

pub fn import_graph_json(bytes: &[u8]) -> Result<CallGraph, serde_json::Error> {
    let g: GraphJson = serde_json::from_slice(bytes)?;
    let mut graph = CallGraph {
        nodes: g.nodes.into_iter().collect(),
        ..Default::default()
    };
    for e in g.edges {
        graph.edges.insert((e.from, e.to), e.count);
    }
    for u in g.unresolved {
        graph.unresolved.insert((u.from, u.name, u.arity));
    }
    Ok(graph)
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source_model::{extract_from_bytes, SourceFile};

    fn graph_for(files: &[(&str, &str)]) -> CallGraph {
        let sources: Vec<SourceFile> = files
            .iter()
            .map(|(rel, src)| SourceFile::from_bytes(rel, src.as_bytes().to_vec()))
            .collect();
        let fragments: Vec<(String, Vec<_>)> = sources
            .iter()
            .map(|f| {
                let (frags, _) = extract_from_bytes(&f.rel_path, &f.content).unwrap();
                (f.rel_path.clone(), frags)
            })
            .collect();
        build_call_graph(&fragments, &sources)
    }

    #[test]
    fn no_call_sites() {
        let g = graph_for(&[("A.java", "class A { int f(int x) { return x + 1; } }")]);
        assert!(g.edges.is_empty());
        assert!(g.unresolved.is_empty());
        assert_eq!(g.nodes.len(), 1);
    }

    #[test]
    fn chain_edges() {
        let g = graph_for(&[(
            "A.java",
            "class A { void a() { b(); } void b() { c(); } void c() {} }",
        )]);
        let edges: Vec<_> = g.edges.keys().cloned().collect();
        assert_eq!(
            edges,
            vec![
                ("A.java#A.a/0".to_string(), "A.java#A.b/0".to_string()),
                ("A.java#A.b/0".to_string(), "A.java#A.c/0".to_string()),
            ]
        );
    }

    #[test]
    fn same_owner_tier_wins() {
        let g = graph_for(&[
            ("A.java", "class A { void g(int x) {} void call() { g(1); } }"),
            ("B.java", "class B { void g(int x) {} }"),
        ]);
        let edges: Vec<_> = g.edges.keys().cloned().collect();
        assert_eq!(
            edges,
            vec![("A.java#A.call/0".to_string(), "A.java#A.g/1".to_string())]
        );
    }

    #[test]
    fn corpus_tier_fans_out_to_all_candidates() {
        let g = graph_for(&[
            ("p/A.java", "class A { void call() { g(1); } }"),
            ("q/B.java", "class B { void g(int x) {} }"),
            ("r/C.java", "class C { void g(int x) {} }"),
        ]);
        assert_eq!(g.edges.len(), 2);
    }

    #[test]
    fn unresolved_external_calls() {
        let g = graph_for(&[("A.java", "class A { void f() { println(\"x\"); } }")]);
        assert!(g.edges.is_empty());
        assert_eq!(
            g.unresolved.iter().next().unwrap(),
            &("A.java#A.f/0".to_string(), "println".to_string(), 1)
        );
    }

    #[test]
    fn keywords_are_not_call_sites() {
        let g = graph_for(&[(
            "A.java",
            "class A { void f() { if (x()) { while (true) { return; } } } boolean x() { return false; } }",
        )]);
        assert_eq!(g.edges.len(), 1);
        assert!(g
            .unresolved
            .iter()
            .all(|(_, name, _)| name != "if" && name != "while"));
    }

    #[test]
    fn this_and_super_resolve_to_constructors() {
        let g = graph_for(&[
            (
                "A.java",
                "class A { A() {} A(int x) { this(); } }",
            ),
            (
                "B.java",
                "class B { B(int x) { super(); } }",
            ),
            ("C.java", "class C { C() {} }"),
        ]);
        assert!(g
            .edges
            .contains_key(&("A.java#A.A/1".to_string(), "A.java#A.A/0".to_string())));
        // super() from B: any constructor of arity 0 outside B
        assert!(g
            .edges
            .contains_key(&("B.java#B.B/1".to_string(), "C.java#C.C/0".to_string())));
    }

    #[test]
    fn varargs_matches_larger_call_arity() {
        let g = graph_for(&[(
            "A.java",
            "class A { void f(int... xs) {} void call() { f(1, 2, 3); } }",
        )]);
        assert!(g
            .edges
            .contains_key(&("A.java#A.call/0".to_string(), "A.java#A.f/1".to_string())));
    }

    #[test]
    fn self_recursion_is_one_edge() {
        let g = graph_for(&[(
            "A.java",
            "class A { int fact(int n) { return n <= 1 ? 1 : n * fact(n - 1); } }",
        )]);
        assert_eq!(g.edges.len(), 1);
        let ((from, to), &count) = g.edges.iter().next().unwrap();
        assert_eq!(from, to);
        assert_eq!(count, 1);
    }

    #[test]
    fn condense_no_edges_sorts_by_id() {
        let g = graph_for(&[("A.java", "class A { void a() {} void b() {} }")]);
        let dag = condense(&g);
        let batches = dag.batches();
        assert_eq!(batches.len(), 2);
        assert_eq!(batches[0], vec!["A.java#A.a/0".to_string()]);
        assert_eq!(batches[1], vec!["A.java#A.b/0".to_string()]);
    }

    #[test]
    fn condense_chain_is_bottom_up() {
        let g = graph_for(&[(
            "A.java",
            "class A { void a() { b(); } void b() { c(); } void c() {} }",
        )]);
        let dag = condense(&g);
        let names: Vec<String> = dag.batches().iter().map(|b| b[0].clone()).collect();
        assert_eq!(
            names,
            vec!["A.java#A.c/0", "A.java#A.b/0", "A.java#A.a/0"]
        );
    }

    #[test]
    fn condense_cycle_groups_component() {
        let g = graph_for(&[(
            "A.java",
            "class A { void a() { b(); } void b() { a(); } void c() { a(); } }",
        )]);
        let dag = condense(&g);
        let batches = dag.batches();
        assert_eq!(batches.len(), 2);
        assert_eq!(
            batches[0],
            vec!["A.java#A.a/0".to_string(), "A.java#A.b/0".to_string()]
        );
        assert_eq!(batches[1], vec!["A.java#A.c/0".to_string()]);
    }

    #[test]
    fn export_empty_dot() {
        let g = CallGraph::default();
        assert_eq!(export_graph(&g, GraphFormat::Dot), b"digraph cg {\n}\n");
    }

    #[test]
    fn export_edge_with_count_label() {
        let mut g = CallGraph::default();
        g.nodes.insert("a".into());
        g.nodes.insert("b".into());
        g.edges.insert(("a".into(), "b".into()), 2);
        let dot = String::from_utf8(export_graph(&g, GraphFormat::Dot)).unwrap();
        assert!(dot.contains("\"a\" -> \"b\" [label=\"2\"];"));
    }

    #[test]
    fn json_round_trip() {
        let g = graph_for(&[(
            "A.java",
            "class A { void a() { b(); ext(); } void b() { b(); } }",
        )]);
        let json = export_graph(&g, GraphFormat::Json);
        let back = import_graph_json(&json).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn resolution_is_order_independent() {
        let files = [
            ("p/A.java", "class A { void call() { g(1); } }"),
            ("p/B.java", "class B { void g(int x) {} }"),
            ("q/C.java", "class C { void g(int x) {} }"),
        ];
        let fwd = graph_for(&files);
        let mut rev_files = files;
        rev_files.reverse();
        let rev = graph_for(&rev_files);
        assert_eq!(fwd, rev);
        assert_eq!(
            condense(&fwd).batches(),
            condense(&rev).batches()
        );
    }
}
