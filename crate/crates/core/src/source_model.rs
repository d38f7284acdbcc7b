//! Structural decomposition of Java-like source files into method
//! fragments with exact byte spans, without a full grammar.
//!
//! Parsing is lexical: string literals, char literals, and comments are
//! opaque, and members are recognized by brace matching plus a signature
//! pattern (modifiers, optional type, identifier, balanced parens,
//! optional throws clause, `{`).

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum SourceError {
    #[error("not a directory: {0}")]
    NotADirectory(PathBuf),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("unbalanced braces in {path} at byte {offset}")]
    UnbalancedBraces { path: String, offset: usize },
    #[error("unknown fragment id: {0}")]
    UnknownFragmentId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Source,
    Test,
}

#[derive(Debug, Clone)]
pub struct SourceFile {
    pub path: PathBuf,
    /// Path relative to the scanned root, with `/` separators.
    pub rel_path: String,
    pub content: Vec<u8>,
    pub role: Role,
}

impl SourceFile {
    pub fn from_bytes(rel_path: &str, content: Vec<u8>) -> Self {
        SourceFile {
            path: PathBuf::from(rel_path),
            rel_path: rel_path.to_string(),
            role: role_for_path(rel_path),
            content,
        }
    }
}

pub fn role_for_path(rel_path: &str) -> Role {
    if rel_path
        .split('/')
        .any(|seg| seg == "test" || seg == "tests")
    {
        Role::Test
    } else {
        Role::Source
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FragmentKind {
    Method,
    Constructor,
}

/// Half-open byte range.
pub type Span = (usize, usize);

#[derive(Debug, Clone)]
pub struct MethodFragment {
    pub id: String,
    pub owner: String,
    pub name: String,
    pub arity: usize,
    pub kind: FragmentKind,
    pub is_varargs: bool,
    pub signature_text: Vec<u8>,
    pub doc_span: Option<Span>,
    pub body_span: Span,
    pub full_span: Span,
    pub token_count: Option<usize>,
}

impl MethodFragment {
    pub fn full_text<'a>(&self, src: &'a [u8]) -> &'a [u8] {
        &src[self.full_span.0..self.full_span.1]
    }
}

#[derive(Debug, Clone)]
pub enum Segment {
    Literal(Span),
    Fragment { id: String, span: Span },
}

/// Ordered decomposition of a file into literal runs and top-level
/// fragment references; concatenation reproduces the file byte-exactly.
#[derive(Debug, Clone)]
pub struct FileSkeleton {
    pub file: String,
    pub content: Vec<u8>,
    pub segments: Vec<Segment>,
}

/// Recursively collect `.java` files under `root`, sorted by relative
/// path. Read failures abort with the failing path.
pub fn scan_corpus(root: &Path, include_tests: bool) -> Result<Vec<SourceFile>, SourceError> {
    if !root.is_dir() {
        return Err(SourceError::NotADirectory(root.to_path_buf()));
    }
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(root).follow_links(false) {
        let entry = entry.map_err(|e| SourceError::Io {
            path: e.path().map(Path::to_path_buf).unwrap_or_default(),
            source: e
                .into_io_error()
                .unwrap_or_else(|| std::io::Error::other("walk error")),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        if entry.path().extension().and_then(|e| e.to_str()) != Some("java") {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .unwrap_or(entry.path())
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        let role = role_for_path(&rel);
        if !include_tests && role == Role::Test {
            continue;
        }
        let content = std::fs::read(entry.path()).map_err(|e| SourceError::Io {
            path: entry.path().to_path_buf(),
            source: e,
        })?;
        files.push(SourceFile {
            path: entry.path().to_path_buf(),
            rel_path: rel,
            content,
            role,
        });
    }
    files.sort_by(|a, b| a.rel_path.cmp(&b.rel_path));
    Ok(files)
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TokKind {
    Ident,
    Number,
    Str,
    Char,
    LineComment,
    BlockComment { doc: bool },
    At,
    Punct(u8),
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tok {
    pub kind: TokKind,
    pub start: usize,
    pub end: usize,
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_' || b == b'$' || b >= 0x80
}

fn is_ident_part(b: u8) -> bool {
    is_ident_start(b) || b.is_ascii_digit()
}

/// Lex source bytes. Strings, chars, and comments become single opaque
/// tokens so braces inside them never affect nesting.
pub(crate) fn lex(src: &[u8]) -> Vec<Tok> {
    let mut toks = Vec::new();
    let mut i = 0;
    let n = src.len();
    while i < n {
        let b = src[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if b == b'/' && i + 1 < n && src[i + 1] == b'/' {
            i += 2;
            while i < n && src[i] != b'\n' {
                i += 1;
            }
            TokKind::LineComment
        } else if b == b'/' && i + 1 < n && src[i + 1] == b'*' {
            let doc = i + 2 < n && src[i + 2] == b'*' && (i + 3 >= n || src[i + 3] != b'/');
            i += 2;
            while i + 1 < n && !(src[i] == b'*' && src[i + 1] == b'/') {
                i += 1;
            }
            i = (i + 2).min(n);
            TokKind::BlockComment { doc }
        } else if b == b'"' {
            if i + 2 < n && src[i + 1] == b'"' && src[i + 2] == b'"' {
                // text block
                i += 3;
                while i + 2 < n && !(src[i] == b'"' && src[i + 1] == b'"' && src[i + 2] == b'"') {
                    if src[i] == b'\\' {
                        i += 1;
                    }
                    i += 1;
                }
                i = (i + 3).min(n);
            } else {
                i += 1;
                while i < n && src[i] != b'"' && src[i] != b'\n' {
                    if src[i] == b'\\' {
                        i += 1;
                    }
                    i += 1;
                }
                i = (i + 1).min(n);
            }
            TokKind::Str
        } else if b == b'\'' {
            i += 1;
            while i < n && src[i] != b'\'' && src[i] != b'\n' {
                if src[i] == b'\\' {
                    i += 1;
                }
                i += 1;
            }
            i = (i + 1).min(n);
            TokKind::Char
        } else if is_ident_start(b) {
            while i < n && is_ident_part(src[i]) {
                i += 1;
            }
            TokKind::Ident
        } else if b.is_ascii_digit() {
            while i < n
                && (is_ident_part(src[i])
                    || (src[i] == b'.' && i + 1 < n && src[i + 1].is_ascii_digit()))
            {
                i += 1;
            }
            TokKind::Number
        } else if b == b'@' {
            i += 1;
            TokKind::At
        } else {
            i += 1;
            TokKind::Punct(b)
        };
        toks.push(Tok {
            kind,
            start,
            end: i,
        });
    }
    toks
}

const MODIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "strictfp",
    "transient",
    "volatile",
    "default",
    "sealed",
];

// ---------------------------------------------------------------------------
// Structural extractor
// ---------------------------------------------------------------------------

struct Extractor<'a> {
    src: &'a [u8],
    toks: Vec<Tok>,
    rel: &'a str,
    frags: Vec<MethodFragment>,
    anon_counter: usize,
    id_counts: HashMap<String, usize>,
}

/// Extract every method and constructor with a `{...}` body, including
/// those in nested, local, and anonymous types, plus the file skeleton.
pub fn extract_fragments(
    file: &SourceFile,
) -> Result<(Vec<MethodFragment>, FileSkeleton), SourceError> {
    extract_from_bytes(&file.rel_path, &file.content)
}

pub fn extract_from_bytes(
    rel: &str,
    content: &[u8],
) -> Result<(Vec<MethodFragment>, FileSkeleton), SourceError> {
    let toks = lex(content);
    check_braces(rel, content, &toks)?;
    let mut ex = Extractor {
        src: content,
        toks,
        rel,
        frags: Vec::new(),
        anon_counter: 0,
        id_counts: HashMap::new(),
    };
    let mut owner = Vec::new();
    let mut i = 0;
    ex.parse_members(&mut owner, &mut i, true);
    let mut frags = ex.frags;
    frags.sort_by(|a, b| {
        a.full_span
            .0
            .cmp(&b.full_span.0)
            .then(b.full_span.1.cmp(&a.full_span.1))
    });
    let skeleton = build_skeleton(rel, content, &frags);
    Ok((frags, skeleton))
}

fn check_braces(rel: &str, src: &[u8], toks: &[Tok]) -> Result<(), SourceError> {
    let mut stack = Vec::new();
    for t in toks {
        match t.kind {
            TokKind::Punct(b'{') => stack.push(t.start),
            TokKind::Punct(b'}') => {
                stack.pop().ok_or_else(|| SourceError::UnbalancedBraces {
                    path: rel.to_string(),
                    offset: t.start,
                })?;
            }
            _ => {}
        }
    }
    if let Some(&off) = stack.last() {
        return Err(SourceError::UnbalancedBraces {
            path: rel.to_string(),
            offset: off,
        });
    }
    let _ = src;
    Ok(())
}

impl<'a> Extractor<'a> {
    fn kw(&self, idx: usize) -> Option<&'a str> {
        let t = self.toks.get(idx)?;
        if t.kind == TokKind::Ident {
            std::str::from_utf8(&self.src[t.start..t.end]).ok()
        } else {
            None
        }
    }

    fn is_punct(&self, idx: usize, b: u8) -> bool {
        self.toks.get(idx).map(|t| t.kind) == Some(TokKind::Punct(b))
    }

    fn is_comment(&self, idx: usize) -> bool {
        matches!(
            self.toks.get(idx).map(|t| t.kind),
            Some(TokKind::LineComment | TokKind::BlockComment { .. })
        )
    }

    fn prev_code(&self, mut idx: usize) -> Option<usize> {
        while idx > 0 {
            idx -= 1;
            if !self.is_comment(idx) {
                return Some(idx);
            }
        }
        None
    }

    /// Member loop for a type body (or the file top level). Consumes the
    /// closing `}` unless `at_top` is set, in which case it runs to EOF.
    fn parse_members(&mut self, owner: &mut Vec<String>, i: &mut usize, at_top: bool) {
        loop {
            while self.is_comment(*i) {
                *i += 1;
            }
            if *i >= self.toks.len() {
                return;
            }
            if self.is_punct(*i, b'}') {
                if !at_top {
                    *i += 1;
                }
                if !at_top {
                    return;
                }
                *i += 1;
                continue;
            }
            if self.is_punct(*i, b';') || self.is_punct(*i, b',') {
                *i += 1;
                continue;
            }
            let member_start = *i;
            match self.scan_member_head(i) {
                HeadEnd::Semicolon => {
                    *i += 1; // bodiless declaration or statement-like member
                }
                HeadEnd::Equals => {
                    *i += 1;
                    self.scan_expression(owner, i, true);
                    if self.is_punct(*i, b';') {
                        *i += 1;
                    }
                }
                HeadEnd::Eof => return,
                HeadEnd::Brace => {
                    self.handle_braced_member(owner, i, member_start);
                }
            }
        }
    }

    fn handle_braced_member(&mut self, owner: &mut Vec<String>, i: &mut usize, member_start: usize) {
        let brace_idx = *i;
        // Type declaration?
        if let Some((kw_idx, type_name)) = self.find_type_keyword(member_start, brace_idx) {
            let is_enum = self.kw(kw_idx) == Some("enum");
            owner.push(type_name);
            *i += 1; // consume `{`
            self.parse_type_body(owner, i, is_enum);
            owner.pop();
            return;
        }
        // Initializer block (empty head or `static` only)?
        let head: Vec<usize> = (member_start..brace_idx)
            .filter(|&k| !self.is_comment(k))
            .collect();
        if head.is_empty() || head.iter().all(|&k| self.kw(k) == Some("static")) {
            *i += 1;
            self.parse_block(owner, i);
            return;
        }
        // Annotation member default array value: `int value() default {..};`
        if head.last().and_then(|&k| self.kw(k)) == Some("default")
            && head.len() >= 2
            && self.is_punct(head[head.len() - 2], b')')
        {
            *i += 1;
            self.parse_block(owner, i);
            // trailing `;` handled by the member loop
            return;
        }
        // Method or constructor?
        if let Some(m) = self.match_method(&head, owner) {
            let lbrace_start = self.toks[brace_idx].start;
            *i += 1;
            self.parse_block(owner, i);
            let rbrace_end = self.toks[*i - 1].end;
            self.record_fragment(m, member_start, lbrace_start, rbrace_end, owner);
            return;
        }
        // Unrecognized member with a body: skip it structurally.
        *i += 1;
        self.parse_block(owner, i);
    }

    /// Scan a member head until `{`, `;`, or `=` at paren/bracket depth 0.
    fn scan_member_head(&mut self, i: &mut usize) -> HeadEnd {
        let mut paren = 0i32;
        let mut bracket = 0i32;
        let mut brace = 0i32;
        while *i < self.toks.len() {
            if let TokKind::Punct(b) = self.toks[*i].kind {
                match b {
                    b'(' => paren += 1,
                    b')' => paren -= 1,
                    b'[' => bracket += 1,
                    b']' => bracket -= 1,
                    b'{' if paren == 0 && bracket == 0 && brace == 0 => return HeadEnd::Brace,
                    b'{' => brace += 1,
                    b'}' => brace -= 1,
                    b';' if paren == 0 && bracket == 0 && brace == 0 => return HeadEnd::Semicolon,
                    b'=' if paren == 0 && bracket == 0 && brace == 0 => {
                        // `==`, `<=` etc. cannot occur in a declaration head
                        return HeadEnd::Equals;
                    }
                    _ => {}
                }
            }
            *i += 1;
        }
        HeadEnd::Eof
    }

    fn find_type_keyword(&self, from: usize, to: usize) -> Option<(usize, String)> {
        let mut depth = 0i32;
        for k in from..to {
            match self.toks[k].kind {
                TokKind::Punct(b'(') | TokKind::Punct(b'[') => depth += 1,
                TokKind::Punct(b')') | TokKind::Punct(b']') => depth -= 1,
                TokKind::Ident if depth == 0 => {
                    let word = self.kw(k)?;
                    let is_type_kw = matches!(word, "class" | "interface" | "enum")
                        || (word == "record"
                            && self.next_code(k + 1, to).map(|j| self.kw(j).is_some())
                                == Some(true));
                    if is_type_kw {
                        // `X.class` is a literal, not a declaration
                        if let Some(p) = self.prev_code(k) {
                            if p >= from && self.is_punct(p, b'.') {
                                continue;
                            }
                        }
                        let name_idx = self.next_code(k + 1, to)?;
                        let name = self.kw(name_idx)?.to_string();
                        return Some((k, name));
                    }
                }
                _ => {}
            }
        }
        None
    }

    fn next_code(&self, mut idx: usize, to: usize) -> Option<usize> {
        while idx < to {
            if !self.is_comment(idx) {
                return Some(idx);
            }
            idx += 1;
        }
        None
    }

    /// Recognize `... name ( params ) [throws ...]` at the end of a head.
    fn match_method(&self, head: &[usize], owner: &[String]) -> Option<MethodMatch> {
        let mut j = head.len();
        // Walk back over a throws clause (identifiers, dots, commas).
        while j > 0 {
            let k = head[j - 1];
            match self.toks[k].kind {
                TokKind::Ident | TokKind::Punct(b'.') | TokKind::Punct(b',') => j -= 1,
                _ => break,
            }
        }
        if j == 0 || !self.is_punct(head[j - 1], b')') {
            return None;
        }
        // Match parens backwards.
        let mut depth = 0i32;
        let mut open = None;
        for jj in (0..j).rev() {
            match self.toks[head[jj]].kind {
                TokKind::Punct(b')') => depth += 1,
                TokKind::Punct(b'(') => {
                    depth -= 1;
                    if depth == 0 {
                        open = Some(jj);
                        break;
                    }
                }
                _ => {}
            }
        }
        let open = open?;
        if open == 0 {
            return None;
        }
        let name_pos = open - 1;
        let name_tok = head[name_pos];
        if self.toks[name_tok].kind != TokKind::Ident {
            return None;
        }
        let name = self.kw(name_tok)?.to_string();
        if matches!(
            name.as_str(),
            "if" | "for" | "while" | "switch" | "catch" | "return" | "new" | "super" | "this"
                | "synchronized" | "do" | "try" | "else"
        ) {
            return None;
        }
        let (arity, is_varargs) = self.param_arity(&head[open + 1..j - 1]);
        // Constructor: name equals the enclosing type and nothing but
        // modifiers/annotations precedes it (no return type).
        let kind = if owner.last().map(String::as_str) == Some(name.as_str())
            && self.only_modifiers_before(head, name_pos)
        {
            FragmentKind::Constructor
        } else {
            FragmentKind::Method
        };
        Some(MethodMatch {
            name,
            arity,
            is_varargs,
            kind,
        })
    }

    fn only_modifiers_before(&self, head: &[usize], name_pos: usize) -> bool {
        let mut p = 0;
        while p < name_pos {
            let k = head[p];
            match self.toks[k].kind {
                TokKind::At => {
                    // annotation: @ Name(.Name)* (args)?
                    p += 1;
                    while p < name_pos
                        && matches!(self.toks[head[p]].kind, TokKind::Ident | TokKind::Punct(b'.'))
                    {
                        p += 1;
                    }
                    if p < name_pos && self.is_punct(head[p], b'(') {
                        let mut depth = 0i32;
                        while p < name_pos {
                            match self.toks[head[p]].kind {
                                TokKind::Punct(b'(') => depth += 1,
                                TokKind::Punct(b')') => {
                                    depth -= 1;
                                    if depth == 0 {
                                        p += 1;
                                        break;
                                    }
                                }
                                _ => {}
                            }
                            p += 1;
                        }
                    }
                }
                TokKind::Ident => {
                    let w = self.kw(k).unwrap_or("");
                    if !MODIFIERS.contains(&w) {
                        return false;
                    }
                    p += 1;
                }
                _ => return false,
            }
        }
        true
    }

    /// Count parameters by top-level commas; `<...>` generic arguments are
    /// skipped by angle balancing, falling back to ignoring angles when
    /// they do not balance.
    fn param_arity(&self, params: &[usize]) -> (usize, bool) {
        let code: Vec<usize> = params
            .iter()
            .copied()
            .filter(|&k| !self.is_comment(k))
            .collect();
        if code.is_empty() {
            return (0, false);
        }
        for track_angles in [true, false] {
            let mut paren = 0i32;
            let mut bracket = 0i32;
            let mut angle = 0i32;
            let mut commas = 0usize;
            let mut dots = 0usize;
            let mut varargs = false;
            let mut balanced = true;
            for &k in &code {
                let kind = self.toks[k].kind;
                match kind {
                    TokKind::Punct(b'(') => paren += 1,
                    TokKind::Punct(b')') => paren -= 1,
                    TokKind::Punct(b'[') => bracket += 1,
                    TokKind::Punct(b']') => bracket -= 1,
                    TokKind::Punct(b'<') if track_angles => angle += 1,
                    TokKind::Punct(b'>') if track_angles => {
                        angle -= 1;
                        if angle < 0 {
                            balanced = false;
                            break;
                        }
                    }
                    TokKind::Punct(b',') if paren == 0 && bracket == 0 && angle == 0 => commas += 1,
                    _ => {}
                }
                if kind == TokKind::Punct(b'.') {
                    dots += 1;
                    if dots == 3 && paren == 0 && bracket == 0 {
                        varargs = true;
                    }
                } else {
                    dots = 0;
                }
            }
            if balanced && (!track_angles || angle == 0) {
                return (commas + 1, varargs);
            }
        }
        (1, false)
    }

    fn record_fragment(
        &mut self,
        m: MethodMatch,
        member_start: usize,
        lbrace_start: usize,
        rbrace_end: usize,
        owner: &[String],
    ) {
        let decl_start = self.toks[member_start].start;
        let doc_span = self.doc_span_before(member_start);
        let full_start = doc_span.map(|(s, _)| s).unwrap_or(decl_start);
        let owner_str = owner.join(".");
        let base_id = format!(
            "{}#{}.{}/{}",
            self.rel,
            if owner_str.is_empty() { "<file>" } else { &owner_str },
            m.name,
            m.arity
        );
        let n = self.id_counts.entry(base_id.clone()).or_insert(0);
        *n += 1;
        let id = if *n == 1 {
            base_id
        } else {
            format!("{base_id}@{n}")
        };
        let sig_end = self.src[decl_start..lbrace_start]
            .iter()
            .rposition(|b| !b.is_ascii_whitespace())
            .map(|p| decl_start + p + 1)
            .unwrap_or(lbrace_start);
        self.frags.push(MethodFragment {
            id,
            owner: owner_str,
            name: m.name,
            arity: m.arity,
            kind: m.kind,
            is_varargs: m.is_varargs,
            signature_text: self.src[decl_start..sig_end].to_vec(),
            doc_span,
            body_span: (lbrace_start, rbrace_end),
            full_span: (full_start, rbrace_end),
            token_count: None,
        });
    }

    /// Leading doc: a `/** */` block or contiguous `//` run immediately
    /// above the declaration, with no blank line in between.
    fn doc_span_before(&self, member_start: usize) -> Option<Span> {
        if member_start == 0 {
            return None;
        }
        let prev = &self.toks[member_start - 1];
        let decl_start = self.toks[member_start].start;
        if !gap_is_tight(self.src, prev.end, decl_start) {
            return None;
        }
        match prev.kind {
            TokKind::BlockComment { doc: true } => Some((prev.start, prev.end)),
            TokKind::LineComment => {
                let mut first = member_start - 1;
                while first > 0 {
                    let cand = &self.toks[first - 1];
                    if cand.kind == TokKind::LineComment
                        && gap_is_tight(self.src, cand.end, self.toks[first].start)
                    {
                        first -= 1;
                    } else {
                        break;
                    }
                }
                Some((self.toks[first].start, prev.end))
            }
            _ => None,
        }
    }

    fn parse_type_body(&mut self, owner: &mut Vec<String>, i: &mut usize, is_enum: bool) {
        if is_enum && !self.parse_enum_constants(owner, i) {
            return; // body ended inside the constants section
        }
        self.parse_members(owner, i, false);
    }

    /// Parse enum constants up to the separating `;` (consumed) or the
    /// closing `}`. Returns false when the body is fully consumed.
    fn parse_enum_constants(&mut self, owner: &mut Vec<String>, i: &mut usize) -> bool {
        loop {
            while self.is_comment(*i) || self.is_punct(*i, b',') {
                *i += 1;
            }
            if *i >= self.toks.len() {
                return false;
            }
            if self.is_punct(*i, b'}') {
                *i += 1;
                return false;
            }
            if self.is_punct(*i, b';') {
                *i += 1;
                return true;
            }
            if self.toks[*i].kind == TokKind::At {
                *i += 1; // annotation name + optional args handled below
                continue;
            }
            if self.toks[*i].kind != TokKind::Ident {
                *i += 1;
                continue;
            }
            let name = self.kw(*i).unwrap_or("?").to_string();
            *i += 1;
            if self.is_punct(*i, b'(') {
                *i += 1;
                self.scan_expression(owner, i, false);
                if self.is_punct(*i, b')') {
                    *i += 1;
                }
            }
            if self.is_punct(*i, b'{') {
                *i += 1;
                owner.push(name);
                self.parse_type_body(owner, i, false);
                owner.pop();
            }
        }
    }

    /// Consume a block after its `{`, through the matching `}`, collecting
    /// fragments from local and anonymous types encountered inside.
    fn parse_block(&mut self, owner: &mut Vec<String>, i: &mut usize) {
        loop {
            while self.is_comment(*i) {
                *i += 1;
            }
            if *i >= self.toks.len() {
                return;
            }
            if self.is_punct(*i, b'}') {
                *i += 1;
                return;
            }
            if self.is_punct(*i, b'{') {
                self.enter_brace(owner, i);
                continue;
            }
            // Local type declaration inside a block.
            if let Some(word) = self.kw(*i) {
                if matches!(word, "class" | "interface" | "enum")
                    && self.prev_code(*i).is_none_or(|p| !self.is_punct(p, b'.'))
                    && self
                        .toks
                        .get(*i + 1)
                        .map(|t| t.kind == TokKind::Ident)
                        .unwrap_or(false)
                {
                    // Rewind to the start of the declaration's modifiers so
                    // the nested members get proper spans.
                    let mut start = *i;
                    while start > 0 {
                        match self.kw(start - 1) {
                            Some(w) if MODIFIERS.contains(&w) => start -= 1,
                            _ => break,
                        }
                    }
                    let member_start = start;
                    match self.scan_member_head(i) {
                        HeadEnd::Brace => self.handle_braced_member(owner, i, member_start),
                        HeadEnd::Eof => return,
                        _ => {
                            *i += 1;
                        }
                    }
                    continue;
                }
            }
            *i += 1;
        }
    }

    /// At a `{` inside expression/block context: decide between an
    /// anonymous class body and an ordinary block or initializer.
    fn enter_brace(&mut self, owner: &mut Vec<String>, i: &mut usize) {
        let anon = self.is_anon_class_brace(*i);
        *i += 1;
        if anon {
            self.anon_counter += 1;
            owner.push(format!("anon${}", self.anon_counter));
            self.parse_type_body(owner, i, false);
            owner.pop();
        } else {
            self.parse_block(owner, i);
        }
    }

    /// True when the `{` at token index `idx` follows `new Type(...)`.
    fn is_anon_class_brace(&self, idx: usize) -> bool {
        let Some(mut j) = self.prev_code(idx) else {
            return false;
        };
        if !self.is_punct(j, b')') {
            return false;
        }
        let mut depth = 0i32;
        loop {
            match self.toks[j].kind {
                TokKind::Punct(b')') => depth += 1,
                TokKind::Punct(b'(') => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                _ => {}
            }
            match self.prev_code(j) {
                Some(p) => j = p,
                None => return false,
            }
        }
        // Walk back over the type name: Ident, '.', or generic args.
        let Some(mut j) = self.prev_code(j) else {
            return false;
        };
        loop {
            match self.toks[j].kind {
                TokKind::Punct(b'>') => {
                    let mut angle = 0i32;
                    loop {
                        match self.toks[j].kind {
                            TokKind::Punct(b'>') => angle += 1,
                            TokKind::Punct(b'<') => {
                                angle -= 1;
                                if angle == 0 {
                                    break;
                                }
                            }
                            _ => {}
                        }
                        match self.prev_code(j) {
                            Some(p) => j = p,
                            None => return false,
                        }
                    }
                }
                TokKind::Ident => {
                    if self.kw(j) == Some("new") {
                        return true;
                    }
                }
                TokKind::Punct(b'.') => {}
                _ => return false,
            }
            match self.prev_code(j) {
                Some(p) => j = p,
                None => return false,
            }
        }
    }

    /// Consume expression tokens until `;` (when `to_semicolon`) or until
    /// the enclosing `)` / `}` / `,` boundary, recursing into anonymous
    /// class bodies and plain blocks.
    fn scan_expression(&mut self, owner: &mut Vec<String>, i: &mut usize, to_semicolon: bool) {
        let mut paren = 0i32;
        let mut bracket = 0i32;
        loop {
            while self.is_comment(*i) {
                *i += 1;
            }
            if *i >= self.toks.len() {
                return;
            }
            match self.toks[*i].kind {
                TokKind::Punct(b'(') => paren += 1,
                TokKind::Punct(b')') => {
                    if paren == 0 {
                        return;
                    }
                    paren -= 1;
                }
                TokKind::Punct(b'[') => bracket += 1,
                TokKind::Punct(b']') => bracket -= 1,
                TokKind::Punct(b'{') => {
                    self.enter_brace(owner, i);
                    continue;
                }
                TokKind::Punct(b'}') => return,
                TokKind::Punct(b';') if to_semicolon && paren == 0 && bracket == 0 => return,
                _ => {}
            }
            *i += 1;
        }
    }
}

enum HeadEnd {
    Brace,
    Semicolon,
    Equals,
    Eof,
}

struct MethodMatch {
    name: String,
    arity: usize,
    is_varargs: bool,
    kind: FragmentKind,
}

/// No blank line between `from` and `to` (whitespace with at most one
/// newline).
fn gap_is_tight(src: &[u8], from: usize, to: usize) -> bool {
    if from > to {
        return false;
    }
    let gap = &src[from..to];
    gap.iter().all(|b| b.is_ascii_whitespace())
        && gap.iter().filter(|&&b| b == b'\n').count() <= 1
}

fn build_skeleton(rel: &str, content: &[u8], frags: &[MethodFragment]) -> FileSkeleton {
    let mut segments = Vec::new();
    let mut cursor = 0usize;
    for (idx, f) in frags.iter().enumerate() {
        // Skip fragments contained in an earlier fragment.
        let contained = frags[..idx]
            .iter()
            .any(|o| o.full_span.0 <= f.full_span.0 && f.full_span.1 <= o.full_span.1);
        if contained {
            continue;
        }
        if cursor < f.full_span.0 {
            segments.push(Segment::Literal((cursor, f.full_span.0)));
        }
        segments.push(Segment::Fragment {
            id: f.id.clone(),
            span: f.full_span,
        });
        cursor = f.full_span.1;
    }
    if cursor < content.len() {
        segments.push(Segment::Literal((cursor, content.len())));
    }
    FileSkeleton {
        file: rel.to_string(),
        content: content.to_vec(),
        segments,
    }
}

/// Rebuild the file with each referenced fragment replaced; an empty map
/// reproduces the original bytes exactly.
pub fn splice(
    skeleton: &FileSkeleton,
    replacements: &HashMap<String, Vec<u8>>,
) -> Result<Vec<u8>, SourceError> {
    for key in replacements.keys() {
        let known = skeleton
            .segments
            .iter()
            .any(|s| matches!(s, Segment::Fragment { id, .. } if id == key));
        if !known {
            return Err(SourceError::UnknownFragmentId(key.clone()));
        }
    }
    let mut out = Vec::with_capacity(skeleton.content.len());
    for seg in &skeleton.segments {
        match seg {
            Segment::Literal((s, e)) => out.extend_from_slice(&skeleton.content[*s..*e]),
            Segment::Fragment { id, span } => match replacements.get(id) {
                Some(bytes) => out.extend_from_slice(bytes),
                None => out.extend_from_slice(&skeleton.content[span.0..span.1]),
            },
        }
    }
    Ok(out)
}

/// Fragment bytes for token accounting: the full span minus any contained
/// inner fragments (so nested fragments are not double counted).
pub fn fragment_token_text(frag: &MethodFragment, all: &[MethodFragment], src: &[u8]) -> Vec<u8> {
    let mut holes: Vec<Span> = all
        .iter()
        .filter(|o| {
            o.id != frag.id && frag.full_span.0 <= o.full_span.0 && o.full_span.1 <= frag.full_span.1
        })
        .map(|o| o.full_span)
        .collect();
    holes.sort();
    let mut out = Vec::new();
    let mut cursor = frag.full_span.0;
    for (s, e) in holes {
        if s > cursor {
            out.extend_from_slice(&src[cursor..s]);
        }
        cursor = cursor.max(e);
    }
    if cursor < frag.full_span.1 {
        out.extend_from_slice(&src[cursor..frag.full_span.1]);
    }
    out
}

/// The spans a call-site scanner should look at: the body interior minus
/// contained inner fragments.
pub fn body_scan_ranges(frag: &MethodFragment, all: &[MethodFragment]) -> Vec<Span> {
    let mut holes: Vec<Span> = all
        .iter()
        .filter(|o| {
            o.id != frag.id && frag.full_span.0 <= o.full_span.0 && o.full_span.1 <= frag.full_span.1
        })
        .map(|o| o.full_span)
        .collect();
    holes.sort();
    let mut out = Vec::new();
    let mut cursor = frag.body_span.0;
    for (s, e) in holes {
        if s > cursor {
            out.push((cursor, s));
        }
        cursor = cursor.max(e);
    }
    if cursor < frag.body_span.1 {
        out.push((cursor, frag.body_span.1));
    }
    out
}

/// JSON view of a fragment listing.
#[derive(Debug, Serialize, Deserialize)]
pub struct FragmentJson {
    pub id: String,
    pub owner: String,
    pub name: String,
    pub arity: usize,
    pub kind: FragmentKind,
    pub full_span: [usize; 2],
    pub body_span: [usize; 2],
    pub token_count: Option<usize>,
}

pub fn fragments_to_json(frags: &[MethodFragment]) -> serde_json::Value {
    let rows: Vec<FragmentJson> = frags
        .iter()
        .map(|f| FragmentJson {
            id: f.id.clone(),
            owner: f.owner.clone(),
            name: f.name.clone(),
            arity: f.arity,
            kind: f.kind,
            full_span: [f.full_span.0, f.full_span.1],
            body_span: [f.body_span.0, f.body_span.1],
            token_count: f.token_count,
        })
        .collect();
    serde_json::to_value(rows).expect("fragment serialization")
}
