//! Token counting against a loadable byte-level BPE merge table, with a
//! deterministic lexeme fallback, plus context-budget arithmetic.

use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum TokenizerError {
    #[error("io error reading token model: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed merge file at line {0}")]
    Format(usize),
    #[error("empty token model file")]
    EmptyModel,
}

/// A byte-level BPE merge table. All 256 byte values are implicit rank-0
/// symbols; each merge combines two existing symbols, with priority given
/// by list order (lower index wins).
#[derive(Debug, Clone)]
pub struct TokenModel {
    pub name: String,
    merges: Vec<(Vec<u8>, Vec<u8>)>,
    ranks: HashMap<(Vec<u8>, Vec<u8>), usize>,
    hash: String,
}

impl TokenModel {
    pub fn from_merges(name: &str, merges: Vec<(Vec<u8>, Vec<u8>)>) -> Self {
        let ranks = merges
            .iter()
            .enumerate()
            .map(|(i, (l, r))| ((l.clone(), r.clone()), i))
            .collect();
        let rendered = render_merge_file(name, &merges);
        let hash = hex_sha256(rendered.as_bytes());
        TokenModel {
            name: name.to_string(),
            merges,
            ranks,
            hash,
        }
    }

    pub fn merges(&self) -> &[(Vec<u8>, Vec<u8>)] {
        &self.merges
    }

    /// Hex SHA-256 of the canonical merge-file rendering, recorded in reports.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn vocab_size(&self) -> usize {
        256 + self.merges.len()
    }
}

pub fn hex_sha256(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Window arithmetic for one LLM request: the window is shared by the
/// prompt (input + template overhead) and the generated output.
#[derive(Debug, Clone, Copy)]
pub struct ContextBudget {
    pub window: usize,
    pub reserved_output: usize,
    pub prompt_overhead: usize,
}

impl ContextBudget {
    pub fn new(window: usize, reserved_output: usize, prompt_overhead: usize) -> Self {
        assert!(window > 0, "window must be positive");
        assert!(reserved_output < window, "reserved_output must be < window");
        ContextBudget {
            window,
            reserved_output,
            prompt_overhead,
        }
    }

    /// Raw window with no overhead or output reservation; used for the
    /// "over budget" corpus statistics.
    pub fn raw(window: usize) -> Self {
        Self::new(window, 0, 0)
    }
}

/// Inclusive boundary: an input exactly filling the window fits.
pub fn fits(budget: &ContextBudget, input_tokens: usize) -> bool {
    input_tokens + budget.prompt_overhead + budget.reserved_output <= budget.window
}

const DEFAULT_WINDOW: usize = 2048;

impl Default for ContextBudget {
    fn default() -> Self {
        ContextBudget::raw(DEFAULT_WINDOW)
    }
}

/// Parse a merge-table file. Line 1 is `bpe-merges v1 <name>`; every
/// following line is `LEFT RIGHT` with `\xNN` escapes for space,
/// backslash, and non-printable bytes.
pub fn load_token_model(path: &Path) -> Result<TokenModel, TokenizerError> {
    let text = std::fs::read_to_string(path)?;
    parse_token_model(&text)
}

pub fn parse_token_model(text: &str) -> Result<TokenModel, TokenizerError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(TokenizerError::EmptyModel)?;
    let name = header
        .strip_prefix("bpe-merges v1 ")
        .ok_or(TokenizerError::Format(1))?
        .trim();
    if name.is_empty() {
        return Err(TokenizerError::Format(1));
    }
    let mut merges = Vec::new();
    let mut known: HashMap<Vec<u8>, usize> = HashMap::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let (left, right) = split_merge_line(line).ok_or(TokenizerError::Format(lineno))?;
        let left = unescape_symbol(&left).ok_or(TokenizerError::Format(lineno))?;
        let right = unescape_symbol(&right).ok_or(TokenizerError::Format(lineno))?;
        // Each side must be a single byte or the product of an earlier merge.
        for side in [&left, &right] {
            if side.len() > 1 && !known.contains_key(side.as_slice()) {
                return Err(TokenizerError::Format(lineno));
            }
            if side.is_empty() {
                return Err(TokenizerError::Format(lineno));
            }
        }
        let mut merged = left.clone();
        merged.extend_from_slice(&right);
        known.entry(merged).or_insert(merges.len());
        merges.push((left, right));
    }
    Ok(TokenModel::from_merges(name, merges))
}

/// Split an escaped merge line on its separating space (escaped spaces are
/// `\x20`, so the first raw space is the separator).
fn split_merge_line(line: &str) -> Option<(String, String)> {
    let pos = line.find(' ')?;
    let (l, r) = line.split_at(pos);
    let r = &r[1..];
    if l.is_empty() || r.is_empty() || r.contains(' ') {
        return None;
    }
    Some((l.to_string(), r.to_string()))
}

fn unescape_symbol(s: &str) -> Option<Vec<u8>> {
    let mut out = Vec::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if chars.next()? != 'x' {
                return None;
            }
            let hi = chars.next()?.to_digit(16)?;
            let lo = chars.next()?.to_digit(16)?;
            out.push((hi * 16 + lo) as u8);
        } else {
            let mut buf = [0u8; 4];
            out.extend_from_slice(c.encode_utf8(&mut buf).as_bytes());
        }
    }
    Some(out)
}

pub fn escape_symbol(sym: &[u8]) -> String {
    let mut out = String::new();
    for &b in sym {
        if b > 0x20 && b < 0x7f && b != b'\\' {
            out.push(b as char);
        } else {
            out.push_str(&format!("\\x{b:02x}"));
        }
    }
    out
}

/// Render a merge table in the on-disk file format (LF line endings).
pub fn render_merge_file(name: &str, merges: &[(Vec<u8>, Vec<u8>)]) -> String {
    let mut out = format!("bpe-merges v1 {name}\n");
    for (l, r) in merges {
        out.push_str(&escape_symbol(l));
        out.push(' ');
        out.push_str(&escape_symbol(r));
        out.push('\n');
    }
    out
}

/// Classic BPE over the whole text as one unit: repeatedly take the
/// lowest-rank adjacent pair and merge all its non-overlapping occurrences
/// left to right, until no pair has a rank. Returns the symbol count.
pub fn count_tokens(model: &TokenModel, text: &[u8]) -> usize {
    bpe_symbols(model, text).len()
}

/// The symbol spans after running BPE to fixpoint.
pub fn bpe_symbols(model: &TokenModel, text: &[u8]) -> Vec<(usize, usize)> {
    let mut spans: Vec<(usize, usize)> = (0..text.len()).map(|i| (i, i + 1)).collect();
    if model.merges.is_empty() {
        return spans;
    }
    loop {
        let mut best: Option<usize> = None;
        for w in spans.windows(2) {
            let pair = (text[w[0].0..w[0].1].to_vec(), text[w[1].0..w[1].1].to_vec());
            if let Some(&rank) = model.ranks.get(&pair) {
                if best.is_none_or(|b| rank < b) {
                    best = Some(rank);
                }
            }
        }
        let Some(best) = best else { break };
        let (left, right) = &model.merges[best];
        let mut merged = Vec::with_capacity(spans.len());
        let mut i = 0;
        while i < spans.len() {
            if i + 1 < spans.len()
                && &text[spans[i].0..spans[i].1] == left.as_slice()
                && &text[spans[i + 1].0..spans[i + 1].1] == right.as_slice()
            {
                merged.push((spans[i].0, spans[i + 1].1));
                i += 2;
            } else {
                merged.push(spans[i]);
                i += 1;
            }
        }
        spans = merged;
    }
    spans
}

fn is_ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'$'
}

/// Deterministic lexeme-based count used when no merge table is supplied:
/// identifier runs cost ceil(len/8) tokens, every other non-whitespace
/// byte costs 1, whitespace costs 0.
pub fn count_tokens_fallback(text: &[u8]) -> usize {
    let mut count = 0usize;
    let mut i = 0;
    while i < text.len() {
        let b = text[i];
        if is_ident_byte(b) {
            let start = i;
            while i < text.len() && is_ident_byte(text[i]) {
                i += 1;
            }
            count += (i - start).div_ceil(8);
        } else {
            if !b.is_ascii_whitespace() {
                count += 1;
            }
            i += 1;
        }
    }
    count
}

/// The active token counter: a loaded merge table or the lexeme fallback.
#[derive(Debug, Clone)]
pub enum Tokenizer {
    Fallback,
    Model(TokenModel),
}

impl Tokenizer {
    pub fn count(&self, text: &[u8]) -> usize {
        match self {
            Tokenizer::Fallback => count_tokens_fallback(text),
            Tokenizer::Model(m) => count_tokens(m, text),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Tokenizer::Fallback => "lexeme-fallback",
            Tokenizer::Model(m) => &m.name,
        }
    }

    pub fn hash(&self) -> &str {
        match self {
            Tokenizer::Fallback => "fallback",
            Tokenizer::Model(m) => m.hash(),
        }
    }
}

/// Object-safe counting interface so callers can layer a cache on top.
pub trait CountTokens: Sync {
    fn count(&self, text: &[u8]) -> usize;
    fn tokenizer_name(&self) -> &str;
    fn tokenizer_hash(&self) -> &str;
}

impl CountTokens for Tokenizer {
    fn count(&self, text: &[u8]) -> usize {
        Tokenizer::count(self, text)
    }
    fn tokenizer_name(&self) -> &str {
        self.name()
    }
    fn tokenizer_hash(&self) -> &str {
        self.hash()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(merges: &[(&[u8], &[u8])]) -> TokenModel {
        TokenModel::from_merges(
            "test",
            merges
                .iter()
                .map(|(l, r)| (l.to_vec(), r.to_vec()))
                .collect(),
        )
    }

    #[test]
    fn empty_input_is_zero_tokens() {
        let m = model(&[(b"h", b"e")]);
        assert_eq!(count_tokens(&m, b""), 0);
        assert_eq!(count_tokens_fallback(b""), 0);
    }

    #[test]
    fn hello_merges_to_three_symbols() {
        let m = model(&[(b"h", b"e"), (b"he", b"l")]);
        assert_eq!(count_tokens(&m, b"hello"), 3); // hel, l, o
    }

    #[test]
    fn zero_merge_model_counts_bytes() {
        let m = model(&[]);
        assert_eq!(count_tokens(&m, b"abc def"), 7);
    }

    #[test]
    fn fallback_counts_lexemes() {
        assert_eq!(count_tokens_fallback(b"int x=1;"), 5);
        assert_eq!(count_tokens_fallback(b"abcdefghi"), 2); // ceil(9/8)
        assert_eq!(count_tokens_fallback(b"abcdefgh"), 1);
        assert_eq!(count_tokens_fallback(b"  \t\n"), 0);
    }

    #[test]
    fn fits_boundary_is_inclusive() {
        let b = ContextBudget::raw(2048);
        assert!(fits(&b, 2048));
        assert!(!fits(&b, 2049));
        let b = ContextBudget::new(2048, 256, 100);
        assert!(!fits(&b, 1693)); // 1693+100+256 = 2049
        assert!(fits(&b, 1692));
    }

    #[test]
    fn load_round_trips_merges() {
        let text = "bpe-merges v1 demo\nh e\nhe l\n";
        let m = parse_token_model(text).unwrap();
        assert_eq!(m.name, "demo");
        assert_eq!(m.merges().len(), 2);
        assert_eq!(m.merges()[0], (b"h".to_vec(), b"e".to_vec()));
        assert_eq!(render_merge_file(&m.name, m.merges()), text);
    }

    #[test]
    fn header_only_model_is_valid() {
        let m = parse_token_model("bpe-merges v1 bytes\n").unwrap();
        assert_eq!(m.merges().len(), 0);
        assert_eq!(count_tokens(&m, b"xyz"), 3);
    }

    #[test]
    fn missing_header_is_format_error_line_1() {
        match parse_token_model("h e\n") {
            Err(TokenizerError::Format(1)) => {}
            other => panic!("expected Format(1), got {other:?}"),
        }
    }

    #[test]
    fn underivable_symbol_is_format_error() {
        // "ab" was never produced by an earlier merge.
        match parse_token_model("bpe-merges v1 t\nab c\n") {
            Err(TokenizerError::Format(2)) => {}
            other => panic!("expected Format(2), got {other:?}"),
        }
    }

    #[test]
    fn escaped_bytes_round_trip() {
        let sym = vec![b' ', b'\\', 0x01, b'A'];
        let escaped = escape_symbol(&sym);
        assert_eq!(escaped, "\\x20\\x5c\\x01A");
        assert_eq!(unescape_symbol(&escaped).unwrap(), sym);
    }
}
