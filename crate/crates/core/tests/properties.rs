//! Property-based invariants for the tokenizer, parser, and metrics.

mod common;

use codefrag::metrics;
use codefrag::source_model;
use codefrag::tokenizer::{self, count_tokens, count_tokens_fallback, parse_token_model, render_merge_file};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    /// Appending bytes never lowers the fallback count.
    #[test]
    fn fallback_is_monotonic(a in proptest::collection::vec(any::<u8>(), 0..200),
                             b in proptest::collection::vec(any::<u8>(), 0..200)) {
        let mut ab = a.clone();
        ab.extend_from_slice(&b);
        prop_assert!(count_tokens_fallback(&ab) >= count_tokens_fallback(&a));
    }

    /// Concatenation can merge at most the boundary run: subadditive.
    #[test]
    fn fallback_is_subadditive(a in proptest::collection::vec(any::<u8>(), 0..200),
                               b in proptest::collection::vec(any::<u8>(), 0..200)) {
        let mut ab = a.clone();
        ab.extend_from_slice(&b);
        prop_assert!(
            count_tokens_fallback(&ab) <= count_tokens_fallback(&a) + count_tokens_fallback(&b)
        );
    }

    /// Merging never increases the symbol count past the byte count, and
    /// every byte lands in exactly one token.
    #[test]
    fn bpe_count_bounded_by_bytes(seed in any::<u64>(),
                                  text in proptest::collection::vec(any::<u8>(), 0..200)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = common::gen_model(&mut rng);
        let n = count_tokens(&model, &text);
        prop_assert!(n <= text.len());
        prop_assert!(text.is_empty() || n >= 1);
    }

    /// A rendered merge table parses back to the same merges and hash.
    #[test]
    fn merge_file_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = common::gen_model(&mut rng);
        let rendered = render_merge_file("fuzz", model.merges());
        let reparsed = parse_token_model(&rendered).unwrap();
        prop_assert_eq!(model.merges(), reparsed.merges());
        prop_assert_eq!(model.hash(), reparsed.hash());
    }

    /// String literals are opaque: arbitrary brace garbage inside one
    /// changes neither the fragment count nor parsing success.
    #[test]
    fn string_contents_are_opaque(garbage in "[ -!#-\\[\\]-~]{0,40}") {
        let source = format!(
            "class A {{\n    void f() {{\n        String s = \"{garbage}\";\n    }}\n}}\n"
        );
        let (frags, skeleton) =
            source_model::extract_from_bytes("A.java", source.as_bytes()).unwrap();
        prop_assert_eq!(frags.len(), 1);
        prop_assert_eq!(&frags[0].name, "f");
        let rebuilt =
            source_model::splice(&skeleton, &std::collections::HashMap::new()).unwrap();
        prop_assert_eq!(rebuilt, source.into_bytes());
    }

    /// Reduction stays a percentage for any sane before/after pair.
    #[test]
    fn reduction_ratio_is_a_percentage(before in 0.0001f64..100.0, frac in 0.0f64..=1.0) {
        let after = before * frac;
        let r = metrics::reduction_ratio(before, after).unwrap();
        prop_assert!((0.0..=100.0).contains(&r));
    }

    /// Byte-level symbols mean tokenization is defined for every input.
    #[test]
    fn fallback_and_bpe_never_panic(text in proptest::collection::vec(any::<u8>(), 0..300)) {
        let model = tokenizer::TokenModel::from_merges("empty", Vec::new());
        prop_assert_eq!(count_tokens(&model, &text), text.len());
        let _ = count_tokens_fallback(&text);
    }
}
