//! Corpus analysis and translation orchestration for LLM context budgets:
//! decompose source files into method fragments, count tokens against a
//! context window, build a static call graph, and drive bottom-up,
//! budget-aware translation through a pluggable backend.

pub mod callgraph;
pub mod cli;
pub mod metrics;
pub mod source_model;
pub mod tokenizer;
pub mod translate;
