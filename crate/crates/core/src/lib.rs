//! Core library for a graph-to-text benchmark toolkit.
//!
//! The pipeline: generate random graphs ([`generate`]), describe them in one
//! of nine prose styles ([`encoding`]), pose reasoning tasks with golden
//! answers ([`task`]), assemble prompts under several prompting methods
//! ([`prompt`]), submit them to a text-completion endpoint ([`client`]), and
//! score and aggregate the responses ([`harness`]).

#![forbid(unsafe_code)]

pub mod client;
pub mod encoding;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod prompt;
pub mod task;

pub use client::{ClientError, Completion, CompletionRequest, TextCompletion};
pub use encoding::{encode_graph, encode_graph_multirel, list_schemes, NodeNamer, SchemeKind};
pub use generate::{
    build_corpus, generate, CorpusConfig, CorpusEntry, GeneratorKind, GeneratorParams,
    GeneratorSpec, GraphCorpus,
};
pub use graph::{Answer, Graph, GraphError, NodeId};
pub use harness::{
    aggregate, build_matrix, build_prompts, render_csv, render_table, run_cases, Accuracy,
    AggregateReport, EvalCase, EvalRecord, MatrixConfig, PromptSet, RunOutcome,
};
pub use prompt::{build_prompt, Exemplar, PromptBundle, PromptMethod};
