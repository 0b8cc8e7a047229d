//! The seven graph reasoning tasks: query sampling, golden answers, question
//! rendering in two styles, free-text answer parsing, and scoring.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{node_label, EncodingError, SchemeKind};
use crate::graph::{Answer, Graph, GraphError, NodeId};

#[derive(Debug, Error, PartialEq)]
pub enum TaskError {
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("{0}")]
    Encoding(#[from] EncodingError),
    #[error("{kind} needs at least {needed} nodes, graph has {n}")]
    GraphTooSmall { kind: TaskKind, needed: usize, n: usize },
    #[error("the {0} scheme has no application-style questions")]
    ApplicationUnsupported(SchemeKind),
    #[error("{kind} expects {expected} params")]
    ParamsMismatch { kind: TaskKind, expected: &'static str },
}

/// The seven tasks, in registry order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    EdgeExistence,
    NodeDegree,
    NodeCount,
    EdgeCount,
    ConnectedNodes,
    CycleCheck,
    DisconnectedNodes,
}

impl TaskKind {
    pub const ALL: [TaskKind; 7] = [
        TaskKind::EdgeExistence,
        TaskKind::NodeDegree,
        TaskKind::NodeCount,
        TaskKind::EdgeCount,
        TaskKind::ConnectedNodes,
        TaskKind::CycleCheck,
        TaskKind::DisconnectedNodes,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::EdgeExistence => "edge_existence",
            TaskKind::NodeDegree => "node_degree",
            TaskKind::NodeCount => "node_count",
            TaskKind::EdgeCount => "edge_count",
            TaskKind::ConnectedNodes => "connected_nodes",
            TaskKind::CycleCheck => "cycle_check",
            TaskKind::DisconnectedNodes => "disconnected_nodes",
        }
    }

    pub fn parse(s: &str) -> Option<TaskKind> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

/// Recovers the task kind from an instance id of the form `{kind}-{graph_id}`.
pub fn instance_kind(id: &str) -> Option<TaskKind> {
    TaskKind::parse(id.split('-').next()?)
}

impl std::fmt::Display for TaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether questions speak of nodes and edges or of the scheme's social world.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionStyle {
    Graph,
    Application,
}

impl QuestionStyle {
    pub fn as_str(self) -> &'static str {
        match self {
            QuestionStyle::Graph => "graph",
            QuestionStyle::Application => "application",
        }
    }

    pub fn parse(s: &str) -> Option<QuestionStyle> {
        match s {
            "graph" => Some(QuestionStyle::Graph),
            "application" => Some(QuestionStyle::Application),
            _ => None,
        }
    }
}

impl std::fmt::Display for QuestionStyle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Query parameters: nothing, one node, or an ordered node pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub enum TaskParams {
    None,
    Node { v: NodeId },
    Pair { u: NodeId, v: NodeId },
}

impl TaskParams {
    /// The node a set-valued question asks about, if any.
    pub fn query_node(&self) -> Option<NodeId> {
        match *self {
            TaskParams::None => None,
            TaskParams::Node { v } => Some(v),
            TaskParams::Pair { v, .. } => Some(v),
        }
    }
}

#[derive(Default, Serialize, Deserialize)]
struct ParamsRepr {
    #[serde(skip_serializing_if = "Option::is_none")]
    u: Option<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<NodeId>,
}

impl From<TaskParams> for ParamsRepr {
    fn from(params: TaskParams) -> ParamsRepr {
        match params {
            TaskParams::None => ParamsRepr::default(),
            TaskParams::Node { v } => ParamsRepr { u: None, v: Some(v) },
            TaskParams::Pair { u, v } => ParamsRepr { u: Some(u), v: Some(v) },
        }
    }
}

impl TryFrom<ParamsRepr> for TaskParams {
    type Error = String;

    fn try_from(repr: ParamsRepr) -> Result<TaskParams, String> {
        match (repr.u, repr.v) {
            (None, None) => Ok(TaskParams::None),
            (None, Some(v)) => Ok(TaskParams::Node { v }),
            (Some(u), Some(v)) => Ok(TaskParams::Pair { u, v }),
            (Some(_), None) => Err("params with u but no v".into()),
        }
    }
}

/// One posed question with its ground-truth answer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub id: String,
    pub graph_id: String,
    pub kind: TaskKind,
    pub params: TaskParams,
    pub style: QuestionStyle,
    pub golden: Answer,
}

/// Samples query parameters for `kind` on `g` and fills the golden answer
/// from the graph oracles. Edge-existence endpoints are drawn independently
/// and uniformly over all nodes.
pub fn sample_instance(
    kind: TaskKind,
    graph_id: &str,
    g: &Graph,
    style: QuestionStyle,
    seed: u64,
) -> Result<TaskInstance, TaskError> {
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (params, golden) = match kind {
        TaskKind::EdgeExistence => {
            if n < 2 {
                return Err(TaskError::GraphTooSmall { kind, needed: 2, n });
            }
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            (TaskParams::Pair { u, v }, Answer::Bool(g.has_edge(u, v)))
        }
        TaskKind::NodeDegree => {
            let v = rng.gen_range(0..n);
            (TaskParams::Node { v }, Answer::Count(g.degree(v)? as u64))
        }
        TaskKind::NodeCount => (TaskParams::None, Answer::Count(n as u64)),
        TaskKind::EdgeCount => (TaskParams::None, Answer::Count(g.edge_count() as u64)),
        TaskKind::ConnectedNodes => {
            let v = rng.gen_range(0..n);
            let set: BTreeSet<NodeId> = g.neighbors(v)?.into_iter().collect();
            (TaskParams::Node { v }, Answer::NodeSet(set))
        }
        TaskKind::CycleCheck => (TaskParams::None, Answer::Bool(g.has_cycle())),
        TaskKind::DisconnectedNodes => {
            let v = rng.gen_range(0..n);
            let set: BTreeSet<NodeId> = g.non_neighbors(v)?.into_iter().collect();
            (TaskParams::Node { v }, Answer::NodeSet(set))
        }
    };
    Ok(TaskInstance {
        id: format!("{kind}-{graph_id}"),
        graph_id: graph_id.to_string(),
        kind,
        params,
        style,
        golden,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum QuestionFamily {
    Graph,
    Friend,
    Coauthor,
    Connection,
}

impl QuestionFamily {
    fn parse(s: &str) -> Option<QuestionFamily> {
        match s {
            "graph" => Some(QuestionFamily::Graph),
            "friend" => Some(QuestionFamily::Friend),
            "coauthor" => Some(QuestionFamily::Coauthor),
            "connection" => Some(QuestionFamily::Connection),
            _ => None,
        }
    }
}

/// The application-style question family a scheme's vocabulary supports.
fn application_family(scheme: SchemeKind) -> Option<QuestionFamily> {
    match scheme {
        SchemeKind::Friendship | SchemeKind::Sp | SchemeKind::Got => Some(QuestionFamily::Friend),
        SchemeKind::Coauthorship => Some(QuestionFamily::Coauthor),
        SchemeKind::SocialNetwork | SchemeKind::Politician => Some(QuestionFamily::Connection),
        SchemeKind::Adjacency | SchemeKind::Incident | SchemeKind::Expert => None,
    }
}

fn question_templates() -> &'static HashMap<(QuestionFamily, TaskKind), &'static str> {
    static CELL: OnceLock<HashMap<(QuestionFamily, TaskKind), &'static str>> = OnceLock::new();
    CELL.get_or_init(|| {
        include_str!("../data/questions.txt")
            .lines()
            .filter(|l| !l.is_empty())
            .map(|line| {
                let mut parts = line.splitn(3, '|');
                let family = QuestionFamily::parse(parts.next().unwrap()).expect("family");
                let kind = TaskKind::parse(parts.next().unwrap()).expect("task kind");
                ((family, kind), parts.next().expect("template"))
            })
            .collect()
    })
}

/// Renders the question for `(kind, params)` in the requested style, naming
/// nodes through the scheme's vocabulary.
pub fn question_text(
    kind: TaskKind,
    params: TaskParams,
    style: QuestionStyle,
    scheme: SchemeKind,
) -> Result<String, TaskError> {
    let family = match style {
        QuestionStyle::Graph => QuestionFamily::Graph,
        QuestionStyle::Application => {
            application_family(scheme).ok_or(TaskError::ApplicationUnsupported(scheme))?
        }
    };
    let template = question_templates()[&(family, kind)];
    let mut text = template.to_string();
    match params {
        TaskParams::None => {}
        TaskParams::Node { v } => {
            text = text.replace("{v}", &node_label(scheme, v)?);
        }
        TaskParams::Pair { u, v } => {
            text = text.replace("{u}", &node_label(scheme, u)?);
            text = text.replace("{v}", &node_label(scheme, v)?);
        }
    }
    if text.contains("{u}") || text.contains("{v}") {
        let expected = if template.contains("{u}") { "a node pair" } else { "a node" };
        return Err(TaskError::ParamsMismatch { kind, expected });
    }
    Ok(text)
}

/// Renders a golden answer the way exemplars state it.
pub fn render_answer(answer: &Answer, scheme: SchemeKind) -> Result<String, TaskError> {
    Ok(match answer {
        Answer::Bool(true) => "Yes.".to_string(),
        Answer::Bool(false) => "No.".to_string(),
        Answer::Count(k) => format!("The answer is {k}."),
        Answer::NodeSet(set) if set.is_empty() => "The answer is: none.".to_string(),
        Answer::NodeSet(set) => {
            let labels: Result<Vec<String>, TaskError> =
                set.iter().map(|&v| Ok(node_label(scheme, v)?)).collect();
            format!("The answer is: {}.", labels?.join(", "))
        }
    })
}

/// Knobs for answer extraction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Also accept spelled-out counts ("six"); off by default so every parsed
    /// count is visible verbatim in the response.
    pub number_words: bool,
}

/// What the parser needs to know about the case being scored.
#[derive(Clone, Copy, Debug)]
pub struct ParseContext {
    pub scheme: SchemeKind,
    pub n: usize,
    /// Node the question asks about; never counted as part of a set answer.
    pub query_node: Option<NodeId>,
    pub options: ParseOptions,
}

impl ParseContext {
    pub fn for_instance(instance: &TaskInstance, n: usize, options: ParseOptions, scheme: SchemeKind) -> ParseContext {
        ParseContext { scheme, n, query_node: instance.params.query_node(), options }
    }
}

fn tokens(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| !c.is_ascii_alphanumeric()).filter(|t| !t.is_empty())
}

fn parse_bool(response: &str) -> Option<bool> {
    let mut last = None;
    for token in tokens(response) {
        if token.eq_ignore_ascii_case("yes") {
            last = Some(true);
        } else if token.eq_ignore_ascii_case("no") {
            last = Some(false);
        }
    }
    last
}

fn number_word(token: &str) -> Option<u64> {
    const WORDS: [&str; 21] = [
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
        "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
        "nineteen", "twenty",
    ];
    WORDS
        .iter()
        .position(|w| token.eq_ignore_ascii_case(w))
        .map(|i| i as u64)
}

fn parse_count(response: &str, options: ParseOptions) -> Option<u64> {
    let mut best: Option<(usize, u64)> = None;
    let bytes = response.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if let Ok(value) = response[start..i].parse::<u64>() {
                best = Some((start, value));
            }
        } else {
            i += 1;
        }
    }
    if options.number_words {
        let mut consider = |start: usize, token: &str| {
            if let Some(value) = number_word(token) {
                if best.is_none_or(|(s, _)| start >= s) {
                    best = Some((start, value));
                }
            }
        };
        let mut start = None;
        for (i, c) in response.char_indices() {
            if c.is_ascii_alphanumeric() {
                start.get_or_insert(i);
            } else if let Some(s) = start.take() {
                consider(s, &response[s..i]);
            }
        }
        if let Some(s) = start {
            consider(s, &response[s..]);
        }
    }
    best.map(|(_, v)| v)
}

fn rfind_ci(haystack: &str, needle: &str) -> Option<usize> {
    let h = haystack.as_bytes();
    let n = needle.as_bytes();
    if n.is_empty() || n.len() > h.len() {
        return None;
    }
    (0..=h.len() - n.len()).rev().find(|&i| h[i..i + n.len()].eq_ignore_ascii_case(n))
}

/// The part of the response that states the answer: after the last "A:" or
/// "answer is" marker, or the whole text when neither appears.
fn answer_region(response: &str) -> &str {
    let after_a = response.rfind("A:").map(|p| p + 2);
    let after_answer_is = rfind_ci(response, "answer is").map(|p| p + "answer is".len());
    match after_a.into_iter().chain(after_answer_is).max() {
        Some(start) => &response[start..],
        None => response,
    }
}

fn states_empty_set(region: &str) -> bool {
    if region.contains("[]") {
        return true;
    }
    let mut previous = "";
    for token in tokens(region) {
        if token.eq_ignore_ascii_case("none") {
            return true;
        }
        if previous.eq_ignore_ascii_case("no") && token.eq_ignore_ascii_case("nodes") {
            return true;
        }
        previous = token;
    }
    false
}

fn parse_set(response: &str, ctx: &ParseContext) -> Option<BTreeSet<NodeId>> {
    let region = answer_region(response);
    let namer = ctx.scheme.namer();
    let mut ids = BTreeSet::new();
    for token in tokens(region) {
        if let Some(v) = namer.lookup(token) {
            if v < ctx.n && ctx.query_node != Some(v) {
                ids.insert(v);
            }
        }
    }
    if !ids.is_empty() {
        Some(ids)
    } else if states_empty_set(region) {
        Some(BTreeSet::new())
    } else {
        None
    }
}

/// Extracts an answer of the task's shape from a free-text response.
/// `None` means the response is unparseable and scores zero.
pub fn parse_answer(kind: TaskKind, response: &str, ctx: &ParseContext) -> Option<Answer> {
    match kind {
        TaskKind::EdgeExistence | TaskKind::CycleCheck => {
            parse_bool(response).map(Answer::Bool)
        }
        TaskKind::NodeDegree | TaskKind::NodeCount | TaskKind::EdgeCount => {
            parse_count(response, ctx.options).map(Answer::Count)
        }
        TaskKind::ConnectedNodes | TaskKind::DisconnectedNodes => {
            parse_set(response, ctx).map(Answer::NodeSet)
        }
    }
}

/// Exact-match scoring; set answers compare order-free.
pub fn score(parsed: Option<&Answer>, golden: &Answer) -> bool {
    parsed == Some(golden)
}

/// The most frequent golden answer and how many instances it matches.
/// Frequency ties break toward the lexicographically smallest serialized
/// answer so the baseline is deterministic.
pub fn majority_baseline(goldens: &[Answer]) -> Option<(Answer, usize)> {
    let mut counts: HashMap<&Answer, usize> = HashMap::new();
    for golden in goldens {
        *counts.entry(golden).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by(|(a, ca), (b, cb)| {
            ca.cmp(cb).then_with(|| {
                let sa = serde_json::to_string(a).unwrap();
                let sb = serde_json::to_string(b).unwrap();
                sb.cmp(&sa)
            })
        })
        .map(|(answer, count)| (answer.clone(), count))
}

/// Serializes instances as JSON lines with a fixed key order.
pub fn write_instances(
    instances: &[TaskInstance],
    out: &mut impl std::io::Write,
) -> std::io::Result<()> {
    for instance in instances {
        serde_json::to_writer(&mut *out, instance)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads instances back from JSON lines.
pub fn read_instances(input: impl std::io::BufRead) -> std::io::Result<Vec<TaskInstance>> {
    let mut instances = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        instances.push(serde_json::from_str(&line)?);
    }
    Ok(instances)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::example_graph;
    use proptest::prelude::*;

    fn ctx(scheme: SchemeKind, n: usize, query_node: Option<NodeId>) -> ParseContext {
        ParseContext { scheme, n, query_node, options: ParseOptions::default() }
    }

    #[test]
    fn goldens_match_graph_oracles() {
        let g = example_graph();
        for kind in TaskKind::ALL {
            let instance = sample_instance(kind, "g", &g, QuestionStyle::Graph, 11).unwrap();
            let expected = match (kind, instance.params) {
                (TaskKind::EdgeExistence, TaskParams::Pair { u, v }) => {
                    Answer::Bool(g.has_edge(u, v))
                }
                (TaskKind::NodeDegree, TaskParams::Node { v }) => {
                    Answer::Count(g.degree(v).unwrap() as u64)
                }
                (TaskKind::NodeCount, TaskParams::None) => Answer::Count(9),
                (TaskKind::EdgeCount, TaskParams::None) => Answer::Count(11),
                (TaskKind::ConnectedNodes, TaskParams::Node { v }) => {
                    Answer::NodeSet(g.neighbors(v).unwrap().into_iter().collect())
                }
                (TaskKind::CycleCheck, TaskParams::None) => Answer::Bool(true),
                (TaskKind::DisconnectedNodes, TaskParams::Node { v }) => {
                    Answer::NodeSet(g.non_neighbors(v).unwrap().into_iter().collect())
                }
                other => panic!("unexpected params {other:?}"),
            };
            assert_eq!(instance.golden, expected, "{kind}");
            assert_eq!(instance.id, format!("{kind}-g"));
            assert_eq!(
                instance,
                sample_instance(kind, "g", &g, QuestionStyle::Graph, 11).unwrap()
            );
        }
    }

    #[test]
    fn edge_existence_needs_two_nodes() {
        let g = Graph::new(1, []).unwrap();
        assert_eq!(
            sample_instance(TaskKind::EdgeExistence, "g", &g, QuestionStyle::Graph, 0).unwrap_err(),
            TaskError::GraphTooSmall { kind: TaskKind::EdgeExistence, needed: 2, n: 1 }
        );
    }

    #[test]
    fn question_wording_by_style() {
        assert_eq!(
            question_text(
                TaskKind::NodeDegree,
                TaskParams::Node { v: 2 },
                QuestionStyle::Graph,
                SchemeKind::Adjacency
            )
            .unwrap(),
            "What is the degree of node 2?"
        );
        assert_eq!(
            question_text(
                TaskKind::NodeDegree,
                TaskParams::Node { v: 0 },
                QuestionStyle::Application,
                SchemeKind::Friendship
            )
            .unwrap(),
            "How many friends does James have?"
        );
        assert_eq!(
            question_text(
                TaskKind::EdgeCount,
                TaskParams::None,
                QuestionStyle::Application,
                SchemeKind::Friendship
            )
            .unwrap(),
            "How many friendships are mentioned?"
        );
        assert_eq!(
            question_text(
                TaskKind::EdgeExistence,
                TaskParams::Pair { u: 0, v: 2 },
                QuestionStyle::Application,
                SchemeKind::Coauthorship
            )
            .unwrap(),
            "Did James and John write a paper together?"
        );
        assert_eq!(
            question_text(
                TaskKind::CycleCheck,
                TaskParams::None,
                QuestionStyle::Application,
                SchemeKind::Politician
            )
            .unwrap(),
            "Is there a cycle of connections?"
        );
    }

    #[test]
    fn application_style_rejects_symbolic_schemes() {
        for scheme in [SchemeKind::Adjacency, SchemeKind::Incident, SchemeKind::Expert] {
            assert_eq!(
                question_text(
                    TaskKind::CycleCheck,
                    TaskParams::None,
                    QuestionStyle::Application,
                    scheme
                )
                .unwrap_err(),
                TaskError::ApplicationUnsupported(scheme)
            );
        }
    }

    #[test]
    fn missing_params_are_rejected() {
        assert_eq!(
            question_text(
                TaskKind::NodeDegree,
                TaskParams::None,
                QuestionStyle::Graph,
                SchemeKind::Adjacency
            )
            .unwrap_err(),
            TaskError::ParamsMismatch { kind: TaskKind::NodeDegree, expected: "a node" }
        );
    }

    #[test]
    fn bool_parsing_takes_last_token() {
        let c = ctx(SchemeKind::Adjacency, 9, None);
        assert_eq!(
            parse_answer(TaskKind::CycleCheck, "No, there is no cycle.", &c),
            Some(Answer::Bool(false))
        );
        assert_eq!(
            parse_answer(TaskKind::CycleCheck, "no... wait. Yes!", &c),
            Some(Answer::Bool(true))
        );
        assert_eq!(
            parse_answer(TaskKind::EdgeExistence, "Nothing conclusive.", &c),
            None
        );
        assert_eq!(
            parse_answer(TaskKind::CycleCheck, "There is nothing cyclical.", &c),
            None
        );
    }

    #[test]
    fn count_parsing_takes_last_integer() {
        let c = ctx(SchemeKind::Adjacency, 9, Some(2));
        assert_eq!(
            parse_answer(TaskKind::NodeDegree, "so the degree of node 2 is 6.", &c),
            Some(Answer::Count(6))
        );
        assert_eq!(
            parse_answer(TaskKind::EdgeCount, "Edges: (0, 1) (1, 2). That makes 2.", &c),
            Some(Answer::Count(2))
        );
        assert_eq!(parse_answer(TaskKind::NodeCount, "several", &c), None);
    }

    #[test]
    fn number_words_are_opt_in() {
        let off = ctx(SchemeKind::Adjacency, 9, None);
        assert_eq!(parse_answer(TaskKind::NodeCount, "The answer is six.", &off), None);
        let on = ParseContext { options: ParseOptions { number_words: true }, ..off };
        assert_eq!(
            parse_answer(TaskKind::NodeCount, "The answer is six.", &on),
            Some(Answer::Count(6))
        );
        assert_eq!(
            parse_answer(TaskKind::NodeCount, "nine nodes, i.e. 9", &on),
            Some(Answer::Count(9))
        );
    }

    #[test]
    fn set_parsing_maps_names_and_excludes_query_node() {
        let c = ctx(SchemeKind::Friendship, 9, Some(0));
        assert_eq!(
            parse_answer(TaskKind::ConnectedNodes, "James's friends are Robert and John.", &c),
            Some(Answer::NodeSet([1, 2].into()))
        );
        let after_marker = ctx(SchemeKind::Adjacency, 9, Some(2));
        assert_eq!(
            parse_answer(
                TaskKind::ConnectedNodes,
                "Nodes 3 and 4 look relevant. The answer is: 0, 1, 5.",
                &after_marker
            ),
            Some(Answer::NodeSet([0, 1, 5].into()))
        );
    }

    #[test]
    fn set_parsing_ignores_out_of_range_ids() {
        let c = ctx(SchemeKind::Adjacency, 5, None);
        assert_eq!(
            parse_answer(TaskKind::ConnectedNodes, "The answer is: 1, 4, 17.", &c),
            Some(Answer::NodeSet([1, 4].into()))
        );
    }

    #[test]
    fn empty_set_statements_parse_as_empty() {
        let c = ctx(SchemeKind::Adjacency, 9, Some(3));
        for response in ["The answer is: none.", "No nodes are disconnected.", "A: []"] {
            assert_eq!(
                parse_answer(TaskKind::DisconnectedNodes, response, &c),
                Some(Answer::NodeSet(BTreeSet::new())),
                "{response:?}"
            );
        }
        assert_eq!(parse_answer(TaskKind::DisconnectedNodes, "hard to say", &c), None);
    }

    #[test]
    fn rendered_answers_reparse_to_golden() {
        let cases = [
            (TaskKind::CycleCheck, Answer::Bool(true), None),
            (TaskKind::EdgeExistence, Answer::Bool(false), None),
            (TaskKind::NodeDegree, Answer::Count(6), Some(2)),
            (TaskKind::EdgeCount, Answer::Count(0), None),
            (TaskKind::ConnectedNodes, Answer::NodeSet([2, 6, 8].into()), Some(7)),
            (TaskKind::DisconnectedNodes, Answer::NodeSet(BTreeSet::new()), Some(0)),
        ];
        for scheme in crate::encoding::list_schemes() {
            for (kind, golden, query_node) in &cases {
                let rendered = render_answer(golden, scheme).unwrap();
                let c = ctx(scheme, 9, *query_node);
                assert_eq!(
                    parse_answer(*kind, &rendered, &c).as_ref(),
                    Some(golden),
                    "{scheme} {kind} {rendered:?}"
                );
            }
        }
    }

    #[test]
    fn scoring_is_exact_match() {
        let golden = Answer::NodeSet([2, 6, 8].into());
        assert!(score(Some(&Answer::NodeSet([8, 2, 6].into())), &golden));
        assert!(!score(Some(&Answer::Count(10)), &Answer::Count(11)));
        assert!(!score(None, &Answer::Bool(true)));
        assert!(!score(Some(&Answer::Bool(true)), &Answer::Count(1)));
    }

    #[test]
    fn majority_baseline_picks_most_frequent() {
        let goldens = vec![Answer::Bool(true), Answer::Bool(true), Answer::Bool(false)];
        assert_eq!(majority_baseline(&goldens), Some((Answer::Bool(true), 2)));
        let uniform = vec![Answer::Count(3); 4];
        assert_eq!(majority_baseline(&uniform), Some((Answer::Count(3), 4)));
        assert_eq!(majority_baseline(&[]), None);
        let tied = vec![Answer::Bool(true), Answer::Bool(false)];
        assert_eq!(majority_baseline(&tied), Some((Answer::Bool(false), 1)));
    }

    #[test]
    fn instance_serialization_has_fixed_key_order() {
        let g = example_graph();
        let instance =
            sample_instance(TaskKind::NodeDegree, "er-0000", &g, QuestionStyle::Graph, 3).unwrap();
        let json = serde_json::to_string(&instance).unwrap();
        let v = instance.params.query_node().unwrap();
        assert_eq!(
            json,
            format!(
                "{{\"id\":\"node_degree-er-0000\",\"graph_id\":\"er-0000\",\
                 \"kind\":\"node_degree\",\"params\":{{\"v\":{v}}},\"style\":\"graph\",\
                 \"golden\":{{\"count\":{}}}}}",
                g.degree(v).unwrap()
            )
        );
        let cycle =
            sample_instance(TaskKind::CycleCheck, "er-0000", &g, QuestionStyle::Graph, 3).unwrap();
        assert!(serde_json::to_string(&cycle).unwrap().contains("\"params\":{}"));
    }

    #[test]
    fn instances_roundtrip_through_jsonl() {
        let g = example_graph();
        let instances: Vec<TaskInstance> = TaskKind::ALL
            .iter()
            .map(|&kind| sample_instance(kind, "g", &g, QuestionStyle::Application, 7).unwrap())
            .collect();
        let mut buffer = Vec::new();
        write_instances(&instances, &mut buffer).unwrap();
        assert_eq!(read_instances(buffer.as_slice()).unwrap(), instances);
    }

    proptest! {
        #[test]
        fn connected_and_disconnected_partition_the_rest(
            seed in 0u64..500, instance_seed in 0u64..500
        ) {
            let spec = crate::generate::GeneratorSpec {
                n: 5 + (seed % 16) as usize,
                params: crate::generate::GeneratorParams::Er { p: (seed % 11) as f64 / 10.0 },
            };
            let g = crate::generate::generate(&spec, seed).unwrap();
            let connected = sample_instance(
                TaskKind::ConnectedNodes, "g", &g, QuestionStyle::Graph, instance_seed
            ).unwrap();
            let disconnected = sample_instance(
                TaskKind::DisconnectedNodes, "g", &g, QuestionStyle::Graph, instance_seed
            ).unwrap();
            prop_assert_eq!(connected.params, disconnected.params);
            let v = connected.params.query_node().unwrap();
            let (Answer::NodeSet(a), Answer::NodeSet(b)) =
                (&connected.golden, &disconnected.golden) else { panic!("set goldens") };
            prop_assert!(a.is_disjoint(b));
            prop_assert!(!a.contains(&v) && !b.contains(&v));
            prop_assert_eq!(a.len() + b.len() + 1, g.node_count());
        }

        #[test]
        fn parse_inverts_render_for_random_sets(
            ids in proptest::collection::btree_set(0usize..20, 0..10),
            scheme_index in 0usize..9,
            query in 0usize..20,
        ) {
            let scheme = crate::encoding::list_schemes()[scheme_index];
            let mut set = ids;
            set.remove(&query);
            let golden = Answer::NodeSet(set);
            let rendered = render_answer(&golden, scheme).unwrap();
            let c = ctx(scheme, 20, Some(query));
            prop_assert_eq!(
                parse_answer(TaskKind::ConnectedNodes, &rendered, &c),
                Some(golden)
            );
        }
    }
}
