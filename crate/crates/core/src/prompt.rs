//! Prompt assembly under five prompting methods, plus procedurally generated
//! chains of thought for few-shot exemplars.
//!
//! Prompt shapes (`<enc>` is the graph text, `<q>` the question):
//!
//! ```text
//! zero_shot   <enc>\n\nQ: <q>\nA:
//! zero_cot    <enc>\n\nQ: <q>\nA: Let's think step by step.
//! few_shot    exemplar blocks (answer after "A: "), blank line, zero_shot query
//! cot         exemplar blocks (reasoning chain after "A: "), blank line, zero_shot query
//! cot_bag     cot with the build-a-graph sentence on its own line after every <enc>
//! ```

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoding::{node_label, SchemeKind};
use crate::generate::GeneratorKind;
use crate::graph::{Graph, NodeId};
use crate::task::{render_answer, TaskError, TaskInstance, TaskKind, TaskParams};

/// Appended directly after the final "A: " by `zero_cot`.
pub const ZERO_COT_SUFFIX: &str = "Let's think step by step.";

/// Inserted after every graph description by `cot_bag`.
pub const COT_BAG_SENTENCE: &str = "Let's construct a graph with the nodes and edges first.";

#[derive(Debug, Error, PartialEq)]
pub enum PromptError {
    #[error("{method} takes no exemplars but {count} were given")]
    UnexpectedExemplars { method: PromptMethod, count: usize },
    #[error("{method} needs at least one exemplar")]
    MissingExemplars { method: PromptMethod },
    #[error("{method} exemplars need reasoning chains")]
    MissingChain { method: PromptMethod },
    #[error("exemplar pool has {available} candidates, {needed} needed")]
    PoolTooSmall { needed: usize, available: usize },
    #[error("{0}")]
    Task(#[from] TaskError),
}

/// The five prompting methods, in registry order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptMethod {
    ZeroShot,
    ZeroCot,
    FewShot,
    Cot,
    CotBag,
}

impl PromptMethod {
    pub const ALL: [PromptMethod; 5] = [
        PromptMethod::ZeroShot,
        PromptMethod::ZeroCot,
        PromptMethod::FewShot,
        PromptMethod::Cot,
        PromptMethod::CotBag,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PromptMethod::ZeroShot => "zero_shot",
            PromptMethod::ZeroCot => "zero_cot",
            PromptMethod::FewShot => "few_shot",
            PromptMethod::Cot => "cot",
            PromptMethod::CotBag => "cot_bag",
        }
    }

    pub fn parse(s: &str) -> Option<PromptMethod> {
        Self::ALL.into_iter().find(|m| m.as_str() == s)
    }

    /// Whether the method prepends exemplar blocks.
    pub fn wants_exemplars(self) -> bool {
        matches!(self, PromptMethod::FewShot | PromptMethod::Cot | PromptMethod::CotBag)
    }

    /// Whether exemplar blocks show a reasoning chain instead of the bare answer.
    pub fn wants_chains(self) -> bool {
        matches!(self, PromptMethod::Cot | PromptMethod::CotBag)
    }
}

impl std::fmt::Display for PromptMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A solved example block for few-shot prompting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exemplar {
    pub instance_id: String,
    pub encoding: String,
    pub question: String,
    /// Reasoning chain; required by the chain-of-thought methods.
    pub chain: Option<String>,
    /// Rendered answer text; re-parses to the exemplar's golden answer.
    pub answer: String,
}

/// A fully assembled prompt with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub instance_id: String,
    pub scheme: SchemeKind,
    pub method: PromptMethod,
    pub k: usize,
    pub exemplar_ids: Vec<String>,
    pub prompt: String,
}

fn query_block(encoding: &str, question: &str, bag: bool) -> String {
    let bag_line = if bag { format!("\n{COT_BAG_SENTENCE}") } else { String::new() };
    format!("{encoding}{bag_line}\n\nQ: {question}\nA: ")
}

/// Assembles the full prompt for one case.
pub fn build_prompt(
    method: PromptMethod,
    scheme: SchemeKind,
    instance_id: &str,
    encoding_text: &str,
    question_text: &str,
    exemplars: &[Exemplar],
) -> Result<PromptBundle, PromptError> {
    if method.wants_exemplars() {
        if exemplars.is_empty() {
            return Err(PromptError::MissingExemplars { method });
        }
    } else if !exemplars.is_empty() {
        return Err(PromptError::UnexpectedExemplars { method, count: exemplars.len() });
    }

    let bag = method == PromptMethod::CotBag;
    let mut blocks = Vec::with_capacity(exemplars.len() + 1);
    for exemplar in exemplars {
        let solution = if method.wants_chains() {
            exemplar.chain.as_deref().ok_or(PromptError::MissingChain { method })?
        } else {
            exemplar.answer.as_str()
        };
        blocks.push(format!(
            "{}{solution}",
            query_block(&exemplar.encoding, &exemplar.question, bag)
        ));
    }
    let mut query = query_block(encoding_text, question_text, bag);
    if method == PromptMethod::ZeroCot {
        query.push_str(ZERO_COT_SUFFIX);
    }
    blocks.push(query);

    Ok(PromptBundle {
        instance_id: instance_id.to_string(),
        scheme,
        method,
        k: exemplars.len(),
        exemplar_ids: exemplars.iter().map(|e| e.instance_id.clone()).collect(),
        prompt: blocks.join("\n\n"),
    })
}

fn label(scheme: SchemeKind, v: NodeId) -> Result<String, TaskError> {
    Ok(node_label(scheme, v)?)
}

fn pair_list(scheme: SchemeKind, edges: &[(NodeId, NodeId)]) -> Result<String, TaskError> {
    let pairs: Result<Vec<String>, TaskError> = edges
        .iter()
        .map(|&(u, v)| Ok(format!("({}, {})", label(scheme, u)?, label(scheme, v)?)))
        .collect();
    Ok(pairs?.join(", "))
}

fn label_list(scheme: SchemeKind, nodes: &[NodeId]) -> Result<String, TaskError> {
    let labels: Result<Vec<String>, TaskError> =
        nodes.iter().map(|&v| label(scheme, v)).collect();
    Ok(labels?.join(", "))
}

fn roster_with_and(scheme: SchemeKind, n: usize) -> Result<String, TaskError> {
    let labels: Result<Vec<String>, TaskError> = (0..n).map(|v| label(scheme, v)).collect();
    let labels = labels?;
    Ok(match labels.as_slice() {
        [] => String::new(),
        [only] => only.clone(),
        [a, b] => format!("{a} and {b}"),
        _ => {
            let (last, init) = labels.split_last().unwrap();
            format!("{}, and {last}", init.join(", "))
        }
    })
}

/// Builds a templated reasoning chain whose every claim comes from the graph
/// oracles; the final sentence re-parses to the instance's golden answer.
pub fn build_cot_chain(
    kind: TaskKind,
    g: &Graph,
    params: TaskParams,
    scheme: SchemeKind,
) -> Result<String, PromptError> {
    let chain = match (kind, params) {
        (TaskKind::EdgeExistence, TaskParams::Pair { u, v }) => {
            let u_label = label(scheme, u)?;
            let v_label = label(scheme, v)?;
            let neighbors = g.neighbors(u).map_err(TaskError::from)?;
            if neighbors.is_empty() {
                format!(
                    "No nodes are connected to node {u_label}, so there is no edge between \
                     node {u_label} and node {v_label}. So the answer is no."
                )
            } else {
                let list = label_list(scheme, &neighbors)?;
                let (membership, conclusion, verdict) = if g.has_edge(u, v) {
                    ("is among them", "an edge", "yes")
                } else {
                    ("is not among them", "no edge", "no")
                };
                format!(
                    "The nodes connected to node {u_label} are {list}. Node {v_label} \
                     {membership}, so there is {conclusion} between node {u_label} and \
                     node {v_label}. So the answer is {verdict}."
                )
            }
        }
        (TaskKind::NodeDegree, TaskParams::Node { v }) => {
            let v_label = label(scheme, v)?;
            let incident = g.incident_edges(v).map_err(TaskError::from)?;
            let degree = incident.len();
            if incident.is_empty() {
                format!(
                    "No edges are incident to node {v_label}. That is 0 edges, so the degree \
                     of node {v_label} is 0."
                )
            } else {
                format!(
                    "The edges incident to node {v_label} are: {}. That is {degree} edges, \
                     so the degree of node {v_label} is {degree}.",
                    pair_list(scheme, &incident)?
                )
            }
        }
        (TaskKind::NodeCount, TaskParams::None) => {
            let n = g.node_count();
            format!(
                "The nodes in this graph are {}. There are {n} nodes.",
                roster_with_and(scheme, n)?
            )
        }
        (TaskKind::EdgeCount, TaskParams::None) => {
            let edges: Vec<(NodeId, NodeId)> = g.edges().collect();
            if edges.is_empty() {
                "This graph has no edges. So there are 0 edges.".to_string()
            } else {
                format!(
                    "The edges in this graph are: {}. Counting them, there are {} edges.",
                    pair_list(scheme, &edges)?,
                    edges.len()
                )
            }
        }
        (TaskKind::ConnectedNodes, TaskParams::Node { v }) => {
            let v_label = label(scheme, v)?;
            let neighbors = g.neighbors(v).map_err(TaskError::from)?;
            if neighbors.is_empty() {
                format!("No nodes are connected to node {v_label}. So the answer is: none.")
            } else {
                let list = label_list(scheme, &neighbors)?;
                format!(
                    "The nodes connected to node {v_label} are {list}. So the answer is: {list}."
                )
            }
        }
        (TaskKind::CycleCheck, TaskParams::None) => match g.find_cycle() {
            Some(cycle) => {
                let mut walk: Vec<String> = Vec::with_capacity(cycle.len() + 1);
                for &v in &cycle {
                    walk.push(label(scheme, v)?);
                }
                walk.push(label(scheme, cycle[0])?);
                format!(
                    "This graph contains the cycle {}. So the answer is yes.",
                    walk.join(" -> ")
                )
            }
            None => {
                let n = g.node_count();
                let m = g.edge_count();
                let c = g.component_count();
                let components = if c == 1 { "connected component" } else { "connected components" };
                format!(
                    "This graph has {n} nodes, {m} edges, and {c} {components}. Every forest \
                     satisfies edges = nodes - components, and {m} = {n} - {c} here, so there \
                     is no cycle. So the answer is no."
                )
            }
        },
        (TaskKind::DisconnectedNodes, TaskParams::Node { v }) => {
            let v_label = label(scheme, v)?;
            let others = g.non_neighbors(v).map_err(TaskError::from)?;
            if others.is_empty() {
                format!(
                    "Every other node is connected to node {v_label}. So the answer is: none."
                )
            } else {
                let list = label_list(scheme, &others)?;
                format!(
                    "The nodes not connected to node {v_label} are {list}. \
                     So the answer is: {list}."
                )
            }
        }
        (kind, _) => {
            let expected = match kind {
                TaskKind::EdgeExistence => "a node pair",
                TaskKind::NodeDegree | TaskKind::ConnectedNodes | TaskKind::DisconnectedNodes => {
                    "a node"
                }
                _ => "no params",
            };
            return Err(TaskError::ParamsMismatch { kind, expected }.into());
        }
    };
    Ok(chain)
}

/// Builds the exemplar block parts for one solved instance.
pub fn build_exemplar(
    instance: &TaskInstance,
    g: &Graph,
    scheme: SchemeKind,
    encoding: String,
    question: String,
) -> Result<Exemplar, PromptError> {
    Ok(Exemplar {
        instance_id: instance.id.clone(),
        encoding,
        question,
        chain: Some(build_cot_chain(instance.kind, g, instance.params, scheme)?),
        answer: render_answer(&instance.golden, scheme).map_err(PromptError::Task)?,
    })
}

/// A pool entry `sample_exemplars` can filter on.
#[derive(Clone, Copy, Debug)]
pub struct ExemplarKey {
    pub task: TaskKind,
    pub generator: GeneratorKind,
}

/// Picks `k` exemplar pool indices uniformly without replacement among the
/// candidates matching `task` (and `generator`, unless `None` — the
/// cross-generator mode).
pub fn sample_exemplars(
    pool: &[ExemplarKey],
    task: TaskKind,
    generator: Option<GeneratorKind>,
    k: usize,
    seed: u64,
) -> Result<Vec<usize>, PromptError> {
    let mut candidates: Vec<usize> = pool
        .iter()
        .enumerate()
        .filter(|(_, key)| {
            key.task == task && generator.is_none_or(|g| key.generator == g)
        })
        .map(|(i, _)| i)
        .collect();
    if candidates.len() < k {
        return Err(PromptError::PoolTooSmall { needed: k, available: candidates.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..k {
        let j = rng.gen_range(i..candidates.len());
        candidates.swap(i, j);
    }
    candidates.truncate(k);
    Ok(candidates)
}
