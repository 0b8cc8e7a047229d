//! The nine graph-to-text encoding schemes and their node-naming vocabularies.
//!
//! Every scheme renders a preamble naming the node roster, then an edge
//! section in canonical `(min, max)`-sorted edge order. `encode_graph` is a
//! pure function of `(scheme, graph)`; the multi-relation variant additionally
//! takes a seed that draws one relation phrase per edge.

use std::sync::OnceLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

#[derive(Debug, Error, PartialEq)]
pub enum EncodingError {
    #[error("graph has {n} nodes but the {scheme} scheme names at most {capacity}")]
    GraphTooLarge { scheme: SchemeKind, n: usize, capacity: usize },
    #[error("node {v} is out of range for the {scheme} scheme")]
    LabelOutOfRange { scheme: SchemeKind, v: NodeId },
    #[error("the {0} scheme has no relation-phrase edge sentences")]
    NoRelationSentences(SchemeKind),
    #[error("relation vocabulary is empty")]
    EmptyVocabulary,
}

/// The nine encoding schemes, in registry order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Adjacency,
    Incident,
    Coauthorship,
    Friendship,
    Sp,
    Got,
    SocialNetwork,
    Politician,
    Expert,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 9] = [
        SchemeKind::Adjacency,
        SchemeKind::Incident,
        SchemeKind::Coauthorship,
        SchemeKind::Friendship,
        SchemeKind::Sp,
        SchemeKind::Got,
        SchemeKind::SocialNetwork,
        SchemeKind::Politician,
        SchemeKind::Expert,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Adjacency => "adjacency",
            SchemeKind::Incident => "incident",
            SchemeKind::Coauthorship => "coauthorship",
            SchemeKind::Friendship => "friendship",
            SchemeKind::Sp => "sp",
            SchemeKind::Got => "got",
            SchemeKind::SocialNetwork => "social_network",
            SchemeKind::Politician => "politician",
            SchemeKind::Expert => "expert",
        }
    }

    pub fn parse(s: &str) -> Option<SchemeKind> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    pub fn namer(self) -> NodeNamer {
        let kind = match self {
            SchemeKind::Adjacency | SchemeKind::Incident => NamerKind::Integer,
            SchemeKind::Coauthorship | SchemeKind::Friendship | SchemeKind::SocialNetwork => {
                NamerKind::NamesEn
            }
            SchemeKind::Sp => NamerKind::NamesSp,
            SchemeKind::Got => NamerKind::NamesGot,
            SchemeKind::Politician => NamerKind::NamesPolitician,
            SchemeKind::Expert => NamerKind::Alphabet,
        };
        NodeNamer { kind }
    }

    /// Whether edges read as "X and Y are {relation}." sentences, making the
    /// scheme eligible for multi-relation encoding.
    pub fn is_friendship_family(self) -> bool {
        matches!(self, SchemeKind::Friendship | SchemeKind::Sp | SchemeKind::Got)
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Returns the scheme registry in its stable order.
pub fn list_schemes() -> [SchemeKind; 9] {
    SchemeKind::ALL
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamerKind {
    Integer,
    NamesEn,
    NamesSp,
    NamesGot,
    NamesPolitician,
    Alphabet,
}

fn name_list(raw: &'static str, cell: &'static OnceLock<Vec<&'static str>>) -> &'static [&'static str] {
    cell.get_or_init(|| raw.lines().filter(|l| !l.is_empty()).collect())
}

fn names_en() -> &'static [&'static str] {
    static CELL: OnceLock<Vec<&'static str>> = OnceLock::new();
    name_list(include_str!("../data/names_en.txt"), &CELL)
}

fn names_sp() -> &'static [&'static str] {
    static CELL: OnceLock<Vec<&'static str>> = OnceLock::new();
    name_list(include_str!("../data/names_sp.txt"), &CELL)
}

fn names_got() -> &'static [&'static str] {
    static CELL: OnceLock<Vec<&'static str>> = OnceLock::new();
    name_list(include_str!("../data/names_got.txt"), &CELL)
}

fn names_politician() -> &'static [&'static str] {
    static CELL: OnceLock<Vec<&'static str>> = OnceLock::new();
    name_list(include_str!("../data/names_politician.txt"), &CELL)
}

const ALPHABET: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Maps node ids to printable labels and back.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeNamer {
    kind: NamerKind,
}

impl NodeNamer {
    pub fn kind(&self) -> NamerKind {
        self.kind
    }

    fn list(&self) -> Option<&'static [&'static str]> {
        match self.kind {
            NamerKind::Integer | NamerKind::Alphabet => None,
            NamerKind::NamesEn => Some(names_en()),
            NamerKind::NamesSp => Some(names_sp()),
            NamerKind::NamesGot => Some(names_got()),
            NamerKind::NamesPolitician => Some(names_politician()),
        }
    }

    /// Largest representable node count; `None` means unbounded.
    pub fn capacity(&self) -> Option<usize> {
        match self.kind {
            NamerKind::Integer => None,
            NamerKind::Alphabet => Some(ALPHABET.len()),
            _ => Some(self.list().unwrap().len()),
        }
    }

    pub fn label(&self, v: NodeId) -> Option<String> {
        match self.kind {
            NamerKind::Integer => Some(v.to_string()),
            NamerKind::Alphabet => ALPHABET.get(v..v + 1).map(str::to_owned),
            _ => self.list().unwrap().get(v).map(|s| (*s).to_string()),
        }
    }

    /// Inverse of [`NodeNamer::label`]; name matching is case-sensitive.
    pub fn lookup(&self, token: &str) -> Option<NodeId> {
        match self.kind {
            NamerKind::Integer => token.parse().ok(),
            NamerKind::Alphabet => {
                let mut chars = token.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if c.is_ascii_uppercase() => Some(c as usize - 'A' as usize),
                    _ => None,
                }
            }
            _ => self.list().unwrap().iter().position(|n| *n == token),
        }
    }
}

/// Returns the label the scheme uses for node `v`.
pub fn node_label(scheme: SchemeKind, v: NodeId) -> Result<String, EncodingError> {
    scheme.namer().label(v).ok_or(EncodingError::LabelOutOfRange { scheme, v })
}

/// The relation phrases available to multi-relation encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationVocabulary {
    phrases: Vec<String>,
}

impl RelationVocabulary {
    /// The standard ten-phrase vocabulary.
    pub fn standard() -> Self {
        RelationVocabulary {
            phrases: include_str!("../data/relations.txt")
                .lines()
                .filter(|l| !l.is_empty())
                .map(str::to_owned)
                .collect(),
        }
    }

    pub fn new(phrases: Vec<String>) -> Result<Self, EncodingError> {
        if phrases.is_empty() {
            return Err(EncodingError::EmptyVocabulary);
        }
        Ok(RelationVocabulary { phrases })
    }

    pub fn phrases(&self) -> &[String] {
        &self.phrases
    }
}

/// Joins labels as "a", "a and b", or "a, b, …, and z".
fn roster(labels: &[String]) -> String {
    match labels {
        [] => String::new(),
        [only] => only.clone(),
        [first, second] => format!("{first} and {second}"),
        _ => {
            let (last, init) = labels.split_last().unwrap();
            format!("{}, and {last}", init.join(", "))
        }
    }
}

fn labels_for(scheme: SchemeKind, g: &Graph) -> Result<Vec<String>, EncodingError> {
    let namer = scheme.namer();
    if let Some(capacity) = namer.capacity() {
        if g.node_count() > capacity {
            return Err(EncodingError::GraphTooLarge { scheme, n: g.node_count(), capacity });
        }
    }
    Ok((0..g.node_count()).map(|v| namer.label(v).unwrap()).collect())
}

/// Renders the scheme's text for `g`. Graphs without edges render the
/// preamble only; the edge section and its header are omitted.
pub fn encode_graph(scheme: SchemeKind, g: &Graph) -> Result<String, EncodingError> {
    encode_internal(scheme, g, None)
}

/// Like [`encode_graph`] for the friendship-family schemes, but each edge's
/// relation phrase is drawn uniformly from the standard vocabulary, one draw
/// per edge in canonical edge order, seeded by `seed`.
pub fn encode_graph_multirel(
    scheme: SchemeKind,
    g: &Graph,
    seed: u64,
) -> Result<String, EncodingError> {
    encode_graph_with_vocabulary(scheme, g, &RelationVocabulary::standard(), seed)
}

/// Multi-relation encoding with a caller-supplied vocabulary.
pub fn encode_graph_with_vocabulary(
    scheme: SchemeKind,
    g: &Graph,
    vocabulary: &RelationVocabulary,
    seed: u64,
) -> Result<String, EncodingError> {
    if !scheme.is_friendship_family() {
        return Err(EncodingError::NoRelationSentences(scheme));
    }
    if vocabulary.phrases.is_empty() {
        return Err(EncodingError::EmptyVocabulary);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let relations: Vec<&str> = (0..g.edge_count())
        .map(|_| vocabulary.phrases[rng.gen_range(0..vocabulary.phrases.len())].as_str())
        .collect();
    encode_internal(scheme, g, Some(&relations))
}

fn encode_internal(
    scheme: SchemeKind,
    g: &Graph,
    relations: Option<&[&str]>,
) -> Result<String, EncodingError> {
    let labels = labels_for(scheme, g)?;
    let roster = roster(&labels);
    let relation_at = |i: usize| relations.map_or("friends", |r| r[i]);
    let edge_labels: Vec<(&str, &str)> = g
        .edges()
        .map(|(u, v)| (labels[u].as_str(), labels[v].as_str()))
        .collect();

    let mut text = match scheme {
        SchemeKind::Adjacency => format!(
            "In an undirected graph, (i,j) means that node i and node j are connected \
             with an undirected edge. G describes a graph among nodes {roster}."
        ),
        SchemeKind::Incident => format!("G describes a graph among {roster}."),
        SchemeKind::Coauthorship => format!("G describes a co-authorship graph among {roster}."),
        SchemeKind::Friendship | SchemeKind::Sp | SchemeKind::Got => {
            format!("G describes a friendship graph among {roster}.")
        }
        SchemeKind::SocialNetwork | SchemeKind::Politician => {
            format!("G describes a social network graph among {roster}.")
        }
        SchemeKind::Expert => format!(
            "You are a graph analyst and you have been given a graph G among {roster}."
        ),
    };

    if g.edge_count() == 0 {
        return Ok(text);
    }

    match scheme {
        SchemeKind::Adjacency => {
            let pairs: Vec<String> =
                g.edges().map(|(u, v)| format!("({u}, {v})")).collect();
            text.push_str(&format!("\nThe edges in G are: {}.", pairs.join(" ")));
        }
        SchemeKind::Incident => {
            text.push_str("\nIn this graph:");
            for v in 0..g.node_count() {
                let neighbors = g.neighbors(v).unwrap();
                if neighbors.is_empty() {
                    continue;
                }
                let word = if neighbors.len() == 1 { "node" } else { "nodes" };
                let list: Vec<String> = neighbors.iter().map(|u| u.to_string()).collect();
                text.push_str(&format!(
                    "\nNode {v} is connected to {word} {}.",
                    list.join(", ")
                ));
            }
        }
        SchemeKind::Coauthorship => {
            text.push_str("\nIn this co-authorship graph:");
            for (a, b) in &edge_labels {
                text.push_str(&format!("\n{a} and {b} wrote a paper together."));
            }
        }
        SchemeKind::Friendship => {
            text.push_str("\nWe have the following edges in G:");
            for (i, (a, b)) in edge_labels.iter().enumerate() {
                text.push_str(&format!("\n{a} and {b} are {}.", relation_at(i)));
            }
        }
        SchemeKind::Sp | SchemeKind::Got => {
            let sentences: Vec<String> = edge_labels
                .iter()
                .enumerate()
                .map(|(i, (a, b))| format!("{a} and {b} are {}", relation_at(i)))
                .collect();
            let joined = sentences.join(", ");
            if scheme == SchemeKind::Sp {
                text.push_str(&format!("\nIn this friendship graph:\n{joined}."));
            } else {
                text.push_str(&format!("\nIn this friendship graph: {joined}."));
            }
        }
        SchemeKind::SocialNetwork | SchemeKind::Politician => {
            text.push_str("\nWe have the following edges in G:");
            for (a, b) in &edge_labels {
                text.push_str(&format!("\n{a} and {b} are connected."));
            }
        }
        SchemeKind::Expert => {
            text.push_str(" G has the following undirected edges:");
            for (a, b) in &edge_labels {
                text.push_str(&format!("\n{a} -> {b}"));
            }
        }
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::example_graph;

    #[test]
    fn registry_is_stable_and_unique() {
        let schemes = list_schemes();
        assert_eq!(schemes.len(), 9);
        assert_eq!(schemes[0], SchemeKind::Adjacency);
        assert_eq!(schemes[8], SchemeKind::Expert);
        let mut names: Vec<&str> = schemes.iter().map(|s| s.as_str()).collect();
        names.dedup();
        assert_eq!(names.len(), 9);
        for scheme in schemes {
            assert_eq!(SchemeKind::parse(scheme.as_str()), Some(scheme));
        }
        assert_eq!(SchemeKind::parse("foo"), None);
    }

    #[test]
    fn name_lists_are_full_and_unique() {
        for namer in [
            NodeNamer { kind: NamerKind::NamesEn },
            NodeNamer { kind: NamerKind::NamesSp },
            NodeNamer { kind: NamerKind::NamesGot },
            NodeNamer { kind: NamerKind::NamesPolitician },
        ] {
            let n = namer.capacity().unwrap();
            assert!(n >= 26);
            let labels: Vec<String> = (0..n).map(|v| namer.label(v).unwrap()).collect();
            let mut sorted = labels.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), n, "duplicate label in {:?}", namer.kind());
            for (v, label) in labels.iter().enumerate() {
                assert_eq!(namer.lookup(label), Some(v));
            }
        }
    }

    #[test]
    fn labels_match_known_rosters() {
        assert_eq!(node_label(SchemeKind::Friendship, 0).unwrap(), "James");
        assert_eq!(node_label(SchemeKind::Got, 2).unwrap(), "Daenerys");
        assert_eq!(node_label(SchemeKind::Expert, 8).unwrap(), "I");
        assert_eq!(node_label(SchemeKind::Adjacency, 17).unwrap(), "17");
        assert_eq!(node_label(SchemeKind::Sp, 4).unwrap(), "Tolkien");
        assert_eq!(node_label(SchemeKind::Politician, 8).unwrap(), "John");
        assert!(node_label(SchemeKind::Expert, 26).is_err());
    }

    #[test]
    fn namer_lookup_inverts_label() {
        let namer = SchemeKind::Expert.namer();
        assert_eq!(namer.lookup("A"), Some(0));
        assert_eq!(namer.lookup("I"), Some(8));
        assert_eq!(namer.lookup("a"), None);
        assert_eq!(namer.lookup("AB"), None);
        let integer = SchemeKind::Adjacency.namer();
        assert_eq!(integer.lookup("12"), Some(12));
        assert_eq!(integer.lookup("x"), None);
        let en = SchemeKind::Friendship.namer();
        assert_eq!(en.lookup("James"), Some(0));
        assert_eq!(en.lookup("james"), None);
    }

    #[test]
    fn roster_uses_serial_comma() {
        let one = Graph::new(1, []).unwrap();
        let two = Graph::new(2, []).unwrap();
        let three = Graph::new(3, []).unwrap();
        assert_eq!(
            encode_graph(SchemeKind::Incident, &one).unwrap(),
            "G describes a graph among 0."
        );
        assert_eq!(
            encode_graph(SchemeKind::Incident, &two).unwrap(),
            "G describes a graph among 0 and 1."
        );
        assert_eq!(
            encode_graph(SchemeKind::Incident, &three).unwrap(),
            "G describes a graph among 0, 1, and 2."
        );
    }

    #[test]
    fn empty_graphs_render_preamble_only() {
        let g = Graph::new(3, []).unwrap();
        for scheme in list_schemes() {
            let text = encode_graph(scheme, &g).unwrap();
            assert_eq!(text.lines().count(), 1, "{scheme}: {text:?}");
            assert!(!text.contains("edges in G are"));
            assert!(!text.contains("In this"));
            assert!(!text.contains("following"));
        }
    }

    #[test]
    fn isolated_nodes_get_no_incident_line() {
        let g = Graph::new(4, [(0, 2)]).unwrap();
        let text = encode_graph(SchemeKind::Incident, &g).unwrap();
        assert_eq!(
            text,
            "G describes a graph among 0, 1, 2, and 3.\nIn this graph:\n\
             Node 0 is connected to node 2.\nNode 2 is connected to node 0."
        );
    }

    #[test]
    fn oversized_graph_is_rejected() {
        let g = Graph::new(27, []).unwrap();
        assert_eq!(
            encode_graph(SchemeKind::Expert, &g).unwrap_err(),
            EncodingError::GraphTooLarge { scheme: SchemeKind::Expert, n: 27, capacity: 26 }
        );
        assert!(encode_graph(SchemeKind::Adjacency, &g).is_ok());
    }

    #[test]
    fn encoding_is_injective_on_fixed_n() {
        use std::collections::HashSet;
        let graphs = [
            Graph::new(4, [(0, 1)]).unwrap(),
            Graph::new(4, [(0, 2)]).unwrap(),
            Graph::new(4, [(0, 1), (2, 3)]).unwrap(),
            Graph::new(4, [(1, 2), (2, 3)]).unwrap(),
            Graph::new(4, []).unwrap(),
        ];
        for scheme in list_schemes() {
            let texts: HashSet<String> =
                graphs.iter().map(|g| encode_graph(scheme, g).unwrap()).collect();
            assert_eq!(texts.len(), graphs.len(), "{scheme} collided");
        }
    }

    #[test]
    fn multirel_draws_vary_and_replay() {
        let g = example_graph();
        let a = encode_graph_multirel(SchemeKind::Friendship, &g, 5).unwrap();
        let b = encode_graph_multirel(SchemeKind::Friendship, &g, 5).unwrap();
        assert_eq!(a, b);
        let c = encode_graph_multirel(SchemeKind::Friendship, &g, 6).unwrap();
        assert_ne!(a, c);
        let standard = RelationVocabulary::standard();
        assert_eq!(standard.phrases().len(), 10);
        assert_eq!(standard.phrases()[6], "teammates");
        assert!(standard.phrases().iter().any(|p| a.contains(p.as_str())));
    }

    #[test]
    fn multirel_singleton_vocabulary_collapses() {
        let g = example_graph();
        let vocab = RelationVocabulary::new(vec!["friends".into()]).unwrap();
        for scheme in [SchemeKind::Friendship, SchemeKind::Sp, SchemeKind::Got] {
            assert_eq!(
                encode_graph_with_vocabulary(scheme, &g, &vocab, 99).unwrap(),
                encode_graph(scheme, &g).unwrap()
            );
        }
    }

    #[test]
    fn multirel_rejects_other_schemes() {
        let g = example_graph();
        for scheme in [SchemeKind::Adjacency, SchemeKind::Coauthorship, SchemeKind::Expert] {
            assert_eq!(
                encode_graph_multirel(scheme, &g, 1).unwrap_err(),
                EncodingError::NoRelationSentences(scheme)
            );
        }
    }

    #[test]
    fn stripping_relations_recovers_single_relation_text() {
        let g = example_graph();
        let multi = encode_graph_multirel(SchemeKind::Got, &g, 42).unwrap();
        let mut uniform = multi;
        for phrase in RelationVocabulary::standard().phrases() {
            uniform = uniform.replace(&format!("are {phrase}"), "are friends");
        }
        assert_eq!(uniform, encode_graph(SchemeKind::Got, &g).unwrap());
    }
}
