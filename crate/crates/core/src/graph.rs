//! Undirected simple graphs with canonical edge storage, plus the counting
//! and reachability primitives everything else builds on.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node identifier; nodes of an `n`-node graph are `0..n`.
pub type NodeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    NoNodes,
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),
}

/// An undirected simple graph. Edges are stored as `(min, max)` pairs in a
/// sorted set, so equality, iteration order, and serialization are canonical.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(NodeId, NodeId)>,
    adjacency: Vec<BTreeSet<NodeId>>,
}

/// Wire shape: `{"n": 9, "edges": [[0, 1], [0, 2], ...]}`.
#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
}

impl TryFrom<GraphRepr> for Graph {
    type Error = GraphError;

    fn try_from(repr: GraphRepr) -> Result<Self, GraphError> {
        Graph::new(repr.n, repr.edges)
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr { n: g.n, edges: g.edges.into_iter().collect() }
    }
}

impl Graph {
    /// Builds a graph on nodes `0..n`. Edge endpoints may come in any order
    /// and may repeat; they are canonicalized to deduplicated `(min, max)`
    /// pairs. Self-loops and out-of-range endpoints are rejected.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoNodes);
        }
        let mut canonical = BTreeSet::new();
        let mut adjacency = vec![BTreeSet::new(); n];
        for (u, v) in edges {
            if u >= n {
                return Err(GraphError::NodeOutOfRange { node: u, n });
            }
            if v >= n {
                return Err(GraphError::NodeOutOfRange { node: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            canonical.insert((u.min(v), u.max(v)));
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }
        Ok(Graph { n, edges: canonical, adjacency })
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical `(min, max)` lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    /// Whether `u` and `v` are adjacent, in either endpoint order.
    /// Out-of-range endpoints are simply not adjacent to anything.
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.n && v < self.n && self.edges.contains(&(u.min(v), u.max(v)))
    }

    fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange { node: v, n: self.n })
        }
    }

    /// Degree of `v`.
    pub fn degree(&self, v: NodeId) -> Result<usize, GraphError> {
        self.check_node(v)?;
        Ok(self.adjacency[v].len())
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: NodeId) -> Result<Vec<NodeId>, GraphError> {
        self.check_node(v)?;
        Ok(self.adjacency[v].iter().copied().collect())
    }

    /// Nodes that are neither `v` nor adjacent to it, in ascending order.
    pub fn non_neighbors(&self, v: NodeId) -> Result<Vec<NodeId>, GraphError> {
        self.check_node(v)?;
        Ok((0..self.n).filter(|&u| u != v && !self.adjacency[v].contains(&u)).collect())
    }

    /// Incident edges of `v` as canonical `(min, max)` pairs in edge order.
    pub fn incident_edges(&self, v: NodeId) -> Result<Vec<(NodeId, NodeId)>, GraphError> {
        self.check_node(v)?;
        Ok(self.edges.iter().copied().filter(|&(a, b)| a == v || b == v).collect())
    }

    /// Whether the graph contains a cycle, decided by depth-first search.
    pub fn has_cycle(&self) -> bool {
        self.find_cycle().is_some()
    }

    /// A witness cycle `[c0, c1, ..., ck]` (with `ck` adjacent to `c0`) found
    /// by depth-first search, or `None` for forests.
    pub fn find_cycle(&self) -> Option<Vec<NodeId>> {
        let mut visited = vec![false; self.n];
        let mut parent: Vec<Option<NodeId>> = vec![None; self.n];
        for root in 0..self.n {
            if visited[root] {
                continue;
            }
            visited[root] = true;
            let mut stack = vec![(root, self.adjacency[root].iter())];
            while let Some((u, iter)) = stack.last_mut() {
                let u = *u;
                match iter.next() {
                    Some(&w) => {
                        if !visited[w] {
                            visited[w] = true;
                            parent[w] = Some(u);
                            stack.push((w, self.adjacency[w].iter()));
                        } else if parent[u] != Some(w) {
                            // In an undirected DFS every non-tree edge reaches
                            // an ancestor, so walking parents from u closes a
                            // cycle at w.
                            let mut cycle = vec![u];
                            let mut cur = u;
                            while cur != w {
                                cur = parent[cur].expect("ancestor walk reaches the back edge");
                                cycle.push(cur);
                            }
                            cycle.reverse();
                            return Some(cycle);
                        }
                    }
                    None => {
                        stack.pop();
                    }
                }
            }
        }
        None
    }

    /// Number of connected components, via union-find.
    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.n);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        uf.component_count()
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }

    fn component_count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

/// Golden or parsed answer to a task question.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Bool(bool),
    Count(u64),
    NodeSet(BTreeSet<NodeId>),
}

impl Answer {
    /// Node-set answers must stay within `0..n` and never contain the node
    /// the question is about.
    pub fn is_valid_for(&self, n: usize, query_node: Option<NodeId>) -> bool {
        match self {
            Answer::NodeSet(set) => {
                set.iter().all(|&v| v < n) && query_node.is_none_or(|q| !set.contains(&q))
            }
            _ => true,
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Nine-node sample used across the crate's tests.
    pub(crate) fn example_graph() -> Graph {
        Graph::new(
            9,
            vec![
                (0, 1),
                (0, 2),
                (1, 2),
                (2, 3),
                (2, 4),
                (2, 5),
                (2, 7),
                (3, 8),
                (5, 6),
                (6, 7),
                (7, 8),
            ],
        )
        .unwrap()
    }

    #[test]
    fn example_graph_counts() {
        let g = example_graph();
        assert_eq!(g.node_count(), 9);
        assert_eq!(g.edge_count(), 11);
        assert_eq!(g.degree(2).unwrap(), 6);
        assert_eq!(g.neighbors(7).unwrap(), vec![2, 6, 8]);
        assert_eq!(g.non_neighbors(4).unwrap(), vec![0, 1, 3, 5, 6, 7, 8]);
        assert!(g.has_cycle());
    }

    #[test]
    fn has_edge_ignores_endpoint_order() {
        let g = example_graph();
        assert!(g.has_edge(0, 1));
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(8, 0));
        assert!(!g.has_edge(0, 42));
    }

    #[test]
    fn construction_canonicalizes_edges() {
        let g = Graph::new(4, vec![(2, 1), (1, 2), (1, 2), (0, 3)]).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 3), (1, 2)]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(Graph::new(0, vec![]).unwrap_err(), GraphError::NoNodes);
        assert_eq!(
            Graph::new(3, vec![(0, 3)]).unwrap_err(),
            GraphError::NodeOutOfRange { node: 3, n: 3 }
        );
        assert_eq!(Graph::new(3, vec![(1, 1)]).unwrap_err(), GraphError::SelfLoop(1));
        assert_eq!(
            Graph::new(2, vec![]).unwrap().degree(5).unwrap_err(),
            GraphError::NodeOutOfRange { node: 5, n: 2 }
        );
    }

    #[test]
    fn single_node_graph() {
        let g = Graph::new(1, vec![]).unwrap();
        assert_eq!(g.degree(0).unwrap(), 0);
        assert_eq!(g.neighbors(0).unwrap(), Vec::<NodeId>::new());
        assert_eq!(g.non_neighbors(0).unwrap(), Vec::<NodeId>::new());
        assert!(!g.has_cycle());
        assert_eq!(g.component_count(), 1);
    }

    #[test]
    fn path_has_no_cycle_triangle_does() {
        let path = Graph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(!path.has_cycle());
        assert_eq!(path.find_cycle(), None);

        let tri = Graph::new(5, vec![(0, 1), (1, 4), (0, 4), (2, 3)]).unwrap();
        let cycle = tri.find_cycle().unwrap();
        assert_eq!(cycle.len(), 3);
        for i in 0..cycle.len() {
            assert!(tri.has_edge(cycle[i], cycle[(i + 1) % cycle.len()]));
        }
    }

    #[test]
    fn component_count_examples() {
        let g = Graph::new(6, vec![(0, 1), (2, 3), (3, 4)]).unwrap();
        assert_eq!(g.component_count(), 3);
        assert_eq!(example_graph().component_count(), 1);
    }

    #[test]
    fn serialization_is_canonical() {
        let g = Graph::new(3, vec![(2, 0), (0, 1)]).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"n":3,"edges":[[0,1],[0,2]]}"#);
        let back: Graph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn deserialization_enforces_invariants() {
        assert!(serde_json::from_str::<Graph>(r#"{"n":2,"edges":[[0,0]]}"#).is_err());
        assert!(serde_json::from_str::<Graph>(r#"{"n":2,"edges":[[0,5]]}"#).is_err());
    }

    #[test]
    fn answer_validity() {
        let set: BTreeSet<NodeId> = [2, 6, 8].into_iter().collect();
        let ans = Answer::NodeSet(set);
        assert!(ans.is_valid_for(9, Some(7)));
        assert!(!ans.is_valid_for(9, Some(2)));
        assert!(!ans.is_valid_for(8, Some(7)));
        assert!(Answer::Bool(true).is_valid_for(1, None));
    }

    fn arbitrary_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..max_n).prop_flat_map(|n| {
            let pairs = prop::collection::vec((0..n, 0..n), 0..(3 * n));
            pairs.prop_map(move |raw| {
                Graph::new(n, raw.into_iter().filter(|(u, v)| u != v)).unwrap()
            })
        })
    }

    proptest! {
        /// Cross-checks the DFS answer against the forest identity
        /// `edges = nodes - components`, computed by union-find.
        #[test]
        fn cycle_matches_component_formula(g in arbitrary_graph(40)) {
            let formula = g.edge_count() > g.node_count() - g.component_count();
            prop_assert_eq!(g.has_cycle(), formula);
        }

        #[test]
        fn neighbor_sets_partition_nodes(g in arbitrary_graph(40)) {
            for v in 0..g.node_count() {
                let mut all: Vec<NodeId> = g.neighbors(v).unwrap();
                all.extend(g.non_neighbors(v).unwrap());
                all.push(v);
                all.sort_unstable();
                prop_assert_eq!(all, (0..g.node_count()).collect::<Vec<_>>());
            }
        }

        #[test]
        fn degrees_sum_to_twice_edges(g in arbitrary_graph(40)) {
            let total: usize = (0..g.node_count()).map(|v| g.degree(v).unwrap()).sum();
            prop_assert_eq!(total, 2 * g.edge_count());
        }

        #[test]
        fn found_cycles_are_real(g in arbitrary_graph(40)) {
            if let Some(cycle) = g.find_cycle() {
                prop_assert!(cycle.len() >= 3);
                for i in 0..cycle.len() {
                    prop_assert!(g.has_edge(cycle[i], cycle[(i + 1) % cycle.len()]));
                }
            }
        }
    }
}
