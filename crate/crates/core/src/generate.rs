//! Random graph generators and deterministic corpus assembly.
//!
//! Every graph in a corpus is reproducible from `(spec, seed)` alone. The
//! per-graph seeds are derived from the corpus master seed with a documented
//! splitting rule (see [`graph_seeds`]), so adding or removing graphs of one
//! kind never changes the graphs of another.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("invalid generator parameter: {0}")]
    InvalidParam(String),
    #[error("empty corpus: configuration selects no graphs")]
    EmptyCorpus,
}

/// Generator families, in registry order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Er,
    Ba,
    Sbm,
    Sfn,
    Star,
    Path,
    Complete,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 7] = [
        GeneratorKind::Er,
        GeneratorKind::Ba,
        GeneratorKind::Sbm,
        GeneratorKind::Sfn,
        GeneratorKind::Star,
        GeneratorKind::Path,
        GeneratorKind::Complete,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::Er => "er",
            GeneratorKind::Ba => "ba",
            GeneratorKind::Sbm => "sbm",
            GeneratorKind::Sfn => "sfn",
            GeneratorKind::Star => "star",
            GeneratorKind::Path => "path",
            GeneratorKind::Complete => "complete",
        }
    }

    pub fn parse(s: &str) -> Option<GeneratorKind> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Kind-specific generator parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorParams {
    Er { p: f64 },
    Ba { m: usize },
    Sbm { k: usize, p_in: f64, p_out: f64 },
    Sfn { alpha: f64, beta: f64, gamma: f64 },
    Star,
    Path,
    Complete,
}

impl GeneratorParams {
    pub fn kind(&self) -> GeneratorKind {
        match self {
            GeneratorParams::Er { .. } => GeneratorKind::Er,
            GeneratorParams::Ba { .. } => GeneratorKind::Ba,
            GeneratorParams::Sbm { .. } => GeneratorKind::Sbm,
            GeneratorParams::Sfn { .. } => GeneratorKind::Sfn,
            GeneratorParams::Star => GeneratorKind::Star,
            GeneratorParams::Path => GeneratorKind::Path,
            GeneratorParams::Complete => GeneratorKind::Complete,
        }
    }

    /// Flat JSON object for corpus records, e.g. `{"p":0.4}` or `{}`.
    pub fn to_json(&self) -> serde_json::Value {
        match *self {
            GeneratorParams::Er { p } => serde_json::json!({ "p": p }),
            GeneratorParams::Ba { m } => serde_json::json!({ "m": m }),
            GeneratorParams::Sbm { k, p_in, p_out } => {
                serde_json::json!({ "k": k, "p_in": p_in, "p_out": p_out })
            }
            GeneratorParams::Sfn { alpha, beta, gamma } => {
                serde_json::json!({ "alpha": alpha, "beta": beta, "gamma": gamma })
            }
            GeneratorParams::Star | GeneratorParams::Path | GeneratorParams::Complete => {
                serde_json::json!({})
            }
        }
    }

    /// Inverse of [`GeneratorParams::to_json`], keyed by `kind`.
    pub fn from_json(
        kind: GeneratorKind,
        value: &serde_json::Value,
    ) -> Result<GeneratorParams, GenerateError> {
        let get = |key: &str| {
            value
                .get(key)
                .and_then(serde_json::Value::as_f64)
                .ok_or_else(|| GenerateError::InvalidParam(format!("missing field {key}")))
        };
        Ok(match kind {
            GeneratorKind::Er => GeneratorParams::Er { p: get("p")? },
            GeneratorKind::Ba => GeneratorParams::Ba { m: get("m")? as usize },
            GeneratorKind::Sbm => GeneratorParams::Sbm {
                k: get("k")? as usize,
                p_in: get("p_in")?,
                p_out: get("p_out")?,
            },
            GeneratorKind::Sfn => GeneratorParams::Sfn {
                alpha: get("alpha")?,
                beta: get("beta")?,
                gamma: get("gamma")?,
            },
            GeneratorKind::Star => GeneratorParams::Star,
            GeneratorKind::Path => GeneratorParams::Path,
            GeneratorKind::Complete => GeneratorParams::Complete,
        })
    }
}

/// Everything needed to (re)generate one graph, minus the seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub params: GeneratorParams,
}

impl GeneratorSpec {
    pub fn kind(&self) -> GeneratorKind {
        self.params.kind()
    }

    fn validate(&self) -> Result<(), GenerateError> {
        let n = self.n;
        if n == 0 {
            return Err(GenerateError::InvalidParam("n must be at least 1".into()));
        }
        match self.params {
            GeneratorParams::Er { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(GenerateError::InvalidParam(format!("er p={p} not in [0,1]")));
                }
            }
            GeneratorParams::Ba { m } => {
                if m == 0 || m >= n {
                    return Err(GenerateError::InvalidParam(format!(
                        "ba m={m} must satisfy 1 <= m < n={n}"
                    )));
                }
            }
            GeneratorParams::Sbm { k, p_in, p_out } => {
                if k == 0 || k > n {
                    return Err(GenerateError::InvalidParam(format!(
                        "sbm k={k} must satisfy 1 <= k <= n={n}"
                    )));
                }
                for (name, p) in [("p_in", p_in), ("p_out", p_out)] {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(GenerateError::InvalidParam(format!(
                            "sbm {name}={p} not in [0,1]"
                        )));
                    }
                }
            }
            GeneratorParams::Sfn { alpha, beta, gamma } => {
                let sum = alpha + beta + gamma;
                if alpha <= 0.0 || beta < 0.0 || gamma < 0.0 || (sum - 1.0).abs() > 1e-9 {
                    return Err(GenerateError::InvalidParam(format!(
                        "sfn mixture ({alpha}, {beta}, {gamma}) must be positive and sum to 1"
                    )));
                }
                if n < 3 {
                    return Err(GenerateError::InvalidParam(format!(
                        "sfn needs n >= 3, got {n}"
                    )));
                }
            }
            GeneratorParams::Star | GeneratorParams::Path | GeneratorParams::Complete => {}
        }
        Ok(())
    }
}

/// Generates the graph for `spec` deterministically from `seed`.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Graph, GenerateError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.n;
    let graph = match spec.params {
        GeneratorParams::Er { p } => {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            Graph::new(n, edges)?
        }
        GeneratorParams::Ba { m } => {
            // Preferential attachment: each new node picks m distinct targets
            // with probability proportional to current degree.
            let mut edges = Vec::new();
            let mut targets: Vec<NodeId> = (0..m).collect();
            let mut repeated: Vec<NodeId> = Vec::new();
            for source in m..n {
                for &t in &targets {
                    edges.push((source, t));
                }
                repeated.extend(&targets);
                repeated.extend(std::iter::repeat_n(source, m));
                let mut next = Vec::new();
                while next.len() < m {
                    let pick = repeated[rng.gen_range(0..repeated.len())];
                    if !next.contains(&pick) {
                        next.push(pick);
                    }
                }
                targets = next;
            }
            Graph::new(n, edges)?
        }
        GeneratorParams::Sbm { k, p_in, p_out } => {
            // Equal-size communities; the remainder goes to the first ones.
            let base = n / k;
            let remainder = n % k;
            let mut community = Vec::with_capacity(n);
            for c in 0..k {
                let size = base + usize::from(c < remainder);
                community.extend(std::iter::repeat_n(c, size));
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    let p = if community[u] == community[v] { p_in } else { p_out };
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            Graph::new(n, edges)?
        }
        GeneratorParams::Sfn { alpha, beta, gamma: _ } => {
            scale_free(n, alpha, beta, &mut rng)?
        }
        GeneratorParams::Star => Graph::new(n, (1..n).map(|v| (0, v)))?,
        GeneratorParams::Path => Graph::new(n, (1..n).map(|v| (v - 1, v)))?,
        GeneratorParams::Complete => {
            Graph::new(n, (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))))?
        }
    };
    Ok(graph)
}

/// Directed preferential-attachment process (in-degree bias 0.2, out-degree
/// bias 0), grown from a 3-cycle and symmetrized to a simple undirected graph.
fn scale_free(n: usize, alpha: f64, beta: f64, rng: &mut ChaCha8Rng) -> Result<Graph, GenerateError> {
    const DELTA_IN: f64 = 0.2;
    const DELTA_OUT: f64 = 0.0;

    let mut nodes: usize = 3.min(n);
    let mut tails: Vec<NodeId> = vec![0, 1, 2];
    let mut heads: Vec<NodeId> = vec![1, 2, 0];
    let mut arcs: Vec<(NodeId, NodeId)> = vec![(0, 1), (1, 2), (2, 0)];

    fn choose(
        candidates: &[NodeId],
        node_count: usize,
        delta: f64,
        rng: &mut ChaCha8Rng,
    ) -> NodeId {
        if delta > 0.0 {
            let bias = node_count as f64 * delta;
            if rng.gen::<f64>() < bias / (bias + candidates.len() as f64) {
                return rng.gen_range(0..node_count);
            }
        }
        candidates[rng.gen_range(0..candidates.len())]
    }

    while nodes < n {
        let r = rng.gen::<f64>();
        let (v, w) = if r < alpha {
            let v = nodes;
            nodes += 1;
            (v, choose(&heads, nodes - 1, DELTA_IN, rng))
        } else if r < alpha + beta {
            let v = choose(&tails, nodes, DELTA_OUT, rng);
            (v, choose(&heads, nodes, DELTA_IN, rng))
        } else {
            let w = nodes;
            nodes += 1;
            (choose(&tails, nodes - 1, DELTA_OUT, rng), w)
        };
        tails.push(v);
        heads.push(w);
        arcs.push((v, w));
    }

    let edges = arcs.into_iter().filter(|(u, v)| u != v);
    Ok(Graph::new(n, edges)?)
}

/// Derives a 64-bit sub-seed from a master seed, a lane label, and lane parts
/// by hashing `master || lane || parts` with SHA-256 (0x1f separators) and
/// reading the first eight digest bytes little-endian.
pub fn derive_seed(master: u64, lane: &str, parts: &[&str]) -> u64 {
    u64::from_le_bytes(derive_digest(master, lane, parts)[..8].try_into().unwrap())
}

fn derive_digest(master: u64, lane: &str, parts: &[&str]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update([0x1f]);
    hasher.update(lane.as_bytes());
    for part in parts {
        hasher.update([0x1f]);
        hasher.update(part.as_bytes());
    }
    hasher.finalize().into()
}

/// Per-graph seed pair `(spec_seed, edge_seed)` for graph `index` of `kind`:
/// bytes 0..8 and 8..16 of `SHA-256(master || "graph" || kind || index)`.
/// The spec seed drives node-count and parameter sampling, the edge seed
/// drives [`generate`], so a stored `(spec, seed)` pair replays exactly.
pub fn graph_seeds(master: u64, kind: GeneratorKind, index: usize) -> (u64, u64) {
    let digest = derive_digest(master, "graph", &[kind.as_str(), &index.to_string()]);
    (
        u64::from_le_bytes(digest[..8].try_into().unwrap()),
        u64::from_le_bytes(digest[8..16].try_into().unwrap()),
    )
}

/// Corpus shape: how many graphs of each kind and the node-count range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    /// Inclusive node-count range each graph samples uniformly from.
    pub node_range: (usize, usize),
    /// Ordered per-kind graph counts.
    pub counts: Vec<(GeneratorKind, usize)>,
    /// Prefix prepended to every graph id (used to keep pools separate).
    pub id_prefix: String,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            node_range: (5, 20),
            counts: vec![
                (GeneratorKind::Er, 500),
                (GeneratorKind::Ba, 500),
                (GeneratorKind::Sbm, 500),
                (GeneratorKind::Sfn, 500),
                (GeneratorKind::Star, 100),
                (GeneratorKind::Path, 100),
                (GeneratorKind::Complete, 100),
            ],
            id_prefix: String::new(),
        }
    }
}

/// One corpus graph with full provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub id: String,
    pub spec: GeneratorSpec,
    pub seed: u64,
    pub graph: Graph,
}

/// An ordered collection of generated graphs with unique ids.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GraphCorpus {
    entries: Vec<CorpusEntry>,
}

impl GraphCorpus {
    pub fn from_entries(entries: Vec<CorpusEntry>) -> Self {
        GraphCorpus { entries }
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Appends another corpus; ids must stay unique (callers use distinct
    /// id prefixes).
    pub fn extend(&mut self, other: GraphCorpus) {
        self.entries.extend(other.entries);
    }
}

/// Samples the node count and kind-specific parameters for one graph.
fn sample_spec(kind: GeneratorKind, node_range: (usize, usize), rng: &mut ChaCha8Rng) -> GeneratorSpec {
    let (lo, hi) = node_range;
    let n = rng.gen_range(lo..=hi);
    let params = match kind {
        GeneratorKind::Er => GeneratorParams::Er { p: rng.gen::<f64>() },
        GeneratorKind::Ba => GeneratorParams::Ba { m: rng.gen_range(1..=5.min(n - 1)) },
        GeneratorKind::Sbm => {
            let k = rng.gen_range(2..=10.min(n));
            let p_in = 0.3 + 0.7 * rng.gen::<f64>();
            let p_out = rng.gen::<f64>() * p_in.min(0.5);
            GeneratorParams::Sbm { k, p_in, p_out }
        }
        GeneratorKind::Sfn => GeneratorParams::Sfn { alpha: 0.41, beta: 0.54, gamma: 0.05 },
        GeneratorKind::Star => GeneratorParams::Star,
        GeneratorKind::Path => GeneratorParams::Path,
        GeneratorKind::Complete => GeneratorParams::Complete,
    };
    GeneratorSpec { n, params }
}

/// Builds the full corpus for `config` deterministically from `master_seed`.
pub fn build_corpus(config: &CorpusConfig, master_seed: u64) -> Result<GraphCorpus, GenerateError> {
    let (lo, hi) = config.node_range;
    if lo == 0 || lo > hi {
        return Err(GenerateError::InvalidParam(format!("bad node range [{lo}, {hi}]")));
    }
    if config.counts.iter().all(|&(_, count)| count == 0) {
        return Err(GenerateError::EmptyCorpus);
    }
    let mut entries = Vec::new();
    for &(kind, count) in &config.counts {
        for index in 0..count {
            let (spec_seed, edge_seed) = graph_seeds(master_seed, kind, index);
            let mut spec_rng = ChaCha8Rng::seed_from_u64(spec_seed);
            let spec = sample_spec(kind, config.node_range, &mut spec_rng);
            let graph = generate(&spec, edge_seed)?;
            entries.push(CorpusEntry {
                id: format!("{}{}-{:04}", config.id_prefix, kind, index),
                spec,
                seed: edge_seed,
                graph,
            });
        }
    }
    Ok(GraphCorpus { entries })
}

/// Corpus record wire shape, one JSON object per line.
#[derive(Serialize, Deserialize)]
struct CorpusRecord {
    id: String,
    kind: GeneratorKind,
    params: serde_json::Value,
    seed: u64,
    n: usize,
    edges: Vec<(NodeId, NodeId)>,
}

/// Serializes a corpus as JSON lines with a fixed key order.
pub fn write_corpus(corpus: &GraphCorpus, out: &mut impl std::io::Write) -> std::io::Result<()> {
    for entry in &corpus.entries {
        let record = CorpusRecord {
            id: entry.id.clone(),
            kind: entry.spec.kind(),
            params: entry.spec.params.to_json(),
            seed: entry.seed,
            n: entry.spec.n,
            edges: entry.graph.edges().collect(),
        };
        serde_json::to_writer(&mut *out, &record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a corpus back from JSON lines, revalidating every graph.
pub fn read_corpus(input: impl std::io::BufRead) -> Result<GraphCorpus, std::io::Error> {
    let mut entries = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let record: CorpusRecord = serde_json::from_str(&line)?;
        let params = GeneratorParams::from_json(record.kind, &record.params)
            .map_err(std::io::Error::other)?;
        let graph = Graph::new(record.n, record.edges).map_err(std::io::Error::other)?;
        entries.push(CorpusEntry {
            id: record.id,
            spec: GeneratorSpec { n: record.n, params },
            seed: record.seed,
            graph,
        });
    }
    Ok(GraphCorpus { entries })
}
