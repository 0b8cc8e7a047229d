//! One declarative TOML document drives every command; flags override file
//! values; the effective result is echoed into the run directory.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use grapheval_core::client::EndpointConfig;
use grapheval_core::encoding::SchemeKind;
use grapheval_core::generate::{CorpusConfig, GeneratorKind};
use grapheval_core::harness::MatrixConfig;
use grapheval_core::prompt::PromptMethod;
use grapheval_core::task::{QuestionStyle, TaskKind};

/// Which completion backend `run` talks to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClientKind {
    /// Answers every case with its golden answer.
    MockOracle,
    /// Answers every case with the task's most common golden answer.
    MockMajority,
    /// Serves responses from the run's recorded transcript; no network.
    Replay,
    /// Live OpenAI-style HTTP endpoint.
    Http,
}

impl ClientKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClientKind::MockOracle => "mock-oracle",
            ClientKind::MockMajority => "mock-majority",
            ClientKind::Replay => "replay",
            ClientKind::Http => "http",
        }
    }

    pub fn parse(s: &str) -> Option<ClientKind> {
        [ClientKind::MockOracle, ClientKind::MockMajority, ClientKind::Replay, ClientKind::Http]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

/// `[corpus]`: evaluation graph counts per generator and the node range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub node_min: usize,
    pub node_max: usize,
    pub er: usize,
    pub ba: usize,
    pub sbm: usize,
    pub sfn: usize,
    pub star: usize,
    pub path: usize,
    pub complete: usize,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection {
            node_min: 5,
            node_max: 20,
            er: 500,
            ba: 500,
            sbm: 500,
            sfn: 500,
            star: 100,
            path: 100,
            complete: 100,
        }
    }
}

impl CorpusSection {
    pub fn count(&self, kind: GeneratorKind) -> usize {
        match kind {
            GeneratorKind::Er => self.er,
            GeneratorKind::Ba => self.ba,
            GeneratorKind::Sbm => self.sbm,
            GeneratorKind::Sfn => self.sfn,
            GeneratorKind::Star => self.star,
            GeneratorKind::Path => self.path,
            GeneratorKind::Complete => self.complete,
        }
    }

    fn counts(&self) -> Vec<(GeneratorKind, usize)> {
        GeneratorKind::ALL
            .into_iter()
            .map(|kind| (kind, self.count(kind)))
            .filter(|&(_, count)| count > 0)
            .collect()
    }
}

/// `[exemplars]`: the held-out pool few-shot prompts draw from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExemplarSection {
    pub er: usize,
    pub ba: usize,
    pub sbm: usize,
    pub sfn: usize,
    pub star: usize,
    pub path: usize,
    pub complete: usize,
    /// Exemplars per few-shot prompt, 1..=8.
    pub k: usize,
    /// Draw exemplars across all generator kinds.
    pub cross_generator: bool,
}

impl Default for ExemplarSection {
    fn default() -> Self {
        ExemplarSection {
            er: 8,
            ba: 8,
            sbm: 8,
            sfn: 8,
            star: 4,
            path: 4,
            complete: 4,
            k: 2,
            cross_generator: false,
        }
    }
}

impl ExemplarSection {
    pub fn count(&self, kind: GeneratorKind) -> usize {
        match kind {
            GeneratorKind::Er => self.er,
            GeneratorKind::Ba => self.ba,
            GeneratorKind::Sbm => self.sbm,
            GeneratorKind::Sfn => self.sfn,
            GeneratorKind::Star => self.star,
            GeneratorKind::Path => self.path,
            GeneratorKind::Complete => self.complete,
        }
    }

    fn counts(&self) -> Vec<(GeneratorKind, usize)> {
        GeneratorKind::ALL
            .into_iter()
            .map(|kind| (kind, self.count(kind)))
            .filter(|&(_, count)| count > 0)
            .collect()
    }
}

/// `[matrix]`: which cells of the cross product to evaluate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatrixSection {
    pub schemes: Vec<SchemeKind>,
    pub methods: Vec<PromptMethod>,
    pub tasks: Vec<TaskKind>,
    pub generators: Vec<GeneratorKind>,
    pub style: QuestionStyle,
    pub multirel: bool,
    pub per_task_limit: Option<usize>,
    pub parse_number_words: bool,
}

impl Default for MatrixSection {
    fn default() -> Self {
        MatrixSection {
            schemes: grapheval_core::encoding::list_schemes().to_vec(),
            methods: PromptMethod::ALL.to_vec(),
            tasks: TaskKind::ALL.to_vec(),
            generators: GeneratorKind::ALL.to_vec(),
            style: QuestionStyle::Graph,
            multirel: false,
            per_task_limit: None,
            parse_number_words: false,
        }
    }
}

/// `[client]`: backend kind, worker count, and the default endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClientSection {
    pub kind: ClientKind,
    pub threads: usize,
    /// Endpoint used when `kind = "http"` and no `[[models]]` are listed.
    pub endpoint: EndpointConfig,
}

impl Default for ClientSection {
    fn default() -> Self {
        ClientSection {
            kind: ClientKind::MockOracle,
            threads: 4,
            endpoint: EndpointConfig::default(),
        }
    }
}

/// The whole run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed; every other random stream is derived from it.
    pub seed: u64,
    /// Run directory all artifacts are written to.
    pub out: PathBuf,
    pub corpus: CorpusSection,
    pub exemplars: ExemplarSection,
    pub matrix: MatrixSection,
    pub client: ClientSection,
    /// Extra HTTP endpoints for multi-model runs.
    pub models: Vec<EndpointConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            out: PathBuf::from("run"),
            corpus: CorpusSection::default(),
            exemplars: ExemplarSection::default(),
            matrix: MatrixSection::default(),
            client: ClientSection::default(),
            models: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.corpus.node_min < 2 {
            bail!("corpus node_min must be at least 2, got {}", self.corpus.node_min);
        }
        if self.corpus.node_min > self.corpus.node_max {
            bail!(
                "corpus node range is empty: node_min {} > node_max {}",
                self.corpus.node_min,
                self.corpus.node_max
            );
        }
        if self.corpus.counts().is_empty() {
            bail!("empty corpus: every generator count is zero");
        }
        if !(1..=8).contains(&self.exemplars.k) {
            bail!("exemplars.k must be in 1..=8, got {}", self.exemplars.k);
        }
        if self.client.threads == 0 {
            bail!("client.threads must be at least 1");
        }
        Ok(())
    }

    pub fn corpus_config(&self) -> CorpusConfig {
        CorpusConfig {
            node_range: (self.corpus.node_min, self.corpus.node_max),
            counts: self.corpus.counts(),
            id_prefix: String::new(),
        }
    }

    pub fn exemplar_corpus_config(&self) -> CorpusConfig {
        CorpusConfig {
            node_range: (self.corpus.node_min, self.corpus.node_max),
            counts: self.exemplars.counts(),
            id_prefix: "ex-".to_string(),
        }
    }

    pub fn matrix_config(&self, models: Vec<String>) -> MatrixConfig {
        MatrixConfig {
            models,
            schemes: self.matrix.schemes.clone(),
            methods: self.matrix.methods.clone(),
            tasks: self.matrix.tasks.clone(),
            generators: self.matrix.generators.clone(),
            style: self.matrix.style,
            multirel: self.matrix.multirel,
            k: self.exemplars.k,
            cross_generator: self.exemplars.cross_generator,
            per_task_limit: self.matrix.per_task_limit,
            parse_number_words: self.matrix.parse_number_words,
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string_pretty(self)?)
    }
}
