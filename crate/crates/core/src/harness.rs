//! Experiment matrix construction, concurrent case execution, exact-count
//! scoring, and aggregation into the accuracy tables.
//!
//! A case is one (model, scheme, method, instance) cell of the cross
//! product. Accuracies are kept as exact correct/total counts and only
//! rendered to one decimal at the edges.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::client::{prompt_hash, CaseMeta, ClientError, CompletionRequest, TextCompletion};
use crate::encoding::{
    encode_graph, encode_graph_multirel, EncodingError, SchemeKind,
};
use crate::generate::{derive_seed, GeneratorKind, GraphCorpus};
use crate::graph::Answer;
use crate::prompt::{
    build_exemplar, build_prompt, sample_exemplars, ExemplarKey, PromptBundle, PromptError,
    PromptMethod,
};
use crate::task::{
    instance_kind, parse_answer, question_text, score, ParseContext, ParseOptions, QuestionStyle,
    TaskError, TaskInstance, TaskKind,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no {0} selected")]
    EmptySelection(&'static str),
    #[error("k must be in 1..=8, got {0}")]
    InvalidK(usize),
    #[error("{style} questions are not defined for the {scheme} scheme")]
    StyleUnsupported { style: QuestionStyle, scheme: SchemeKind },
    #[error("instance {0} was generated under a different question style")]
    StyleMismatch(String),
    #[error("unknown instance {0}")]
    UnknownInstance(String),
    #[error("unknown graph {0}")]
    UnknownGraph(String),
    #[error("no prompt built for case {0}")]
    MissingPrompt(String),
    #[error("case {case} is for model {case_model}, client serves {client_model}")]
    ModelMismatch { case: String, case_model: String, client_model: String },
    #[error("all {0} cases failed")]
    AllCasesFailed(usize),
    #[error("malformed case id {0}")]
    BadCaseId(String),
    #[error("method {method} is missing scheme cells for task {task}")]
    MissingCells { method: PromptMethod, task: TaskKind },
    #[error("{0}")]
    Prompt(#[from] PromptError),
    #[error("{0}")]
    Task(#[from] TaskError),
    #[error("{0}")]
    Encoding(#[from] EncodingError),
    #[error("{0}")]
    Client(#[from] ClientError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

/// Which cells of the cross product to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixConfig {
    pub models: Vec<String>,
    pub schemes: Vec<SchemeKind>,
    pub methods: Vec<PromptMethod>,
    pub tasks: Vec<TaskKind>,
    pub generators: Vec<GeneratorKind>,
    pub style: QuestionStyle,
    /// Vary the relation phrase per edge in friendship-family schemes.
    pub multirel: bool,
    /// Exemplars per few-shot prompt.
    pub k: usize,
    /// Draw exemplars across all generator kinds instead of matching the
    /// eval graph's kind.
    pub cross_generator: bool,
    /// Cap on instances per task, in corpus order; `None` runs all.
    pub per_task_limit: Option<usize>,
    /// Accept spelled-out numbers ("five") when parsing count answers.
    pub parse_number_words: bool,
}

impl Default for MatrixConfig {
    fn default() -> Self {
        MatrixConfig {
            models: vec!["mock-oracle".to_string()],
            schemes: crate::encoding::list_schemes().to_vec(),
            methods: PromptMethod::ALL.to_vec(),
            tasks: TaskKind::ALL.to_vec(),
            generators: GeneratorKind::ALL.to_vec(),
            style: QuestionStyle::Graph,
            multirel: false,
            k: 2,
            cross_generator: false,
            per_task_limit: None,
            parse_number_words: false,
        }
    }
}

impl MatrixConfig {
    pub fn parse_options(&self) -> ParseOptions {
        ParseOptions { number_words: self.parse_number_words }
    }
}

/// One evaluation cell: a concrete (model, scheme, method, instance).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalCase {
    pub case_id: String,
    pub model: String,
    pub scheme: SchemeKind,
    pub method: PromptMethod,
    pub instance_id: String,
}

impl EvalCase {
    fn new(model: &str, scheme: SchemeKind, method: PromptMethod, instance_id: &str) -> EvalCase {
        EvalCase {
            case_id: format!("{model}/{scheme}/{method}/{instance_id}"),
            model: model.to_string(),
            scheme,
            method,
            instance_id: instance_id.to_string(),
        }
    }
}

/// A case id split back into its parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParsedCaseId<'a> {
    pub model: &'a str,
    pub scheme: SchemeKind,
    pub method: PromptMethod,
    pub instance_id: &'a str,
}

/// Splits `{model}/{scheme}/{method}/{instance_id}`; the model part may
/// itself contain slashes.
pub fn parse_case_id(case_id: &str) -> Option<ParsedCaseId<'_>> {
    let mut parts = case_id.rsplitn(4, '/');
    let instance_id = parts.next()?;
    let method = PromptMethod::parse(parts.next()?)?;
    let scheme = SchemeKind::parse(parts.next()?)?;
    let model = parts.next()?;
    if model.is_empty() || instance_id.is_empty() {
        return None;
    }
    Some(ParsedCaseId { model, scheme, method, instance_id })
}

fn validate_config(config: &MatrixConfig) -> Result<(), HarnessError> {
    if config.models.is_empty() {
        return Err(HarnessError::EmptySelection("models"));
    }
    if config.schemes.is_empty() {
        return Err(HarnessError::EmptySelection("schemes"));
    }
    if config.methods.is_empty() {
        return Err(HarnessError::EmptySelection("methods"));
    }
    if config.tasks.is_empty() {
        return Err(HarnessError::EmptySelection("tasks"));
    }
    if config.generators.is_empty() {
        return Err(HarnessError::EmptySelection("generators"));
    }
    if !(1..=8).contains(&config.k) {
        return Err(HarnessError::InvalidK(config.k));
    }
    if config.style == QuestionStyle::Application {
        for &scheme in &config.schemes {
            if matches!(
                scheme,
                SchemeKind::Adjacency | SchemeKind::Incident | SchemeKind::Expert
            ) {
                return Err(HarnessError::StyleUnsupported { style: config.style, scheme });
            }
        }
    }
    Ok(())
}

/// Expands the config into the ordered case list: models outermost, then
/// (scheme, method, task, instance id) in config and corpus order.
pub fn build_matrix(
    config: &MatrixConfig,
    corpus: &GraphCorpus,
    instances: &[TaskInstance],
) -> Result<Vec<EvalCase>, HarnessError> {
    validate_config(config)?;
    let mut selected: Vec<Vec<&TaskInstance>> = Vec::with_capacity(config.tasks.len());
    for &task in &config.tasks {
        let mut pool = Vec::new();
        for instance in instances.iter().filter(|i| i.kind == task) {
            let entry = corpus
                .get(&instance.graph_id)
                .ok_or_else(|| HarnessError::UnknownGraph(instance.graph_id.clone()))?;
            if !config.generators.contains(&entry.spec.kind()) {
                continue;
            }
            if instance.style != config.style {
                return Err(HarnessError::StyleMismatch(instance.id.clone()));
            }
            pool.push(instance);
            if config.per_task_limit.is_some_and(|limit| pool.len() >= limit) {
                break;
            }
        }
        selected.push(pool);
    }
    let mut cases = Vec::new();
    for model in &config.models {
        for &scheme in &config.schemes {
            for &method in &config.methods {
                for pool in &selected {
                    for instance in pool {
                        cases.push(EvalCase::new(model, scheme, method, &instance.id));
                    }
                }
            }
        }
    }
    Ok(cases)
}

/// All prompt bundles for a run, keyed by (scheme, method, instance id);
/// prompts never depend on the model.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct PromptSet {
    bundles: HashMap<(SchemeKind, PromptMethod, String), PromptBundle>,
    order: Vec<(SchemeKind, PromptMethod, String)>,
}

impl PromptSet {
    pub fn from_bundles(bundles: Vec<PromptBundle>) -> PromptSet {
        let mut set = PromptSet::default();
        for bundle in bundles {
            set.insert(bundle);
        }
        set
    }

    fn insert(&mut self, bundle: PromptBundle) {
        let key = (bundle.scheme, bundle.method, bundle.instance_id.clone());
        if self.bundles.insert(key.clone(), bundle).is_none() {
            self.order.push(key);
        }
    }

    pub fn get(
        &self,
        scheme: SchemeKind,
        method: PromptMethod,
        instance_id: &str,
    ) -> Option<&PromptBundle> {
        self.bundles.get(&(scheme, method, instance_id.to_string()))
    }

    /// Bundles in first-built order.
    pub fn bundles(&self) -> impl Iterator<Item = &PromptBundle> {
        self.order.iter().map(|key| &self.bundles[key])
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Everything prompt assembly draws on.
pub struct PromptInputs<'a> {
    pub corpus: &'a GraphCorpus,
    pub instances: &'a [TaskInstance],
    pub exemplar_corpus: &'a GraphCorpus,
    pub exemplar_instances: &'a [TaskInstance],
    pub master_seed: u64,
    pub multirel: bool,
    pub k: usize,
    pub cross_generator: bool,
}

struct EncodingCache<'a> {
    corpus: &'a GraphCorpus,
    exemplar_corpus: &'a GraphCorpus,
    multirel: bool,
    master_seed: u64,
    texts: HashMap<(SchemeKind, String), String>,
}

impl<'a> EncodingCache<'a> {
    fn entry(&self, graph_id: &str) -> Result<&'a crate::generate::CorpusEntry, HarnessError> {
        self.corpus
            .get(graph_id)
            .or_else(|| self.exemplar_corpus.get(graph_id))
            .ok_or_else(|| HarnessError::UnknownGraph(graph_id.to_string()))
    }

    fn text(&mut self, scheme: SchemeKind, graph_id: &str) -> Result<String, HarnessError> {
        let key = (scheme, graph_id.to_string());
        if let Some(text) = self.texts.get(&key) {
            return Ok(text.clone());
        }
        let graph = &self.entry(graph_id)?.graph;
        let text = if self.multirel && scheme.is_friendship_family() {
            let seed = derive_seed(self.master_seed, "multirel", &[graph_id]);
            encode_graph_multirel(scheme, graph, seed)?
        } else {
            encode_graph(scheme, graph)?
        };
        self.texts.insert(key, text.clone());
        Ok(text)
    }
}

/// Builds every distinct prompt the case list needs. Exemplar picks are
/// seeded per (scheme, method, instance), so prompts are identical across
/// models and across runs.
pub fn build_prompts(
    cases: &[EvalCase],
    inputs: &PromptInputs,
) -> Result<PromptSet, HarnessError> {
    let instance_by_id: HashMap<&str, &TaskInstance> =
        inputs.instances.iter().map(|i| (i.id.as_str(), i)).collect();
    let exemplar_by_index: Vec<&TaskInstance> = inputs.exemplar_instances.iter().collect();
    let mut pool_keys = Vec::with_capacity(exemplar_by_index.len());
    for instance in &exemplar_by_index {
        let entry = inputs
            .exemplar_corpus
            .get(&instance.graph_id)
            .ok_or_else(|| HarnessError::UnknownGraph(instance.graph_id.clone()))?;
        pool_keys.push(ExemplarKey { task: instance.kind, generator: entry.spec.kind() });
    }
    let mut cache = EncodingCache {
        corpus: inputs.corpus,
        exemplar_corpus: inputs.exemplar_corpus,
        multirel: inputs.multirel,
        master_seed: inputs.master_seed,
        texts: HashMap::new(),
    };

    let mut set = PromptSet::default();
    for case in cases {
        if set.get(case.scheme, case.method, &case.instance_id).is_some() {
            continue;
        }
        let instance = instance_by_id
            .get(case.instance_id.as_str())
            .ok_or_else(|| HarnessError::UnknownInstance(case.instance_id.clone()))?;
        let encoding = cache.text(case.scheme, &instance.graph_id)?;
        let question =
            question_text(instance.kind, instance.params, instance.style, case.scheme)?;

        let mut exemplars = Vec::new();
        if case.method.wants_exemplars() {
            let generator = if inputs.cross_generator {
                None
            } else {
                Some(cache.entry(&instance.graph_id)?.spec.kind())
            };
            let seed = derive_seed(
                inputs.master_seed,
                "exemplar-pick",
                &[case.scheme.as_str(), case.method.as_str(), &case.instance_id],
            );
            let picks = sample_exemplars(&pool_keys, instance.kind, generator, inputs.k, seed)?;
            for index in picks {
                let exemplar_instance = exemplar_by_index[index];
                let entry = cache.entry(&exemplar_instance.graph_id)?;
                let exemplar_encoding = cache.text(case.scheme, &exemplar_instance.graph_id)?;
                let exemplar_question = question_text(
                    exemplar_instance.kind,
                    exemplar_instance.params,
                    exemplar_instance.style,
                    case.scheme,
                )?;
                exemplars.push(build_exemplar(
                    exemplar_instance,
                    &entry.graph,
                    case.scheme,
                    exemplar_encoding,
                    exemplar_question,
                )?);
            }
        }
        set.insert(build_prompt(
            case.method,
            case.scheme,
            &case.instance_id,
            &encoding,
            &question,
            &exemplars,
        )?);
    }
    Ok(set)
}

/// One scored case as stored in `records.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub case_id: String,
    pub prompt_hash: String,
    pub response: String,
    pub parsed: Option<Answer>,
    pub score: u8,
    pub unparseable: bool,
}

/// Everything `run_cases` needs besides the client.
pub struct RunInputs<'a> {
    pub cases: &'a [EvalCase],
    pub prompts: &'a PromptSet,
    pub instances: &'a [TaskInstance],
    pub corpus: &'a GraphCorpus,
    pub options: ParseOptions,
    pub threads: usize,
}

/// A finished run: records in case order plus how many cases hit a client
/// error (those records carry an empty response and score 0).
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub records: Vec<EvalRecord>,
    pub client_failures: usize,
}

/// Runs every case against the client, parsing and scoring each response.
/// Client failures score 0 on that case; only a fully failed run is an
/// error. Records come back in case order.
pub fn run_cases(
    inputs: &RunInputs,
    client: &dyn TextCompletion,
) -> Result<RunOutcome, HarnessError> {
    let instance_by_id: HashMap<&str, &TaskInstance> =
        inputs.instances.iter().map(|i| (i.id.as_str(), i)).collect();
    for case in inputs.cases {
        if case.model != client.model_name() {
            return Err(HarnessError::ModelMismatch {
                case: case.case_id.clone(),
                case_model: case.model.clone(),
                client_model: client.model_name().to_string(),
            });
        }
        if inputs.prompts.get(case.scheme, case.method, &case.instance_id).is_none() {
            return Err(HarnessError::MissingPrompt(case.case_id.clone()));
        }
        let instance = instance_by_id
            .get(case.instance_id.as_str())
            .ok_or_else(|| HarnessError::UnknownInstance(case.instance_id.clone()))?;
        if inputs.corpus.get(&instance.graph_id).is_none() {
            return Err(HarnessError::UnknownGraph(instance.graph_id.clone()));
        }
    }

    let next = AtomicUsize::new(0);
    let failures = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<EvalRecord>>> = Mutex::new(vec![None; inputs.cases.len()]);
    let workers = inputs.threads.max(1).min(inputs.cases.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, AtomicOrdering::SeqCst);
                let Some(case) = inputs.cases.get(i) else { break };
                let bundle = inputs
                    .prompts
                    .get(case.scheme, case.method, &case.instance_id)
                    .expect("prompts validated");
                let instance = instance_by_id[case.instance_id.as_str()];
                let n = inputs.corpus.get(&instance.graph_id).expect("graphs validated").graph
                    .node_count();
                let request = CompletionRequest {
                    prompt: &bundle.prompt,
                    meta: Some(CaseMeta { instance_id: &case.instance_id, scheme: case.scheme }),
                };
                let record = match client.complete(&request) {
                    Ok(completion) => {
                        let ctx = ParseContext {
                            scheme: case.scheme,
                            n,
                            query_node: instance.params.query_node(),
                            options: inputs.options,
                        };
                        let parsed = parse_answer(instance.kind, &completion.text, &ctx);
                        let correct = score(parsed.as_ref(), &instance.golden);
                        EvalRecord {
                            case_id: case.case_id.clone(),
                            prompt_hash: prompt_hash(&bundle.prompt),
                            response: completion.text,
                            unparseable: parsed.is_none(),
                            parsed,
                            score: correct as u8,
                        }
                    }
                    Err(err) => {
                        eprintln!("case {} failed: {err}", case.case_id);
                        failures.fetch_add(1, AtomicOrdering::SeqCst);
                        EvalRecord {
                            case_id: case.case_id.clone(),
                            prompt_hash: prompt_hash(&bundle.prompt),
                            response: String::new(),
                            parsed: None,
                            score: 0,
                            unparseable: true,
                        }
                    }
                };
                slots.lock().unwrap()[i] = Some(record);
            });
        }
    });

    let failed = failures.load(AtomicOrdering::SeqCst);
    if !inputs.cases.is_empty() && failed == inputs.cases.len() {
        return Err(HarnessError::AllCasesFailed(failed));
    }
    let records = slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("every case produced a record"))
        .collect();
    Ok(RunOutcome { records, client_failures: failed })
}

/// Exact accuracy as a correct/total count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accuracy {
    pub correct: u64,
    pub total: u64,
}

impl Accuracy {
    pub fn record(&mut self, correct: bool) {
        self.correct += correct as u64;
        self.total += 1;
    }

    pub fn percent(self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.correct as f64 / self.total as f64
        }
    }

    /// Exact comparison by cross-multiplication; no float rounding.
    pub fn ratio_cmp(self, other: Accuracy) -> Ordering {
        (self.correct as u128 * other.total as u128)
            .cmp(&(other.correct as u128 * self.total as u128))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeAccuracy {
    pub scheme: SchemeKind,
    pub accuracy: Accuracy,
}

/// One (model, method, task) cell: per-scheme accuracies plus their mean
/// and best-minus-worst spread in percentage points.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodTaskCell {
    pub model: String,
    pub method: PromptMethod,
    pub task: TaskKind,
    pub schemes: Vec<SchemeAccuracy>,
    pub mean_percent: f64,
    pub spread_percent: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorCell {
    pub model: String,
    pub method: PromptMethod,
    pub task: TaskKind,
    pub generator: GeneratorKind,
    pub accuracy: Accuracy,
}

/// How often the most frequent golden answer for a task is right.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorityCell {
    pub task: TaskKind,
    pub answer: Answer,
    pub accuracy: Accuracy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankCell {
    pub model: String,
    pub method: PromptMethod,
    pub scheme: SchemeKind,
    pub average_rank: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AggregateReport {
    pub cells: Vec<MethodTaskCell>,
    pub generators: Vec<GeneratorCell>,
    pub majority: Vec<MajorityCell>,
    /// Filled when every (model, method) has full scheme × task coverage.
    pub ranks: Vec<RankCell>,
}

pub struct AggregateInputs<'a> {
    pub records: &'a [EvalRecord],
    pub instances: &'a [TaskInstance],
    pub corpus: &'a GraphCorpus,
}

/// Folds records into per-cell accuracies, μ/δ summaries, generator
/// breakdowns, and majority baselines. Output is independent of record
/// order: models sort lexicographically, everything else follows registry
/// order.
pub fn aggregate(inputs: &AggregateInputs) -> Result<AggregateReport, HarnessError> {
    let instance_by_id: HashMap<&str, &TaskInstance> =
        inputs.instances.iter().map(|i| (i.id.as_str(), i)).collect();

    let mut scheme_counts: HashMap<(String, PromptMethod, TaskKind, SchemeKind), Accuracy> =
        HashMap::new();
    let mut generator_counts: HashMap<(String, PromptMethod, TaskKind, GeneratorKind), Accuracy> =
        HashMap::new();
    let mut models: Vec<String> = Vec::new();
    let mut seen_instances: HashMap<TaskKind, HashMap<&str, &Answer>> = HashMap::new();

    for record in inputs.records {
        let parsed_id = parse_case_id(&record.case_id)
            .ok_or_else(|| HarnessError::BadCaseId(record.case_id.clone()))?;
        let instance = instance_by_id
            .get(parsed_id.instance_id)
            .ok_or_else(|| HarnessError::UnknownInstance(parsed_id.instance_id.to_string()))?;
        let entry = inputs
            .corpus
            .get(&instance.graph_id)
            .ok_or_else(|| HarnessError::UnknownGraph(instance.graph_id.clone()))?;
        let correct = record.score != 0;
        scheme_counts
            .entry((
                parsed_id.model.to_string(),
                parsed_id.method,
                instance.kind,
                parsed_id.scheme,
            ))
            .or_default()
            .record(correct);
        generator_counts
            .entry((
                parsed_id.model.to_string(),
                parsed_id.method,
                instance.kind,
                entry.spec.kind(),
            ))
            .or_default()
            .record(correct);
        if !models.iter().any(|m| m == parsed_id.model) {
            models.push(parsed_id.model.to_string());
        }
        seen_instances
            .entry(instance.kind)
            .or_default()
            .insert(&instance.id, &instance.golden);
    }
    models.sort();

    let mut cells = Vec::new();
    let mut generators = Vec::new();
    for model in &models {
        for method in PromptMethod::ALL {
            for task in TaskKind::ALL {
                let mut schemes = Vec::new();
                for scheme in crate::encoding::list_schemes() {
                    let key = (model.clone(), method, task, scheme);
                    if let Some(&accuracy) = scheme_counts.get(&key) {
                        schemes.push(SchemeAccuracy { scheme, accuracy });
                    }
                }
                if !schemes.is_empty() {
                    let mean_percent = schemes.iter().map(|s| s.accuracy.percent()).sum::<f64>()
                        / schemes.len() as f64;
                    let best = schemes
                        .iter()
                        .map(|s| s.accuracy)
                        .max_by(|a, b| a.ratio_cmp(*b))
                        .unwrap();
                    let worst = schemes
                        .iter()
                        .map(|s| s.accuracy)
                        .min_by(|a, b| a.ratio_cmp(*b))
                        .unwrap();
                    cells.push(MethodTaskCell {
                        model: model.clone(),
                        method,
                        task,
                        schemes,
                        mean_percent,
                        spread_percent: best.percent() - worst.percent(),
                    });
                }
                for generator in GeneratorKind::ALL {
                    let key = (model.clone(), method, task, generator);
                    if let Some(&accuracy) = generator_counts.get(&key) {
                        generators.push(GeneratorCell {
                            model: model.clone(),
                            method,
                            task,
                            generator,
                            accuracy,
                        });
                    }
                }
            }
        }
    }

    let mut majority = Vec::new();
    for task in TaskKind::ALL {
        let Some(goldens) = seen_instances.get(&task) else { continue };
        let answers: Vec<Answer> = goldens.values().map(|&a| a.clone()).collect();
        if let Some((answer, matches)) = crate::task::majority_baseline(&answers) {
            majority.push(MajorityCell {
                task,
                accuracy: Accuracy { correct: matches as u64, total: answers.len() as u64 },
                answer,
            });
        }
    }

    let mut report = AggregateReport { cells, generators, majority, ranks: Vec::new() };
    report.ranks = rank_encoders(&report).unwrap_or_default();
    Ok(report)
}

/// Per (model, method): each scheme's rank averaged over tasks, rank 1
/// best, ties getting the mean of their tied ranks. Needs every task cell
/// of the method to cover the same scheme set.
pub fn rank_encoders(report: &AggregateReport) -> Result<Vec<RankCell>, HarnessError> {
    let mut groups: Vec<(&str, PromptMethod, Vec<&MethodTaskCell>)> = Vec::new();
    for cell in &report.cells {
        match groups
            .iter_mut()
            .find(|(model, method, _)| *model == cell.model && *method == cell.method)
        {
            Some((_, _, cells)) => cells.push(cell),
            None => groups.push((&cell.model, cell.method, vec![cell])),
        }
    }

    let mut ranks = Vec::new();
    for (model, method, cells) in groups {
        let schemes: Vec<SchemeKind> = cells[0].schemes.iter().map(|s| s.scheme).collect();
        for cell in &cells {
            let here: Vec<SchemeKind> = cell.schemes.iter().map(|s| s.scheme).collect();
            if here != schemes {
                return Err(HarnessError::MissingCells { method, task: cell.task });
            }
        }
        let mut totals = vec![0.0f64; schemes.len()];
        for cell in &cells {
            let mut order: Vec<usize> = (0..schemes.len()).collect();
            order.sort_by(|&a, &b| {
                cell.schemes[b].accuracy.ratio_cmp(cell.schemes[a].accuracy)
            });
            let mut start = 0;
            while start < order.len() {
                let mut end = start + 1;
                while end < order.len()
                    && cell.schemes[order[end]]
                        .accuracy
                        .ratio_cmp(cell.schemes[order[start]].accuracy)
                        == Ordering::Equal
                {
                    end += 1;
                }
                let mean_rank = (start + end + 1) as f64 / 2.0;
                for &index in &order[start..end] {
                    totals[index] += mean_rank;
                }
                start = end;
            }
        }
        for (index, &scheme) in schemes.iter().enumerate() {
            ranks.push(RankCell {
                model: model.to_string(),
                method,
                scheme,
                average_rank: totals[index] / cells.len() as f64,
            });
        }
    }
    Ok(ranks)
}

fn pad(text: &str, width: usize) -> String {
    format!("{text:<width$}")
}

/// The grid: per (model, method) a table with tasks as columns, an overall
/// μ/δ row, and one row per scheme; then majority, generator, and rank
/// sections. Rendering is pure, so equal reports give equal bytes.
pub fn render_table(report: &AggregateReport) -> String {
    let mut out = String::new();
    let mut blocks: Vec<(&str, PromptMethod)> = Vec::new();
    for cell in &report.cells {
        if !blocks.contains(&(cell.model.as_str(), cell.method)) {
            blocks.push((cell.model.as_str(), cell.method));
        }
    }

    for (model, method) in &blocks {
        let cells: Vec<&MethodTaskCell> = report
            .cells
            .iter()
            .filter(|c| c.model == *model && c.method == *method)
            .collect();
        let mut schemes: Vec<SchemeKind> = Vec::new();
        for cell in &cells {
            for s in &cell.schemes {
                if !schemes.contains(&s.scheme) {
                    schemes.push(s.scheme);
                }
            }
        }
        out.push_str(&format!("model: {model} | method: {method}\n"));

        let overall_label = "overall (mu / delta)";
        let mut label_width = overall_label.len().max("scheme".len());
        for scheme in &schemes {
            label_width = label_width.max(scheme.as_str().len());
        }
        let mut columns: Vec<(String, Vec<String>)> = Vec::new();
        for cell in &cells {
            let mut rows = Vec::with_capacity(schemes.len() + 1);
            rows.push(format!("{:.1} / {:.1}", cell.mean_percent, cell.spread_percent));
            for scheme in &schemes {
                match cell.schemes.iter().find(|s| s.scheme == *scheme) {
                    Some(s) => rows.push(format!("{:.1}", s.accuracy.percent())),
                    None => rows.push("-".to_string()),
                }
            }
            columns.push((cell.task.to_string(), rows));
        }
        let widths: Vec<usize> = columns
            .iter()
            .map(|(header, rows)| {
                rows.iter().map(String::len).max().unwrap_or(0).max(header.len())
            })
            .collect();

        out.push_str(&pad("scheme", label_width));
        for ((header, _), width) in columns.iter().zip(&widths) {
            out.push_str("  ");
            out.push_str(&pad(header, *width));
        }
        out.push('\n');
        for (row_index, label) in std::iter::once(overall_label)
            .chain(schemes.iter().map(|s| s.as_str()))
            .enumerate()
        {
            out.push_str(&pad(label, label_width));
            for ((_, rows), width) in columns.iter().zip(&widths) {
                out.push_str("  ");
                out.push_str(&pad(&rows[row_index], *width));
            }
            out.push('\n');
        }
        out.push('\n');
    }

    if !report.majority.is_empty() {
        out.push_str("majority baselines\n");
        for cell in &report.majority {
            out.push_str(&format!(
                "{}: {:.1} ({}/{})\n",
                cell.task,
                cell.accuracy.percent(),
                cell.accuracy.correct,
                cell.accuracy.total
            ));
        }
        out.push('\n');
    }

    if !report.generators.is_empty() {
        out.push_str("generator breakdown\n");
        for cell in &report.generators {
            out.push_str(&format!(
                "{} | {} | {} | {}: {:.1} ({}/{})\n",
                cell.model,
                cell.method,
                cell.task,
                cell.generator,
                cell.accuracy.percent(),
                cell.accuracy.correct,
                cell.accuracy.total
            ));
        }
        out.push('\n');
    }

    if !report.ranks.is_empty() {
        out.push_str("average encoder ranks\n");
        for cell in &report.ranks {
            out.push_str(&format!(
                "{} | {} | {}: {:.2}\n",
                cell.model, cell.method, cell.scheme, cell.average_rank
            ));
        }
        out.push('\n');
    }
    out
}

/// Flat per-cell rows: `model,method,task,scheme,correct,total,accuracy`.
pub fn render_csv(report: &AggregateReport) -> String {
    let mut out = String::from("model,method,task,scheme,correct,total,accuracy\n");
    for cell in &report.cells {
        for s in &cell.schemes {
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.1}\n",
                cell.model,
                cell.method,
                cell.task,
                s.scheme,
                s.accuracy.correct,
                s.accuracy.total,
                s.accuracy.percent()
            ));
        }
    }
    out
}

/// One audit discrepancy, human-readable.
#[derive(Clone, Debug, PartialEq)]
pub struct AuditMismatch {
    pub case_id: String,
    pub detail: String,
}

pub struct AuditInputs<'a> {
    pub records: &'a [EvalRecord],
    pub instances: &'a [TaskInstance],
    pub corpus: &'a GraphCorpus,
    pub options: ParseOptions,
    /// When given, each record's prompt hash is checked against its bundle.
    pub prompts: Option<&'a PromptSet>,
}

/// Re-derives parse, score, and unparseable for every record from the raw
/// response and golden answer, returning any disagreements with the stored
/// fields.
pub fn audit_records(inputs: &AuditInputs) -> Result<Vec<AuditMismatch>, HarnessError> {
    let instance_by_id: HashMap<&str, &TaskInstance> =
        inputs.instances.iter().map(|i| (i.id.as_str(), i)).collect();
    let mut mismatches = Vec::new();
    for record in inputs.records {
        let parsed_id = parse_case_id(&record.case_id)
            .ok_or_else(|| HarnessError::BadCaseId(record.case_id.clone()))?;
        let instance = instance_by_id
            .get(parsed_id.instance_id)
            .ok_or_else(|| HarnessError::UnknownInstance(parsed_id.instance_id.to_string()))?;
        let entry = inputs
            .corpus
            .get(&instance.graph_id)
            .ok_or_else(|| HarnessError::UnknownGraph(instance.graph_id.clone()))?;
        let mut push = |detail: String| {
            mismatches.push(AuditMismatch { case_id: record.case_id.clone(), detail });
        };

        let ctx = ParseContext {
            scheme: parsed_id.scheme,
            n: entry.graph.node_count(),
            query_node: instance.params.query_node(),
            options: inputs.options,
        };
        let parsed = parse_answer(instance.kind, &record.response, &ctx);
        let expected_score = score(parsed.as_ref(), &instance.golden) as u8;
        if parsed != record.parsed {
            push(format!("parsed {:?}, recomputed {:?}", record.parsed, parsed));
        }
        if expected_score != record.score {
            push(format!("score {}, recomputed {}", record.score, expected_score));
        }
        if parsed.is_none() != record.unparseable {
            push(format!(
                "unparseable {}, recomputed {}",
                record.unparseable,
                parsed.is_none()
            ));
        }
        if let Some(prompts) = inputs.prompts {
            match prompts.get(parsed_id.scheme, parsed_id.method, parsed_id.instance_id) {
                Some(bundle) => {
                    let expected_hash = prompt_hash(&bundle.prompt);
                    if expected_hash != record.prompt_hash {
                        push(format!(
                            "prompt hash {}, bundle hashes to {}",
                            record.prompt_hash, expected_hash
                        ));
                    }
                }
                None => push("no prompt bundle for this case".to_string()),
            }
        }
    }
    Ok(mismatches)
}

/// Writes records as JSONL with fixed key order.
pub fn write_records(
    records: &[EvalRecord],
    out: &mut impl Write,
) -> Result<(), HarnessError> {
    for record in records {
        serde_json::to_writer(&mut *out, record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records(input: impl BufRead) -> Result<Vec<EvalRecord>, HarnessError> {
    let mut records = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

/// Writes prompt bundles as JSONL with fixed key order.
pub fn write_prompts(prompts: &PromptSet, out: &mut impl Write) -> Result<(), HarnessError> {
    for bundle in prompts.bundles() {
        serde_json::to_writer(&mut *out, bundle)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_prompts(input: impl BufRead) -> Result<PromptSet, HarnessError> {
    let mut bundles = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        bundles.push(serde_json::from_str(&line)?);
    }
    Ok(PromptSet::from_bundles(bundles))
}

/// Helper shared by instance sampling in the binary and tests: the task
/// kind recorded in an instance id.
pub fn record_task(record: &EvalRecord) -> Option<TaskKind> {
    parse_case_id(&record.case_id).and_then(|id| instance_kind(id.instance_id))
}
