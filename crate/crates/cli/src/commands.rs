//! The five subcommands, each a thin orchestration layer over the core
//! library: generate artifacts, encode one graph, run a matrix, re-score a
//! finished run, and print its report.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};

use grapheval_core::client::{
    prompt_hash, read_transcript, HttpClient, MajorityClient, OracleClient, RecordingClient,
    ReplayClient, TextCompletion, Transcript,
};
use grapheval_core::encoding::{encode_graph, encode_graph_multirel, SchemeKind};
use grapheval_core::generate::{
    build_corpus, derive_seed, read_corpus, write_corpus, GraphCorpus,
};
use grapheval_core::graph::Graph;
use grapheval_core::harness::{
    aggregate, audit_records, build_matrix, build_prompts, read_prompts, read_records,
    render_csv, render_table, run_cases, write_prompts, write_records, AggregateInputs,
    AuditInputs, EvalCase, EvalRecord, HarnessError, PromptInputs, PromptSet, RunInputs,
};
use grapheval_core::task::{
    read_instances, sample_instance, write_instances, QuestionStyle, TaskInstance, TaskKind,
};

use crate::config::{ClientKind, RunConfig};

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const INSTANCES_FILE: &str = "instances.jsonl";
pub const EXEMPLAR_CORPUS_FILE: &str = "exemplar_corpus.jsonl";
pub const EXEMPLAR_INSTANCES_FILE: &str = "exemplar_instances.jsonl";
pub const PROMPTS_FILE: &str = "prompts.jsonl";
pub const TRANSCRIPT_FILE: &str = "transcript.jsonl";
pub const RECORDS_FILE: &str = "records.jsonl";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_TXT: &str = "report.txt";
pub const CONFIG_FILE: &str = "effective_config.toml";

/// The generated inputs a run is evaluated over.
pub struct Artifacts {
    pub corpus: GraphCorpus,
    pub instances: Vec<TaskInstance>,
    pub exemplar_corpus: GraphCorpus,
    pub exemplar_instances: Vec<TaskInstance>,
}

/// Samples one instance per (task, graph) with per-instance derived seeds.
pub fn build_instances(
    corpus: &GraphCorpus,
    style: QuestionStyle,
    master_seed: u64,
) -> Result<Vec<TaskInstance>> {
    let mut instances = Vec::with_capacity(TaskKind::ALL.len() * corpus.len());
    for task in TaskKind::ALL {
        for entry in corpus.entries() {
            let seed = derive_seed(master_seed, "instance", &[task.as_str(), &entry.id]);
            let instance = sample_instance(task, &entry.id, &entry.graph, style, seed)
                .with_context(|| format!("sampling {task} on graph {}", entry.id))?;
            instances.push(instance);
        }
    }
    Ok(instances)
}

/// Builds the evaluation and exemplar pools from the config alone.
pub fn generate_artifacts(config: &RunConfig) -> Result<Artifacts> {
    let corpus = build_corpus(&config.corpus_config(), config.seed)?;
    let exemplar_seed = derive_seed(config.seed, "exemplar-corpus", &[]);
    let exemplar_corpus = build_corpus(&config.exemplar_corpus_config(), exemplar_seed)?;
    let instances = build_instances(&corpus, config.matrix.style, config.seed)?;
    let exemplar_instances = build_instances(&exemplar_corpus, config.matrix.style, config.seed)?;
    Ok(Artifacts { corpus, instances, exemplar_corpus, exemplar_instances })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file =
        File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn open(dir: &Path, name: &str) -> Result<BufReader<File>> {
    let path = dir.join(name);
    let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(file))
}

pub fn write_artifacts(dir: &Path, artifacts: &Artifacts) -> Result<()> {
    write_corpus(&artifacts.corpus, &mut create(dir, CORPUS_FILE)?)?;
    write_instances(&artifacts.instances, &mut create(dir, INSTANCES_FILE)?)?;
    write_corpus(&artifacts.exemplar_corpus, &mut create(dir, EXEMPLAR_CORPUS_FILE)?)?;
    write_instances(&artifacts.exemplar_instances, &mut create(dir, EXEMPLAR_INSTANCES_FILE)?)?;
    Ok(())
}

pub fn load_artifacts(dir: &Path) -> Result<Artifacts> {
    Ok(Artifacts {
        corpus: read_corpus(open(dir, CORPUS_FILE)?)?,
        instances: read_instances(open(dir, INSTANCES_FILE)?)?,
        exemplar_corpus: read_corpus(open(dir, EXEMPLAR_CORPUS_FILE)?)?,
        exemplar_instances: read_instances(open(dir, EXEMPLAR_INSTANCES_FILE)?)?,
    })
}

fn write_effective_config(dir: &Path, config: &RunConfig) -> Result<()> {
    let mut out = create(dir, CONFIG_FILE)?;
    out.write_all(config.to_toml()?.as_bytes())?;
    Ok(())
}

/// `generate`: build the graph corpora and task instances for a run dir.
pub fn cmd_generate(config: &RunConfig) -> Result<()> {
    config.validate()?;
    std::fs::create_dir_all(&config.out)
        .with_context(|| format!("creating {}", config.out.display()))?;
    let artifacts = generate_artifacts(config)?;
    write_artifacts(&config.out, &artifacts)?;
    write_effective_config(&config.out, config)?;
    println!(
        "generated {} graphs, {} instances, {} exemplar graphs, {} exemplar instances in {}",
        artifacts.corpus.len(),
        artifacts.instances.len(),
        artifacts.exemplar_corpus.len(),
        artifacts.exemplar_instances.len(),
        config.out.display()
    );
    Ok(())
}

/// `encode`: print one graph file under one encoding scheme.
pub fn cmd_encode(graph_path: &Path, scheme: &str, multirel: bool, seed: u64) -> Result<()> {
    let scheme = SchemeKind::parse(scheme)
        .ok_or_else(|| anyhow::anyhow!("unknown scheme {scheme:?}"))?;
    let text = std::fs::read_to_string(graph_path)
        .with_context(|| format!("reading graph {}", graph_path.display()))?;
    let graph: Graph = serde_json::from_str(&text)
        .with_context(|| format!("parsing graph {}", graph_path.display()))?;
    let encoded = if multirel && scheme.is_friendship_family() {
        encode_graph_multirel(scheme, &graph, seed)?
    } else {
        encode_graph(scheme, &graph)?
    };
    println!("{encoded}");
    Ok(())
}

/// The model names a run evaluates, in matrix order.
fn model_names(config: &RunConfig, out: &Path) -> Result<Vec<String>> {
    match config.client.kind {
        ClientKind::MockOracle => Ok(vec!["mock-oracle".to_string()]),
        ClientKind::MockMajority => Ok(vec!["mock-majority".to_string()]),
        ClientKind::Http => {
            if config.models.is_empty() {
                Ok(vec![config.client.endpoint.model.clone()])
            } else {
                Ok(config.models.iter().map(|e| e.model.clone()).collect())
            }
        }
        ClientKind::Replay => {
            let path = out.join(TRANSCRIPT_FILE);
            if !path.exists() {
                bail!("replay needs an existing {}", path.display());
            }
            let mut models = Vec::new();
            for record in read_transcript(&path)? {
                if !models.contains(&record.model) {
                    models.push(record.model);
                }
            }
            if models.is_empty() {
                bail!("replay transcript {} holds no records", path.display());
            }
            Ok(models)
        }
    }
}

/// Builds the concrete backend for one model of the run.
fn make_client(
    config: &RunConfig,
    out: &Path,
    model: &str,
    instances: &[TaskInstance],
    selected: &[TaskInstance],
) -> Result<Box<dyn TextCompletion>> {
    Ok(match config.client.kind {
        ClientKind::MockOracle => Box::new(OracleClient::new(instances.to_vec())),
        ClientKind::MockMajority => Box::new(MajorityClient::from_instances(selected)),
        ClientKind::Replay => {
            Box::new(ReplayClient::from_transcript(&out.join(TRANSCRIPT_FILE), model)?)
        }
        ClientKind::Http => {
            let endpoint = config
                .models
                .iter()
                .find(|e| e.model == model)
                .unwrap_or(&config.client.endpoint)
                .clone();
            Box::new(HttpClient::new(endpoint)?)
        }
    })
}

/// A failed slice still yields one zero-score record per case.
fn failure_records(cases: &[EvalCase], prompts: &PromptSet) -> Vec<EvalRecord> {
    cases
        .iter()
        .map(|case| {
            let hash = prompts
                .get(case.scheme, case.method, &case.instance_id)
                .map(|bundle| prompt_hash(&bundle.prompt))
                .unwrap_or_default();
            EvalRecord {
                case_id: case.case_id.clone(),
                prompt_hash: hash,
                response: String::new(),
                parsed: None,
                score: 0,
                unparseable: true,
            }
        })
        .collect()
}

/// `run`: assemble prompts, submit every case, and score the responses.
pub fn cmd_run(config: &RunConfig, resume: bool) -> Result<()> {
    config.validate()?;
    std::fs::create_dir_all(&config.out)
        .with_context(|| format!("creating {}", config.out.display()))?;

    let artifacts = if config.out.join(CORPUS_FILE).exists() {
        load_artifacts(&config.out)?
    } else {
        let artifacts = generate_artifacts(config)?;
        write_artifacts(&config.out, &artifacts)?;
        artifacts
    };

    let models = model_names(config, &config.out)?;
    let matrix = config.matrix_config(models);
    let cases = build_matrix(&matrix, &artifacts.corpus, &artifacts.instances)?;
    if cases.is_empty() {
        bail!("matrix selected no cases");
    }

    let prompts = build_prompts(
        &cases,
        &PromptInputs {
            corpus: &artifacts.corpus,
            instances: &artifacts.instances,
            exemplar_corpus: &artifacts.exemplar_corpus,
            exemplar_instances: &artifacts.exemplar_instances,
            master_seed: config.seed,
            multirel: config.matrix.multirel,
            k: config.exemplars.k,
            cross_generator: config.exemplars.cross_generator,
        },
    )?;
    write_prompts(&prompts, &mut create(&config.out, PROMPTS_FILE)?)?;
    write_effective_config(&config.out, config)?;

    let selected: Vec<TaskInstance> = {
        let mut seen = std::collections::HashSet::new();
        let by_id: std::collections::HashMap<&str, &TaskInstance> =
            artifacts.instances.iter().map(|i| (i.id.as_str(), i)).collect();
        cases
            .iter()
            .filter(|case| seen.insert(case.instance_id.as_str()))
            .map(|case| by_id[case.instance_id.as_str()].clone())
            .collect()
    };

    let transcript = if config.client.kind == ClientKind::Replay {
        None
    } else {
        Some(Arc::new(Transcript::open(&config.out.join(TRANSCRIPT_FILE), resume)?))
    };

    let mut records = Vec::with_capacity(cases.len());
    let mut failures = 0usize;
    for model in &matrix.models {
        let slice: Vec<EvalCase> =
            cases.iter().filter(|c| &c.model == model).cloned().collect();
        let inner = make_client(config, &config.out, model, &artifacts.instances, &selected)?;
        let client: Box<dyn TextCompletion> = match &transcript {
            Some(t) => Box::new(RecordingClient::new(inner, Arc::clone(t))),
            None => inner,
        };
        let inputs = RunInputs {
            cases: &slice,
            prompts: &prompts,
            instances: &artifacts.instances,
            corpus: &artifacts.corpus,
            options: matrix.parse_options(),
            threads: config.client.threads,
        };
        match run_cases(&inputs, client.as_ref()) {
            Ok(outcome) => {
                failures += outcome.client_failures;
                records.extend(outcome.records);
            }
            Err(HarnessError::AllCasesFailed(n)) => {
                failures += n;
                records.extend(failure_records(&slice, &prompts));
            }
            Err(err) => return Err(err.into()),
        }
    }

    write_records(&records, &mut create(&config.out, RECORDS_FILE)?)?;
    if failures == cases.len() {
        bail!("all {failures} cases failed");
    }

    let report = aggregate(&AggregateInputs {
        records: &records,
        instances: &artifacts.instances,
        corpus: &artifacts.corpus,
    })?;
    create(&config.out, REPORT_TXT)?.write_all(render_table(&report).as_bytes())?;
    create(&config.out, REPORT_CSV)?.write_all(render_csv(&report).as_bytes())?;
    println!(
        "ran {} cases ({} client failures) across {} models; reports in {}",
        records.len(),
        failures,
        matrix.models.len(),
        config.out.display()
    );
    Ok(())
}

fn load_run_config(dir: &Path) -> Result<RunConfig> {
    let path = dir.join(CONFIG_FILE);
    if path.exists() {
        RunConfig::load(&path)
    } else {
        Ok(RunConfig::default())
    }
}

/// `score`: audit recorded scores against recomputation, then rebuild both
/// reports so re-scoring a clean run is a fixpoint.
pub fn cmd_score(dir: &Path) -> Result<()> {
    let config = load_run_config(dir)?;
    let artifacts = load_artifacts(dir)?;
    let prompts = read_prompts(open(dir, PROMPTS_FILE)?)?;
    let records = read_records(open(dir, RECORDS_FILE)?)?;
    let mismatches = audit_records(&AuditInputs {
        records: &records,
        instances: &artifacts.instances,
        corpus: &artifacts.corpus,
        options: config.matrix_config(Vec::new()).parse_options(),
        prompts: Some(&prompts),
    })?;
    if !mismatches.is_empty() {
        for mismatch in &mismatches {
            eprintln!("audit mismatch {}: {}", mismatch.case_id, mismatch.detail);
        }
        bail!("audit failed: {} mismatches across {} records", mismatches.len(), records.len());
    }
    let report = aggregate(&AggregateInputs {
        records: &records,
        instances: &artifacts.instances,
        corpus: &artifacts.corpus,
    })?;
    create(dir, REPORT_TXT)?.write_all(render_table(&report).as_bytes())?;
    create(dir, REPORT_CSV)?.write_all(render_csv(&report).as_bytes())?;
    println!("audit clean: {} records verified; reports rewritten", records.len());
    Ok(())
}

/// `report`: print the aggregated tables for a finished run.
pub fn cmd_report(dir: &Path, format: &str) -> Result<()> {
    let artifacts = load_artifacts(dir)?;
    let records = read_records(open(dir, RECORDS_FILE)?)?;
    let report = aggregate(&AggregateInputs {
        records: &records,
        instances: &artifacts.instances,
        corpus: &artifacts.corpus,
    })?;
    match format {
        "table" => print!("{}", render_table(&report)),
        "csv" => print!("{}", render_csv(&report)),
        other => bail!("unknown report format {other:?}, expected table or csv"),
    }
    Ok(())
}

/// Resolves the directory a score/report command operates on.
pub fn resolve_dir(positional: Option<PathBuf>, flag: Option<PathBuf>, config: Option<&RunConfig>) -> PathBuf {
    positional
        .or(flag)
        .or_else(|| config.map(|c| c.out.clone()))
        .unwrap_or_else(|| PathBuf::from("run"))
}
