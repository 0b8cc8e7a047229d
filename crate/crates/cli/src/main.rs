//! `grapheval`: generate graph-reasoning benchmarks, encode them as text,
//! run them against a completion backend, and score the results. Errors go
//! to stderr as one JSON line and a nonzero exit code.

mod commands;
mod config;

use std::path::PathBuf;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};

use grapheval_core::encoding::SchemeKind;
use grapheval_core::generate::GeneratorKind;
use grapheval_core::prompt::PromptMethod;
use grapheval_core::task::{QuestionStyle, TaskKind};

use commands::{cmd_encode, cmd_generate, cmd_report, cmd_run, cmd_score, resolve_dir};
use config::{ClientKind, RunConfig};

#[derive(Parser)]
#[command(name = "grapheval", version, about = "Graph reasoning benchmarks as text")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate graph corpora and task instances into the run directory.
    Generate(SharedArgs),
    /// Print one graph JSON file under one encoding scheme.
    Encode(EncodeArgs),
    /// Assemble prompts, submit every case, and score the responses.
    Run(RunArgs),
    /// Audit a run's stored scores, then rebuild its reports.
    Score(DirArgs),
    /// Print a finished run's report.
    Report(ReportArgs),
}

/// Options shared by `generate` and `run`; flags override config values.
#[derive(Args)]
struct SharedArgs {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Run directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Question style: graph or application.
    #[arg(long)]
    style: Option<String>,
    /// Exemplars per few-shot prompt (1..=8).
    #[arg(long)]
    k: Option<usize>,
    /// Backend: mock-oracle, mock-majority, replay, or http.
    #[arg(long)]
    client: Option<String>,
    /// Comma-separated encoding schemes.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// Comma-separated prompting methods.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Comma-separated tasks.
    #[arg(long, value_delimiter = ',')]
    tasks: Option<Vec<String>>,
    /// Comma-separated graph generators.
    #[arg(long, value_delimiter = ',')]
    generators: Option<Vec<String>>,
    /// Cap on instances per task.
    #[arg(long)]
    per_task_limit: Option<usize>,
    /// Vary relation verbs in friendship-family encodings.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    multirel: Option<bool>,
}

#[derive(Args)]
struct EncodeArgs {
    /// Graph JSON file: {"n": ..., "edges": [[u, v], ...]}.
    graph: PathBuf,
    /// Encoding scheme name.
    scheme: String,
    /// Vary relation verbs (friendship-family schemes only).
    #[arg(long)]
    multirel: bool,
    /// Seed for relation verb choices.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Reuse transcript entries from an interrupted run.
    #[arg(long)]
    resume: bool,
    /// Worker threads.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct DirArgs {
    /// Run directory.
    dir: Option<PathBuf>,
    /// Run directory (flag form).
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config file naming the run directory.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    dir: DirArgs,
    /// Output format: table or csv.
    #[arg(long, default_value = "table")]
    format: String,
}

fn parse_list<T>(
    values: &[String],
    what: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Vec<T>> {
    values
        .iter()
        .map(|v| parse(v).ok_or_else(|| anyhow!("unknown {what} {v:?}")))
        .collect()
}

/// Loads the config file (or defaults) and layers flag overrides on top.
fn config_from(args: &SharedArgs) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.out = out.clone();
    }
    if let Some(style) = &args.style {
        config.matrix.style =
            QuestionStyle::parse(style).ok_or_else(|| anyhow!("unknown style {style:?}"))?;
    }
    if let Some(k) = args.k {
        config.exemplars.k = k;
    }
    if let Some(client) = &args.client {
        config.client.kind =
            ClientKind::parse(client).ok_or_else(|| anyhow!("unknown client {client:?}"))?;
    }
    if let Some(schemes) = &args.schemes {
        config.matrix.schemes = parse_list(schemes, "scheme", SchemeKind::parse)?;
    }
    if let Some(methods) = &args.methods {
        config.matrix.methods = parse_list(methods, "method", PromptMethod::parse)?;
    }
    if let Some(tasks) = &args.tasks {
        config.matrix.tasks = parse_list(tasks, "task", TaskKind::parse)?;
    }
    if let Some(generators) = &args.generators {
        config.matrix.generators = parse_list(generators, "generator", GeneratorKind::parse)?;
    }
    if let Some(limit) = args.per_task_limit {
        config.matrix.per_task_limit = Some(limit);
    }
    if let Some(multirel) = args.multirel {
        config.matrix.multirel = multirel;
    }
    Ok(config)
}

fn dir_from(args: &DirArgs) -> Result<PathBuf> {
    let config = args.config.as_deref().map(RunConfig::load).transpose()?;
    Ok(resolve_dir(args.dir.clone(), args.out.clone(), config.as_ref()))
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => cmd_generate(&config_from(&args)?),
        Command::Encode(args) => cmd_encode(&args.graph, &args.scheme, args.multirel, args.seed),
        Command::Run(args) => {
            let mut config = config_from(&args.shared)?;
            if let Some(threads) = args.threads {
                config.client.threads = threads;
            }
            cmd_run(&config, args.resume)
        }
        Command::Score(args) => cmd_score(&dir_from(&args)?),
        Command::Report(args) => cmd_report(&dir_from(&args.dir)?, &args.format),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                std::process::exit(0);
            }
            eprintln!("{}", serde_json::json!({ "error": err.to_string() }));
            std::process::exit(2);
        }
    };
    if let Err(err) = dispatch(cli) {
        eprintln!("{}", serde_json::json!({ "error": format!("{err:#}") }));
        std::process::exit(1);
    }
}
