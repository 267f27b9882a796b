use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use licensing_core::constraints::{parse_manifest, validate_graph};
use licensing_core::eval::{
    compute_metrics, load_dataset, parse_records, render_report, run_condition, write_records, Condition,
};
use licensing_core::extract::{build_lexicon, parse_rules};
use licensing_core::generator::{Generator, GeneratorError, MockMode};
use licensing_core::kg::read_ntriples;
use licensing_core::oracle::{OracleConfig, ProvenanceRecord};
use licensing_core::{ConstraintSet, Graph, MockGenerator, Oracle, PredicateRule, QAItem};
use licensing_http::HttpGenerator;

mod config;

use config::{GeneratorKind, Settings};

/// Exit codes are part of the interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
enum Exit {
    Ok = 0,
    Nonconforming = 1,
    Input = 2,
    Abstain = 3,
    Upstream = 4,
}

struct Failure {
    exit: Exit,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(error: E) -> Self {
        Self {
            exit: Exit::Input,
            error: error.into(),
        }
    }
}

type Outcome = Result<Exit, Failure>;

#[derive(Parser)]
#[command(name = "licensing-oracle", version, about = "Knowledge-graph licensing gate for generated answers")]
struct Cli {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print graph size.
    Stats {
        #[command(flatten)]
        settings: Settings,
    },
    /// Check the graph against the constraint manifest.
    Validate {
        #[command(flatten)]
        settings: Settings,
    },
    /// Gate one question and print the provenance record.
    Ask {
        #[command(flatten)]
        settings: Settings,
        /// Answer key for the fixed and noisy mocks.
        #[arg(long)]
        answer: Option<String>,
        question: String,
    },
    /// Run a condition over a dataset and print the metrics table.
    Eval {
        #[command(flatten)]
        settings: Settings,
    },
    /// Score an existing result log against a dataset.
    Score {
        #[command(flatten)]
        settings: Settings,
        /// Result log (JSON lines).
        #[arg(long)]
        log: PathBuf,
        /// Row label in the report.
        #[arg(long, default_value = "LOG")]
        name: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(Failure { exit, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(exit as u8)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let file = match &cli.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    match cli.command {
        Command::Stats { settings } => stats(&settings.over(file)),
        Command::Validate { settings } => validate(&settings.over(file)),
        Command::Ask {
            settings,
            answer,
            question,
        } => ask(&settings.over(file), &question, answer.as_deref()),
        Command::Eval { settings } => eval(&settings.over(file)),
        Command::Score { settings, log, name } => score(&settings.over(file), &log, &name),
    }
}

fn load_graph(s: &Settings) -> anyhow::Result<Graph> {
    let path = Settings::require(&s.graph, "graph")?;
    let file = File::open(path).with_context(|| format!("cannot open graph {}", path.display()))?;
    read_ntriples(BufReader::new(file)).with_context(|| format!("invalid graph {}", path.display()))
}

fn read_text(path: &Path, what: &str) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {what} {}", path.display()))
}

fn load_constraints(s: &Settings) -> anyhow::Result<ConstraintSet> {
    let path = Settings::require(&s.constraints, "constraints")?;
    parse_manifest(&read_text(path, "constraints")?).with_context(|| format!("invalid constraints {}", path.display()))
}

fn load_rules(s: &Settings) -> anyhow::Result<Vec<PredicateRule>> {
    let path = Settings::require(&s.rules, "rules")?;
    parse_rules(&read_text(path, "rules")?).with_context(|| format!("invalid rules {}", path.display()))
}

fn load_items(s: &Settings) -> anyhow::Result<Vec<QAItem>> {
    let path = Settings::require(&s.dataset, "dataset")?;
    load_dataset(path).with_context(|| format!("invalid dataset {}", path.display()))
}

fn stats(s: &Settings) -> Outcome {
    println!("{}", load_graph(s)?.stats());
    Ok(Exit::Ok)
}

fn validate(s: &Settings) -> Outcome {
    let graph = load_graph(s)?;
    let report = validate_graph(&graph, &load_constraints(s)?);
    print!("{report}");
    Ok(if report.conforms() { Exit::Ok } else { Exit::Nonconforming })
}

/// Builds the configured generator; mocks answer from `answer_keys`.
fn generator<'a>(
    s: &Settings,
    rules: &[PredicateRule],
    answer_keys: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> anyhow::Result<Box<dyn Generator>> {
    Ok(match s.generator_kind() {
        GeneratorKind::Mock => Box::new(
            MockGenerator::new(s.mock_behavior()?)
                .with_rules(rules.to_vec())
                .with_label_predicates(s.label_predicates()?)
                .with_answer_keys(answer_keys),
        ),
        GeneratorKind::Http => Box::new(HttpGenerator::new(s.http_config()?)?),
    })
}

fn oracle_config(s: &Settings) -> anyhow::Result<OracleConfig> {
    Ok(OracleConfig {
        max_hops: s.max_hops()?,
        abstain_on_no_claims: !s.answer_without_claims,
    })
}

fn ask(s: &Settings, question: &str, answer: Option<&str>) -> Outcome {
    let graph = load_graph(s)?;
    let constraints = load_constraints(s)?;
    let rules = load_rules(s)?;
    let lexicon = build_lexicon(&graph, &s.label_predicates()?)?;
    let oracle = Oracle::new(&graph, &constraints, &lexicon, &rules).config(oracle_config(s)?);
    if s.generator_kind() == GeneratorKind::Mock && s.mock_behavior()?.mode != MockMode::EchoContext && answer.is_none() {
        return Err(anyhow!("the fixed and noisy mocks need --answer").into());
    }
    let generator = generator(s, &rules, answer.map(|a| (question, a)))?;
    let decision = oracle.run(question, generator.as_ref()).map_err(|e| Failure {
        exit: match e {
            GeneratorError::MissingAnswerKey(_) => Exit::Input,
            _ => Exit::Upstream,
        },
        error: anyhow::Error::new(e).context("generation failed"),
    })?;
    println!("{}", ProvenanceRecord::new(question, &decision).to_json_line());
    Ok(if decision.answered() { Exit::Ok } else { Exit::Abstain })
}

fn eval(s: &Settings) -> Outcome {
    let condition = Settings::require(&s.condition, "condition")?.parse::<Condition>()?;
    let items = load_items(s)?;
    let graph = load_graph(s)?;
    let constraints = load_constraints(s)?;
    let rules = load_rules(s)?;
    let lexicon = build_lexicon(&graph, &s.label_predicates()?)?;
    let oracle = Oracle::new(&graph, &constraints, &lexicon, &rules).config(oracle_config(s)?);
    let generator = generator(
        s,
        &rules,
        items.iter().map(|i| (i.question.as_str(), i.gold_answer.as_str())),
    )?;
    let records = run_condition(condition, &items, &oracle, generator.as_ref(), s.jobs()?);
    if let Some(path) = &s.output {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        write_records(BufWriter::new(file), &records).with_context(|| format!("cannot write {}", path.display()))?;
    }
    let metrics = compute_metrics(&items, &records)?;
    print_report(&render_report(&[(condition.as_str(), metrics)]))
}

fn score(s: &Settings, log: &Path, name: &str) -> Outcome {
    let items = load_items(s)?;
    let records = parse_records(&read_text(log, "result log")?).with_context(|| format!("invalid log {}", log.display()))?;
    let metrics = compute_metrics(&items, &records)?;
    print_report(&render_report(&[(name, metrics)]))
}

fn print_report(report: &str) -> Outcome {
    let mut out = io::stdout().lock();
    out.write_all(report.as_bytes())
        .and_then(|()| out.flush())
        .context("cannot write report")?;
    Ok(Exit::Ok)
}
