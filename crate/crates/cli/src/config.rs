//! Layered run configuration: a TOML file supplies defaults, flags override.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use licensing_core::generator::MockBehavior;
use licensing_core::generator::MockMode as CoreMockMode;
use licensing_core::kg::Iri;
use licensing_core::oracle::DEFAULT_MAX_HOPS;
use licensing_http::GeneratorConfig;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Mock,
    Http,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MockMode {
    Echo,
    Fixed,
    Noisy,
}

/// Every setting, all optional; shared by the flag parser and the file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// N-Triples knowledge graph.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Constraint manifest.
    #[arg(long)]
    pub constraints: Option<PathBuf>,
    /// Predicate rule table.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Label predicate IRI for the entity lexicon; repeatable.
    #[arg(long = "label-predicate", value_name = "IRI")]
    #[serde(default)]
    pub label_predicates: Vec<String>,
    /// Retrieval depth, at least 1 (default 3).
    #[arg(long)]
    pub max_hops: Option<usize>,
    /// Answer when the generated text contains no checkable claim.
    #[arg(long)]
    #[serde(default)]
    pub answer_without_claims: bool,

    #[arg(long, value_enum)]
    pub generator: Option<GeneratorKind>,
    #[arg(long, value_enum)]
    pub mock_mode: Option<MockMode>,
    #[arg(long)]
    pub p_correct: Option<f64>,
    #[arg(long)]
    pub p_hallucinate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,

    /// Chat-completion endpoint URL.
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// Environment variable holding the API key.
    #[arg(long)]
    pub api_key_env: Option<String>,
    /// Request timeout in seconds.
    #[arg(long)]
    pub timeout_secs: Option<f64>,
    #[arg(long)]
    pub max_retries: Option<u32>,
    /// Concurrent requests to the endpoint.
    #[arg(long)]
    pub concurrency: Option<usize>,

    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// BASELINE, CONTEXT_ONLY or ORACLE.
    #[arg(long)]
    pub condition: Option<String>,
    /// Worker threads for evaluation (default 1).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Result log destination.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// `self` wins wherever it is set.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            graph: self.graph.or(base.graph),
            constraints: self.constraints.or(base.constraints),
            rules: self.rules.or(base.rules),
            label_predicates: if self.label_predicates.is_empty() {
                base.label_predicates
            } else {
                self.label_predicates
            },
            max_hops: self.max_hops.or(base.max_hops),
            answer_without_claims: self.answer_without_claims || base.answer_without_claims,
            generator: self.generator.or(base.generator),
            mock_mode: self.mock_mode.or(base.mock_mode),
            p_correct: self.p_correct.or(base.p_correct),
            p_hallucinate: self.p_hallucinate.or(base.p_hallucinate),
            seed: self.seed.or(base.seed),
            endpoint: self.endpoint.or(base.endpoint),
            model: self.model.or(base.model),
            api_key_env: self.api_key_env.or(base.api_key_env),
            timeout_secs: self.timeout_secs.or(base.timeout_secs),
            max_retries: self.max_retries.or(base.max_retries),
            concurrency: self.concurrency.or(base.concurrency),
            dataset: self.dataset.or(base.dataset),
            condition: self.condition.or(base.condition),
            jobs: self.jobs.or(base.jobs),
            output: self.output.or(base.output),
        }
    }

    pub fn require<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
        value.as_ref().with_context(|| format!("missing --{flag}"))
    }

    pub fn max_hops(&self) -> Result<usize> {
        let hops = self.max_hops.unwrap_or(DEFAULT_MAX_HOPS);
        ensure!(hops >= 1, "--max-hops must be at least 1");
        Ok(hops)
    }

    pub fn jobs(&self) -> Result<usize> {
        let jobs = self.jobs.unwrap_or(1);
        ensure!(jobs >= 1, "--jobs must be at least 1");
        Ok(jobs)
    }

    pub fn label_predicates(&self) -> Result<Vec<Iri>> {
        if self.label_predicates.is_empty() {
            return Ok(vec![Iri::rdfs_label()]);
        }
        self.label_predicates
            .iter()
            .map(|raw| {
                let body = raw.strip_prefix('<').and_then(|r| r.strip_suffix('>')).unwrap_or(raw);
                Iri::new(body).with_context(|| format!("bad label predicate {raw:?}"))
            })
            .collect()
    }

    pub fn generator_kind(&self) -> GeneratorKind {
        self.generator.unwrap_or(GeneratorKind::Mock)
    }

    pub fn mock_behavior(&self) -> Result<MockBehavior> {
        let mode = match self.mock_mode.unwrap_or(MockMode::Echo) {
            MockMode::Echo => CoreMockMode::EchoContext,
            MockMode::Fixed => CoreMockMode::FixedAnswer,
            MockMode::Noisy => CoreMockMode::Noisy,
        };
        let behavior = MockBehavior {
            mode,
            p_correct: self.p_correct.unwrap_or(if mode == CoreMockMode::Noisy { 0.5 } else { 0.0 }),
            p_hallucinate: self.p_hallucinate.unwrap_or(0.0),
            seed: self.seed.unwrap_or(0),
        };
        if let Err(reason) = behavior.validate() {
            bail!("invalid mock settings: {reason}");
        }
        Ok(behavior)
    }

    pub fn http_config(&self) -> Result<GeneratorConfig> {
        let mut config = GeneratorConfig::new(
            Self::require(&self.endpoint, "endpoint")?.clone(),
            Self::require(&self.model, "model")?.clone(),
            self.api_key_env.clone().unwrap_or_else(|| "OPENAI_API_KEY".into()),
        );
        if let Some(secs) = self.timeout_secs {
            ensure!(secs.is_finite() && secs > 0.0, "--timeout-secs must be positive");
            config.timeout = Duration::from_secs_f64(secs);
        }
        if let Some(n) = self.max_retries {
            config.max_retries = n;
        }
        if let Some(n) = self.concurrency {
            config.concurrency = n;
        }
        config.validate()?;
        Ok(config)
    }
}
