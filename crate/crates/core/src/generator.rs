//! Text generators: the trait the gate calls, the fixed prompt template, and
//! deterministic mock generators for tests and desk-scale experiments.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::extract::{normalize, tokenize, ObjectKind, PredicateRule, TokenKind};
use crate::kg::{parse_ntriples, Graph, Iri, Term};
use crate::scalar::{Exact, Scalar};

/// The abstention response, byte-exact.
pub const ABSTAIN_TEXT: &str = "I don't know";

/// Response of the echo mock when no context fact fits the question.
pub const NO_FACT_TEXT: &str = "I could not find a relevant fact.";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("request timed out: {0}")]
    Timeout(String),
    #[error("upstream returned HTTP {status}: {body}")]
    Upstream { status: u16, body: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("no answer key for question {0:?}")]
    MissingAnswerKey(String),
    #[error("mock generator: {0}")]
    Mock(String),
}

pub trait Generator: Send + Sync {
    fn generate(&self, question: &str, context: &str) -> Result<String, GeneratorError>;
}

impl<F> Generator for F
where
    F: Fn(&str, &str) -> Result<String, GeneratorError> + Send + Sync,
{
    fn generate(&self, question: &str, context: &str) -> Result<String, GeneratorError> {
        self(question, context)
    }
}

/// Single user message: context under `CONTEXT:`, question under `QUESTION:`.
pub fn build_prompt(question: &str, context: &str) -> String {
    format!("CONTEXT:\n{context}\nQUESTION:\n{question}\n")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MockMode {
    /// Verbalizes a context triple through a predicate rule.
    EchoContext,
    /// Returns the answer key verbatim.
    FixedAnswer,
    /// Answer key, a corrupted variant, or an abstention, drawn per question.
    Noisy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MockBehavior {
    pub mode: MockMode,
    pub p_correct: f64,
    pub p_hallucinate: f64,
    pub seed: u64,
}

impl MockBehavior {
    pub fn echo() -> Self {
        Self {
            mode: MockMode::EchoContext,
            p_correct: 0.0,
            p_hallucinate: 0.0,
            seed: 0,
        }
    }

    pub fn fixed() -> Self {
        Self {
            mode: MockMode::FixedAnswer,
            ..Self::echo()
        }
    }

    pub fn noisy(p_correct: f64, p_hallucinate: f64, seed: u64) -> Result<Self, String> {
        let b = Self {
            mode: MockMode::Noisy,
            p_correct,
            p_hallucinate,
            seed,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), String> {
        let unit = 0.0..=1.0;
        if !unit.contains(&self.p_correct) || !unit.contains(&self.p_hallucinate) {
            return Err("probabilities must lie in [0, 1]".into());
        }
        if self.p_correct + self.p_hallucinate > 1.0 {
            return Err("p_correct + p_hallucinate must not exceed 1".into());
        }
        Ok(())
    }
}

/// Uniform draw in `[0, 1)` from a stream keyed by `(seed, question)`.
pub fn draw(seed: u64, question: &str) -> f64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(question.as_bytes());
    let key: [u8; 32] = hasher.finalize().into();
    ChaCha8Rng::from_seed(key).gen::<f64>()
}

/// Doubles the first number in `answer`.
pub fn corrupt_answer(answer: &str) -> Option<String> {
    let tok = tokenize(answer).into_iter().find(|t| t.kind == TokenKind::Number)?;
    let doubled = Exact::parse_decimal(&tok.text)? * Exact::from_usize(2);
    let chars: Vec<char> = answer.chars().collect();
    let mut out: String = chars[..tok.start].iter().collect();
    out.push_str(&doubled.to_decimal_string());
    out.extend(&chars[tok.end..]);
    Some(out)
}

/// Deterministic stand-in for a language model.
#[derive(Debug, Clone)]
pub struct MockGenerator<S> {
    behavior: MockBehavior,
    rules: Vec<PredicateRule<S>>,
    label_predicates: Vec<Iri>,
    answer_keys: HashMap<String, String>,
}

impl<S: Scalar> MockGenerator<S> {
    pub fn new(behavior: MockBehavior) -> Self {
        Self {
            behavior,
            rules: Vec::new(),
            label_predicates: vec![Iri::rdfs_label()],
            answer_keys: HashMap::new(),
        }
    }

    /// Rules used by the echo mode to verbalize triples.
    pub fn with_rules(mut self, rules: Vec<PredicateRule<S>>) -> Self {
        self.rules = rules;
        self
    }

    pub fn with_label_predicates(mut self, predicates: Vec<Iri>) -> Self {
        self.label_predicates = predicates;
        self
    }

    /// Question to gold answer sentence.
    pub fn with_answer_keys<Q: Into<String>, A: Into<String>>(mut self, keys: impl IntoIterator<Item = (Q, A)>) -> Self {
        self.answer_keys.extend(keys.into_iter().map(|(q, a)| (q.into(), a.into())));
        self
    }

    pub fn behavior(&self) -> &MockBehavior {
        &self.behavior
    }

    pub fn respond(&self, question: &str, context: &str, answer_key: Option<&str>) -> Result<String, GeneratorError> {
        let key = || answer_key.ok_or_else(|| GeneratorError::MissingAnswerKey(question.to_string()));
        match self.behavior.mode {
            MockMode::EchoContext => Ok(self.echo(question, context)),
            MockMode::FixedAnswer => key().map(str::to_string),
            MockMode::Noisy => {
                let answer = key()?;
                let u = draw(self.behavior.seed, question);
                if u < self.behavior.p_correct {
                    Ok(answer.to_string())
                } else if u < self.behavior.p_correct + self.behavior.p_hallucinate {
                    corrupt_answer(answer)
                        .ok_or_else(|| GeneratorError::Mock(format!("answer {answer:?} has no number to corrupt")))
                } else {
                    Ok(ABSTAIN_TEXT.to_string())
                }
            }
        }
    }

    /// Verbalizes the first context triple (in serialization order) whose
    /// subject is named in the question and whose predicate belongs to the
    /// rules sharing the most content words with the question.
    fn echo(&self, question: &str, context: &str) -> String {
        let Ok(graph) = parse_ntriples::<S>(context) else {
            return NO_FACT_TEXT.to_string();
        };
        let question_words: Vec<String> = tokenize(question).into_iter().map(|t| t.text).collect();
        let scores: Vec<usize> = self
            .rules
            .iter()
            .map(|rule| {
                let mut cues: Vec<&str> = rule.cue_words().filter(|w| !STOPWORDS.contains(w)).collect();
                cues.sort_unstable();
                cues.dedup();
                cues.iter().filter(|w| question_words.iter().any(|q| q == *w)).count()
            })
            .collect();
        let top = scores.iter().copied().max().unwrap_or(0);
        if top == 0 {
            return NO_FACT_TEXT.to_string();
        }
        let question_norm = format!(" {} ", normalize(question));
        let names = surface_names(&graph, &self.label_predicates);
        let name_of = |iri: &Iri| {
            names
                .get(iri)
                .cloned()
                .unwrap_or_else(|| iri.local_name().replace('_', " "))
        };
        for t in graph.iter() {
            let subject = name_of(&t.subject);
            if !question_norm.contains(&format!(" {} ", normalize(&subject))) {
                continue;
            }
            for (rule, _) in self.rules.iter().zip(&scores).filter(|(r, s)| **s == top && r.predicate == t.predicate) {
                let object = match (&rule.object, &t.object) {
                    (ObjectKind::Numeric { .. }, Term::Literal(lit)) => lit.numeric().and_then(|v| rule.unscale(v)),
                    (ObjectKind::Entity, Term::Iri(o)) => Some(name_of(o)),
                    _ => None,
                };
                if let Some(object) = object {
                    return rule.verbalize(&subject, &object);
                }
            }
        }
        NO_FACT_TEXT.to_string()
    }
}

const STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "by", "does", "for", "from", "has", "have", "in", "into", "is", "it", "its",
    "of", "on", "the", "to", "was", "what", "which", "with",
];

fn surface_names<S>(graph: &Graph<S>, label_predicates: &[Iri]) -> BTreeMap<Iri, String> {
    let mut names = BTreeMap::new();
    for p in label_predicates {
        for t in graph.match_pattern(None, Some(p), None) {
            if let Some(lit) = t.object.as_literal() {
                names.entry(t.subject.clone()).or_insert_with(|| lit.lexical().to_string());
            }
        }
    }
    names
}

impl<S: Scalar> Generator for MockGenerator<S> {
    fn generate(&self, question: &str, context: &str) -> Result<String, GeneratorError> {
        let key = self.answer_keys.get(question).map(String::as_str);
        self.respond(question, context, key)
    }
}
