//! Rule-based claim extraction.
//!
//! Entities resolve through a [`Lexicon`] built from graph labels; verbs and
//! units map to predicates through a table of [`PredicateRule`]s. Matches
//! that do not resolve are dropped silently. Anything implementing
//! [`ClaimExtractor`] can replace the rule-based extractor in the gate.

mod lexicon;
mod rules;
mod text;

use crate::kg::{Iri, Literal, Term, Triple};
use crate::scalar::Scalar;

pub use lexicon::{build_lexicon, link_question_entities, Lexicon, LexiconConflict, LexiconError, Mention};
pub use rules::{parse_rules, ObjectKind, PredicateRule, RuleError};
pub use text::{normalize, tokenize, Token, TokenKind};

use rules::PatternPart;

#[derive(Debug, Clone, PartialEq)]
pub struct Claim<S> {
    pub triple: Triple<S>,
    /// Character offsets `[start, end)` into the source text.
    pub span: (usize, usize),
    pub rule_id: String,
}

pub trait ClaimExtractor<S>: Send + Sync {
    fn extract(&self, text: &str) -> Vec<Claim<S>>;
}

/// Lexicon plus rule table.
#[derive(Debug, Clone)]
pub struct RuleExtractor<'a, S> {
    pub lexicon: &'a Lexicon,
    pub rules: &'a [PredicateRule<S>],
}

impl<S: Scalar> ClaimExtractor<S> for RuleExtractor<'_, S> {
    fn extract(&self, text: &str) -> Vec<Claim<S>> {
        extract_claims(text, self.lexicon, self.rules)
    }
}

/// Applies every rule left to right without overlap (per rule), ordered by
/// span start then rule id.
pub fn extract_claims<S: Scalar>(text: &str, lexicon: &Lexicon, rules: &[PredicateRule<S>]) -> Vec<Claim<S>> {
    let tokens = tokenize(text);
    let mut claims = Vec::new();
    for rule in rules {
        let mut i = 0;
        while i < tokens.len() {
            let mut binding = Binding::default();
            match match_parts(&tokens, i, &rule.parts, lexicon, rule, &mut binding) {
                Some(end) => {
                    let (Some(subject), Some(object)) = (binding.subject, binding.object) else {
                        unreachable!("a completed match binds both slots");
                    };
                    claims.push(Claim {
                        triple: Triple::new(subject, rule.predicate.clone(), object),
                        span: (tokens[i].start, tokens[end - 1].end),
                        rule_id: rule.id.clone(),
                    });
                    i = end;
                }
                None => i += 1,
            }
        }
    }
    claims.sort_by(|a, b| a.span.0.cmp(&b.span.0).then_with(|| a.rule_id.cmp(&b.rule_id)));
    claims
}

struct Binding<S> {
    subject: Option<Iri>,
    object: Option<Term<S>>,
}

impl<S> Default for Binding<S> {
    fn default() -> Self {
        Self {
            subject: None,
            object: None,
        }
    }
}

/// Backtracking match of `parts` at token `pos`; entity slots try the
/// longest alias first. Returns the end token index.
fn match_parts<S: Scalar>(
    tokens: &[Token],
    pos: usize,
    parts: &[PatternPart],
    lexicon: &Lexicon,
    rule: &PredicateRule<S>,
    binding: &mut Binding<S>,
) -> Option<usize> {
    let Some((part, rest)) = parts.split_first() else {
        return Some(pos);
    };
    match part {
        PatternPart::Word(w) => {
            let tok = tokens.get(pos)?;
            if tok.text == *w {
                match_parts(tokens, pos + 1, rest, lexicon, rule, binding)
            } else {
                None
            }
        }
        PatternPart::Subject => {
            for len in (1..=lexicon.max_tokens().min(tokens.len().saturating_sub(pos))).rev() {
                if let Some(iri) = lexicon.resolve(&tokens[pos..pos + len]) {
                    binding.subject = Some(iri.clone());
                    if let Some(end) = match_parts(tokens, pos + len, rest, lexicon, rule, binding) {
                        return Some(end);
                    }
                }
            }
            binding.subject = None;
            None
        }
        PatternPart::Object => match &rule.object {
            ObjectKind::Numeric { scale } => {
                let tok = tokens.get(pos)?;
                if tok.kind != TokenKind::Number {
                    return None;
                }
                let value = S::parse_decimal(&tok.text)? * scale.clone();
                binding.object = Some(Term::Literal(Literal::from_value(value)));
                let end = match_parts(tokens, pos + 1, rest, lexicon, rule, binding);
                if end.is_none() {
                    binding.object = None;
                }
                end
            }
            ObjectKind::Entity => {
                for len in (1..=lexicon.max_tokens().min(tokens.len().saturating_sub(pos))).rev() {
                    if let Some(iri) = lexicon.resolve(&tokens[pos..pos + len]) {
                        binding.object = Some(Term::Iri(iri.clone()));
                        if let Some(end) = match_parts(tokens, pos + len, rest, lexicon, rule, binding) {
                            return Some(end);
                        }
                    }
                }
                binding.object = None;
                None
            }
        },
    }
}
