use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::text::{join, normalize, tokenize, Token};
use crate::kg::{Datatype, Graph, Iri};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("at least one label predicate is required")]
    NoLabelPredicates,
}

/// One alias claimed by several IRIs. The lexicographically smallest IRI
/// keeps the alias.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconConflict {
    pub alias: String,
    pub kept: Iri,
    pub dropped: Iri,
}

/// Normalized surface string to entity.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    aliases: BTreeMap<String, Iri>,
    max_tokens: usize,
    conflicts: Vec<LexiconConflict>,
}

/// An alias occurrence, as token indices `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mention {
    pub start: usize,
    pub end: usize,
    pub iri: Iri,
}

/// Aliases come from string literals under `label_predicates` and from the
/// local name of each labelled subject (`River_Colorado` gives "river colorado").
pub fn build_lexicon<S>(graph: &Graph<S>, label_predicates: &[Iri]) -> Result<Lexicon, LexiconError> {
    if label_predicates.is_empty() {
        return Err(LexiconError::NoLabelPredicates);
    }
    let mut candidates: BTreeMap<String, BTreeSet<Iri>> = BTreeMap::new();
    for predicate in label_predicates {
        for t in graph.match_pattern(None, Some(predicate), None) {
            let Some(lit) = t.object.as_literal() else { continue };
            if lit.datatype() != Datatype::String {
                continue;
            }
            for alias in [normalize(lit.lexical()), normalize(t.subject.local_name())] {
                if !alias.is_empty() {
                    candidates.entry(alias).or_default().insert(t.subject.clone());
                }
            }
        }
    }
    Ok(Lexicon::from_candidates(candidates))
}

impl Lexicon {
    fn from_candidates(candidates: BTreeMap<String, BTreeSet<Iri>>) -> Self {
        let mut aliases = BTreeMap::new();
        let mut conflicts = Vec::new();
        for (alias, iris) in candidates {
            let mut iris = iris.into_iter();
            let Some(kept) = iris.next() else { continue };
            for dropped in iris {
                conflicts.push(LexiconConflict {
                    alias: alias.clone(),
                    kept: kept.clone(),
                    dropped,
                });
            }
            aliases.insert(alias, kept);
        }
        let max_tokens = aliases.keys().map(|a| a.split(' ').count()).max().unwrap_or(0);
        Self {
            aliases,
            max_tokens,
            conflicts,
        }
    }

    /// Builds a lexicon from explicit `(alias, iri)` pairs.
    pub fn from_pairs<A: AsRef<str>>(pairs: impl IntoIterator<Item = (A, Iri)>) -> Self {
        let mut candidates: BTreeMap<String, BTreeSet<Iri>> = BTreeMap::new();
        for (alias, iri) in pairs {
            let alias = normalize(alias.as_ref());
            if !alias.is_empty() {
                candidates.entry(alias).or_default().insert(iri);
            }
        }
        Self::from_candidates(candidates)
    }

    pub fn len(&self) -> usize {
        self.aliases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aliases.is_empty()
    }

    pub fn conflicts(&self) -> &[LexiconConflict] {
        &self.conflicts
    }

    pub fn get(&self, alias: &str) -> Option<&Iri> {
        self.aliases.get(&normalize(alias))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> {
        self.aliases.iter().map(|(a, i)| (a.as_str(), i))
    }

    pub(crate) fn max_tokens(&self) -> usize {
        self.max_tokens
    }

    pub(crate) fn resolve(&self, tokens: &[Token]) -> Option<&Iri> {
        if tokens.is_empty() || tokens.len() > self.max_tokens {
            return None;
        }
        self.aliases.get(&join(tokens))
    }

    /// Non-overlapping alias occurrences. Longer aliases win overlaps, then
    /// earlier ones.
    pub fn mentions(&self, tokens: &[Token]) -> Vec<Mention> {
        let mut found = Vec::new();
        for start in 0..tokens.len() {
            for len in 1..=self.max_tokens.min(tokens.len() - start) {
                if let Some(iri) = self.resolve(&tokens[start..start + len]) {
                    found.push(Mention {
                        start,
                        end: start + len,
                        iri: iri.clone(),
                    });
                }
            }
        }
        found.sort_by(|a, b| {
            (b.end - b.start)
                .cmp(&(a.end - a.start))
                .then(a.start.cmp(&b.start))
                .then_with(|| a.iri.cmp(&b.iri))
        });
        let mut taken = vec![false; tokens.len()];
        let mut chosen: Vec<Mention> = Vec::new();
        for m in found {
            if taken[m.start..m.end].iter().any(|&t| t) {
                continue;
            }
            taken[m.start..m.end].iter_mut().for_each(|t| *t = true);
            chosen.push(m);
        }
        chosen.sort_by_key(|m| m.start);
        chosen
    }
}

/// Entities mentioned in a question: the seeds for subgraph retrieval.
pub fn link_question_entities(question: &str, lexicon: &Lexicon) -> BTreeSet<Iri> {
    lexicon
        .mentions(&tokenize(question))
        .into_iter()
        .map(|m| m.iri)
        .collect()
}
