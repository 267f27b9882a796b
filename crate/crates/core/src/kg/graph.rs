use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::term::{Iri, Term, TermKey, Triple};
use crate::scalar::Scalar;

type Postings = Vec<usize>;

/// Immutable, indexed set of triples.
///
/// Triples are held sorted and deduplicated; the three indexes store
/// positions into that vector, so every lookup yields results already in
/// `(subject, predicate, object)` order.
#[derive(Debug, Clone)]
pub struct Graph<S> {
    triples: Vec<Triple<S>>,
    spo: BTreeMap<Iri, BTreeMap<Iri, Postings>>,
    pos: BTreeMap<Iri, BTreeMap<TermKey, Postings>>,
    osp: BTreeMap<TermKey, BTreeMap<Iri, Postings>>,
}

impl<S> Default for Graph<S> {
    fn default() -> Self {
        Self {
            triples: Vec::new(),
            spo: BTreeMap::new(),
            pos: BTreeMap::new(),
            osp: BTreeMap::new(),
        }
    }
}

impl<S> PartialEq for Graph<S> {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

impl<S> Eq for Graph<S> {}

/// Single-line summary: `triples=<n> subjects=<n> predicates=<n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphStats {
    pub triples: usize,
    pub subjects: usize,
    pub predicates: usize,
}

impl fmt::Display for GraphStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "triples={} subjects={} predicates={}",
            self.triples, self.subjects, self.predicates
        )
    }
}

impl<S> FromIterator<Triple<S>> for Graph<S> {
    fn from_iter<I: IntoIterator<Item = Triple<S>>>(iter: I) -> Self {
        let mut triples: Vec<Triple<S>> = iter.into_iter().collect();
        triples.sort();
        triples.dedup();

        let mut spo: BTreeMap<Iri, BTreeMap<Iri, Postings>> = BTreeMap::new();
        let mut pos: BTreeMap<Iri, BTreeMap<TermKey, Postings>> = BTreeMap::new();
        let mut osp: BTreeMap<TermKey, BTreeMap<Iri, Postings>> = BTreeMap::new();
        for (i, t) in triples.iter().enumerate() {
            let key = t.object.key();
            spo.entry(t.subject.clone())
                .or_default()
                .entry(t.predicate.clone())
                .or_default()
                .push(i);
            pos.entry(t.predicate.clone())
                .or_default()
                .entry(key.clone())
                .or_default()
                .push(i);
            osp.entry(key)
                .or_default()
                .entry(t.subject.clone())
                .or_default()
                .push(i);
        }
        Self {
            triples,
            spo,
            pos,
            osp,
        }
    }
}

impl<S> Graph<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// All triples in sorted order.
    pub fn triples(&self) -> &[Triple<S>] {
        &self.triples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Triple<S>> {
        self.triples.iter()
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            triples: self.triples.len(),
            subjects: self.spo.len(),
            predicates: self.pos.len(),
        }
    }

    /// Exact (identity) membership.
    pub fn contains_exact(&self, triple: &Triple<S>) -> bool {
        self.triples.binary_search(triple).is_ok()
    }

    /// Triples matching every bound position, compared by term identity.
    /// Results are sorted.
    pub fn match_pattern(
        &self,
        subject: Option<&Iri>,
        predicate: Option<&Iri>,
        object: Option<&Term<S>>,
    ) -> Vec<&Triple<S>> {
        let object_key = object.map(Term::key);
        let positions: Vec<usize> = match (subject, predicate, &object_key) {
            (None, None, None) => return self.triples.iter().collect(),
            (Some(s), Some(p), o) => {
                let hits = self.spo.get(s).and_then(|m| m.get(p));
                match o {
                    None => hits.cloned().unwrap_or_default(),
                    Some(o) => hits
                        .into_iter()
                        .flatten()
                        .copied()
                        .filter(|&i| self.triples[i].object.key() == *o)
                        .collect(),
                }
            }
            (Some(s), None, None) => flatten(self.spo.get(s)),
            (Some(s), None, Some(o)) => self
                .osp
                .get(o)
                .and_then(|m| m.get(s))
                .cloned()
                .unwrap_or_default(),
            (None, Some(p), None) => flatten(self.pos.get(p)),
            (None, Some(p), Some(o)) => self
                .pos
                .get(p)
                .and_then(|m| m.get(o))
                .cloned()
                .unwrap_or_default(),
            (None, None, Some(o)) => flatten(self.osp.get(o)),
        };
        positions.into_iter().map(|i| &self.triples[i]).collect()
    }

    /// Triples with `node` as subject or as (IRI) object.
    pub fn incident(&self, node: &Iri) -> Vec<&Triple<S>> {
        let mut positions = flatten(self.spo.get(node));
        positions.extend(flatten(self.osp.get(&TermKey::Iri(node.clone()))));
        positions.sort_unstable();
        positions.dedup();
        positions.into_iter().map(|i| &self.triples[i]).collect()
    }

    pub fn has_type(&self, node: &Iri, class: &Iri) -> bool {
        self.spo
            .get(node)
            .and_then(|m| m.get(&Iri::rdf_type()))
            .is_some_and(|hits| {
                hits.iter()
                    .any(|&i| self.triples[i].object.as_iri() == Some(class))
            })
    }

    /// Distinct subjects carrying `rdf:type class`.
    pub fn instances_of(&self, class: &Iri) -> Vec<&Iri> {
        let key = TermKey::Iri(class.clone());
        self.pos
            .get(&Iri::rdf_type())
            .and_then(|m| m.get(&key))
            .into_iter()
            .flatten()
            .map(|&i| &self.triples[i].subject)
            .collect()
    }

    /// Sorted N-Triples serialization, one statement per line.
    pub fn to_ntriples(&self) -> String {
        let mut out = String::new();
        for t in &self.triples {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }

    pub fn subjects(&self) -> impl Iterator<Item = &Iri> {
        self.spo.keys()
    }
}

impl<S: Clone> Graph<S> {
    /// A new graph holding the triples of `self` plus `extra`.
    pub fn with_triples(&self, extra: impl IntoIterator<Item = Triple<S>>) -> Self {
        self.triples.iter().cloned().chain(extra).collect()
    }
}

impl<S: Scalar> Graph<S> {
    /// Entailment: a triple with the same subject and predicate whose object
    /// matches semantically (numeric literals within the relative tolerance).
    pub fn contains(&self, triple: &Triple<S>) -> bool {
        self.find_entailing(triple).is_some()
    }

    /// The stored triple that entails `triple`, preferring an identical one.
    pub fn find_entailing(&self, triple: &Triple<S>) -> Option<&Triple<S>> {
        let hits = self.spo.get(&triple.subject)?.get(&triple.predicate)?;
        let candidates = || hits.iter().map(|&i| &self.triples[i]);
        candidates()
            .find(|t| t.object == triple.object)
            .or_else(|| candidates().find(|t| t.object.semantic_eq(&triple.object)))
    }
}

fn flatten<K>(map: Option<&BTreeMap<K, Postings>>) -> Postings {
    let mut out: Postings = map.into_iter().flat_map(|m| m.values().flatten().copied()).collect();
    out.sort_unstable();
    out
}

impl<'a, S> IntoIterator for &'a Graph<S> {
    type Item = &'a Triple<S>;
    type IntoIter = std::slice::Iter<'a, Triple<S>>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

/// Read access shared by [`Graph`] and overlay views used during validation.
pub trait TripleSource<S> {
    fn match_pattern(&self, subject: Option<&Iri>, predicate: Option<&Iri>, object: Option<&Term<S>>) -> Vec<&Triple<S>>;

    fn has_type(&self, node: &Iri, class: &Iri) -> bool {
        let class = Term::Iri(class.clone());
        !self
            .match_pattern(Some(node), Some(&Iri::rdf_type()), Some(&class))
            .is_empty()
    }

    fn instances_of(&self, class: &Iri) -> Vec<Iri> {
        let class = Term::Iri(class.clone());
        let subjects: BTreeSet<Iri> = self
            .match_pattern(None, Some(&Iri::rdf_type()), Some(&class))
            .into_iter()
            .map(|t| t.subject.clone())
            .collect();
        subjects.into_iter().collect()
    }
}

impl<S> TripleSource<S> for Graph<S> {
    fn match_pattern(&self, subject: Option<&Iri>, predicate: Option<&Iri>, object: Option<&Term<S>>) -> Vec<&Triple<S>> {
        Graph::match_pattern(self, subject, predicate, object)
    }

    fn has_type(&self, node: &Iri, class: &Iri) -> bool {
        Graph::has_type(self, node, class)
    }

    fn instances_of(&self, class: &Iri) -> Vec<Iri> {
        Graph::instances_of(self, class).into_iter().cloned().collect()
    }
}

/// A graph plus one hypothetical triple, without copying the graph.
pub struct Overlay<'a, S> {
    base: &'a Graph<S>,
    extra: Option<&'a Triple<S>>,
}

impl<'a, S> Overlay<'a, S> {
    pub fn new(base: &'a Graph<S>, extra: &'a Triple<S>) -> Self {
        let extra = (!base.contains_exact(extra)).then_some(extra);
        Self { base, extra }
    }
}

impl<S> TripleSource<S> for Overlay<'_, S> {
    fn match_pattern(&self, subject: Option<&Iri>, predicate: Option<&Iri>, object: Option<&Term<S>>) -> Vec<&Triple<S>> {
        let mut hits = self.base.match_pattern(subject, predicate, object);
        if let Some(extra) = self.extra {
            let matches = subject.is_none_or(|s| *s == extra.subject)
                && predicate.is_none_or(|p| *p == extra.predicate)
                && object.is_none_or(|o| *o == extra.object);
            if matches {
                let at = hits.partition_point(|t| *t < extra);
                hits.insert(at, extra);
            }
        }
        hits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::term::Literal;
    use crate::scalar::Exact;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn river_sample() -> Graph<Exact> {
        [
            Triple::new(iri("River_Colorado"), iri("length"), Literal::infer("2334000.0")),
            Triple::new(iri("River_Colorado"), iri("sourceElevation"), Literal::infer("2743.0")),
            Triple::new(iri("River_Colorado"), iri("traverses"), iri("State_Colorado")),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn entailment_on_river_sample() {
        let g = river_sample();
        let claim = Triple::new(iri("River_Colorado"), iri("length"), Literal::from_value(Exact::from_usize(2334000)));
        assert!(g.contains(&claim));
        assert_eq!(g.find_entailing(&claim).unwrap().object.to_string(), "\"2334000.0\"");
        assert!(!Graph::<Exact>::new().contains(&claim));
    }

    #[test]
    fn entailment_within_relative_tolerance() {
        let g = river_sample();
        let near = Triple::new(iri("River_Colorado"), iri("length"), Literal::infer("2334000.0000000001"));
        assert!(g.contains(&near));
        let far = Triple::new(iri("River_Colorado"), iri("length"), Literal::infer("2334001"));
        assert!(!g.contains(&far));
    }

    #[test]
    fn subject_pattern_on_river_sample() {
        let g = river_sample();
        assert_eq!(g.match_pattern(Some(&iri("River_Colorado")), None, None).len(), 3);
        assert_eq!(g.match_pattern(None, None, None).len(), 3);
        let obj: Term<Exact> = iri("State_Colorado").into();
        assert_eq!(g.match_pattern(None, None, Some(&obj)).len(), 1);
        assert_eq!(g.stats().to_string(), "triples=3 subjects=1 predicates=3");
    }

    #[test]
    fn duplicates_collapse() {
        let t = Triple::<Exact>::new(iri("a"), iri("p"), iri("b"));
        let g: Graph<Exact> = vec![t.clone(), t].into_iter().collect();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn overlay_inserts_in_order() {
        let g = river_sample();
        let extra = Triple::new(iri("River_Colorado"), iri("mouthElevation"), Literal::infer("5"));
        let view = Overlay::new(&g, &extra);
        let hits = TripleSource::match_pattern(&view, Some(&iri("River_Colorado")), None, None);
        assert_eq!(hits.len(), 4);
        assert!(hits.windows(2).all(|w| w[0] < w[1]));
    }
}
