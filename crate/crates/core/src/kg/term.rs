use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::{approx_eq_rel, is_decimal_lexical, is_integer_lexical, Scalar};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("IRI must not be empty")]
    EmptyIri,
    #[error("IRI {0:?} contains a forbidden character")]
    InvalidIri(String),
    #[error("{lexical:?} is not a valid {datatype} lexical form")]
    InvalidLexical { lexical: String, datatype: Datatype },
    #[error("unsupported datatype <{0}>")]
    UnsupportedDatatype(String),
}

/// An IRI compared byte-for-byte, without normalization.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, TermError> {
        let value = value.as_ref();
        if value.is_empty() {
            return Err(TermError::EmptyIri);
        }
        if value
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"' | '\\'))
        {
            return Err(TermError::InvalidIri(value.to_string()));
        }
        Ok(Self(Arc::from(value)))
    }

    pub fn rdf_type() -> Self {
        Self(Arc::from(RDF_TYPE))
    }

    pub fn rdfs_label() -> Self {
        Self(Arc::from(RDFS_LABEL))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The segment after the last `/` or `#`, or the whole IRI.
    pub fn local_name(&self) -> &str {
        match self.0.rfind(['/', '#']) {
            Some(pos) if pos + 1 < self.0.len() => &self.0[pos + 1..],
            _ => &self.0,
        }
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Datatype {
    String,
    Decimal,
    Integer,
}

impl Datatype {
    pub fn iri(self) -> String {
        let local = match self {
            Datatype::String => "string",
            Datatype::Decimal => "decimal",
            Datatype::Integer => "integer",
        };
        format!("{XSD}{local}")
    }

    /// Maps a datatype IRI onto the supported subset. Floating point XSD
    /// types are folded into `Decimal`.
    pub fn from_iri(iri: &str) -> Result<Self, TermError> {
        let local = iri
            .strip_prefix(XSD)
            .ok_or_else(|| TermError::UnsupportedDatatype(iri.to_string()))?;
        match local {
            "string" => Ok(Datatype::String),
            "decimal" | "double" | "float" => Ok(Datatype::Decimal),
            "integer" | "int" | "long" | "short" | "nonNegativeInteger" | "positiveInteger"
            | "nonPositiveInteger" | "negativeInteger" => Ok(Datatype::Integer),
            _ => Err(TermError::UnsupportedDatatype(iri.to_string())),
        }
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Datatype::String => "string",
            Datatype::Decimal => "decimal",
            Datatype::Integer => "integer",
        })
    }
}

/// A literal value. Identity (equality, ordering, hashing) is the pair
/// `(lexical, datatype)`; numeric closeness is [`Literal::semantic_eq`].
#[derive(Debug, Clone)]
pub struct Literal<S> {
    lexical: String,
    datatype: Datatype,
    numeric: Option<S>,
}

impl<S: Scalar> Literal<S> {
    pub fn string(lexical: impl Into<String>) -> Self {
        Self {
            lexical: lexical.into(),
            datatype: Datatype::String,
            numeric: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Datatype) -> Result<Self, TermError> {
        let lexical = lexical.into();
        let numeric = match datatype {
            Datatype::String => None,
            Datatype::Integer if !is_integer_lexical(&lexical) => {
                return Err(TermError::InvalidLexical { lexical, datatype });
            }
            Datatype::Decimal | Datatype::Integer => match S::parse_decimal(&lexical) {
                Some(v) => Some(v),
                None => return Err(TermError::InvalidLexical { lexical, datatype }),
            },
        };
        Ok(Self {
            lexical,
            datatype,
            numeric,
        })
    }

    /// Untyped literal: decimal when the lexical form parses as one,
    /// otherwise string.
    pub fn infer(lexical: impl Into<String>) -> Self {
        let lexical = lexical.into();
        if is_decimal_lexical(&lexical) {
            if let Some(v) = S::parse_decimal(&lexical) {
                return Self {
                    lexical,
                    datatype: Datatype::Decimal,
                    numeric: Some(v),
                };
            }
        }
        Self::string(lexical)
    }

    /// Decimal literal with the canonical lexical form of `value`.
    pub fn from_value(value: S) -> Self {
        Self {
            lexical: value.to_decimal_string(),
            datatype: Datatype::Decimal,
            numeric: Some(value),
        }
    }

    /// Numeric literals match within the relative tolerance regardless of
    /// decimal/integer datatype; strings match byte-for-byte.
    pub fn semantic_eq(&self, other: &Self) -> bool {
        match (&self.numeric, &other.numeric) {
            (Some(a), Some(b)) => approx_eq_rel(a, b, &S::relative_tolerance()),
            (None, None) => self.lexical == other.lexical,
            _ => false,
        }
    }
}

impl<S> Literal<S> {
    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Datatype {
        self.datatype
    }

    pub fn numeric(&self) -> Option<&S> {
        self.numeric.as_ref()
    }

    fn key(&self) -> (&str, Datatype) {
        (&self.lexical, self.datatype)
    }
}

impl<S> PartialEq for Literal<S> {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl<S> Eq for Literal<S> {}

impl<S> PartialOrd for Literal<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S> Ord for Literal<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl<S> Hash for Literal<S> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl<S> fmt::Display for Literal<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", escape_literal(&self.lexical))?;
        // Untyped decimals re-infer as decimal; everything else carries its datatype
        // unless it is a string that would not be mistaken for a number.
        match self.datatype {
            Datatype::Decimal => Ok(()),
            Datatype::String if !is_decimal_lexical(&self.lexical) => Ok(()),
            dt => write!(f, "^^<{}>", dt.iri()),
        }
    }
}

fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// Ordering key for an object position: IRIs sort before literals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum TermKey {
    Iri(Iri),
    Literal(String, Datatype),
}

#[derive(Debug, Clone)]
pub enum Term<S> {
    Iri(Iri),
    Literal(Literal<S>),
}

impl<S: Scalar> Term<S> {
    /// IRIs compare byte-equal, literals per [`Literal::semantic_eq`].
    pub fn semantic_eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Iri(a), Term::Iri(b)) => a == b,
            (Term::Literal(a), Term::Literal(b)) => a.semantic_eq(b),
            _ => false,
        }
    }
}

impl<S> Term<S> {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal<S>> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }

    pub fn numeric(&self) -> Option<&S> {
        self.as_literal().and_then(|l| l.numeric.as_ref())
    }

    pub(crate) fn key(&self) -> TermKey {
        match self {
            Term::Iri(i) => TermKey::Iri(i.clone()),
            Term::Literal(l) => TermKey::Literal(l.lexical.clone(), l.datatype),
        }
    }

    fn cmp_key(&self) -> (u8, &str, Option<Datatype>) {
        match self {
            Term::Iri(i) => (0, i.as_str(), None),
            Term::Literal(l) => (1, &l.lexical, Some(l.datatype)),
        }
    }
}

impl<S> From<Iri> for Term<S> {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl<S> From<Literal<S>> for Term<S> {
    fn from(lit: Literal<S>) -> Self {
        Term::Literal(lit)
    }
}

impl<S> PartialEq for Term<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_key() == other.cmp_key()
    }
}

impl<S> Eq for Term<S> {}

impl<S> PartialOrd for Term<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S> Ord for Term<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_key().cmp(&other.cmp_key())
    }
}

impl<S> Hash for Term<S> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.cmp_key().hash(state);
    }
}

impl<S> fmt::Display for Term<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => i.fmt(f),
            Term::Literal(l) => l.fmt(f),
        }
    }
}

/// One `(subject, predicate, object)` fact. Ordered by subject, predicate,
/// then object lexical form.
#[derive(Debug, Clone)]
pub struct Triple<S> {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term<S>,
}

impl<S> Triple<S> {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term<S>>) -> Self {
        Self {
            subject,
            predicate,
            object: object.into(),
        }
    }
}

impl<S: Scalar> Triple<S> {
    /// Same subject and predicate, semantically equal object.
    pub fn semantic_eq(&self, other: &Self) -> bool {
        self.subject == other.subject
            && self.predicate == other.predicate
            && self.object.semantic_eq(&other.object)
    }
}

impl<S> PartialEq for Triple<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S> Eq for Triple<S> {}

impl<S> PartialOrd for Triple<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S> Ord for Triple<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.subject
            .cmp(&other.subject)
            .then_with(|| self.predicate.cmp(&other.predicate))
            .then_with(|| self.object.cmp(&other.object))
    }
}

impl<S> Hash for Triple<S> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.subject.hash(state);
        self.predicate.hash(state);
        self.object.hash(state);
    }
}

/// N-Triples statement, including the terminating ` .`.
impl<S> fmt::Display for Triple<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}
