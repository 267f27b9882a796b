//! Predicate rule table.
//!
//! ```text
//! # id    pattern                       predicate        kind     scale
//! len_km  "SUBJ is OBJ km long"         predicate=<length> kind=numeric scale=1000
//! trib    "SUBJ has tributary OBJ"      predicate=<hasTributary> kind=entity
//! ```

use thiserror::Error;

use super::text::{char_slice, tokenize, TokenKind};
use crate::kg::Iri;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct RuleError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectKind<S> {
    Entity,
    /// Parsed numbers are multiplied by `scale`.
    Numeric { scale: S },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum PatternPart {
    Word(String),
    Subject,
    Object,
}

/// A text template with exactly one `SUBJ` and one `OBJ` slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateRule<S> {
    pub id: String,
    pub pattern: String,
    pub predicate: Iri,
    pub object: ObjectKind<S>,
    pub(crate) parts: Vec<PatternPart>,
    /// Character spans of the `SUBJ` and `OBJ` markers in `pattern`.
    slots: [(usize, usize); 2],
}

impl<S: Scalar> PredicateRule<S> {
    pub fn new(id: impl Into<String>, pattern: impl Into<String>, predicate: Iri, object: ObjectKind<S>) -> Result<Self, String> {
        let pattern = pattern.into();
        if let ObjectKind::Numeric { scale } = &object {
            if scale.is_zero() {
                return Err("scale must be non-zero".into());
            }
        }
        let mut parts = Vec::new();
        let (mut subj, mut obj) = (Vec::new(), Vec::new());
        for tok in tokenize(&pattern) {
            let raw = char_slice(&pattern, tok.start, tok.end);
            match (raw.as_str(), tok.kind) {
                ("SUBJ", TokenKind::Word) => {
                    subj.push((tok.start, tok.end));
                    parts.push(PatternPart::Subject);
                }
                ("OBJ", TokenKind::Word) => {
                    obj.push((tok.start, tok.end));
                    parts.push(PatternPart::Object);
                }
                _ => parts.push(PatternPart::Word(tok.text)),
            }
        }
        let (&[s], &[o]) = (subj.as_slice(), obj.as_slice()) else {
            return Err(format!("pattern {pattern:?} needs exactly one SUBJ and one OBJ"));
        };
        Ok(Self {
            id: id.into(),
            pattern,
            predicate,
            object,
            parts,
            slots: [s, o],
        })
    }

    /// Fills the slots: the inverse of matching.
    pub fn verbalize(&self, subject: &str, object: &str) -> String {
        let mut out = String::new();
        let mut cursor = 0;
        let mut slots = [(self.slots[0], subject), (self.slots[1], object)];
        slots.sort_by_key(|((start, _), _)| *start);
        for ((start, end), text) in slots {
            out.push_str(&char_slice(&self.pattern, cursor, start));
            out.push_str(text);
            cursor = end;
        }
        let len = self.pattern.chars().count();
        out.push_str(&char_slice(&self.pattern, cursor, len));
        out
    }

    /// Surface number for a stored value: `value / scale`.
    pub fn unscale(&self, value: &S) -> Option<String> {
        match &self.object {
            ObjectKind::Numeric { scale } => Some((value.clone() / scale.clone()).to_decimal_string()),
            ObjectKind::Entity => None,
        }
    }

    /// Literal words of the pattern.
    pub fn cue_words(&self) -> impl Iterator<Item = &str> {
        self.parts.iter().filter_map(|p| match p {
            PatternPart::Word(w) => Some(w.as_str()),
            _ => None,
        })
    }
}

/// Parses `<id> "<pattern>" predicate=<iri> kind=numeric|entity [scale=<decimal>]`
/// lines; `#` starts a comment line. Numeric rules default to scale 1.
pub fn parse_rules<S: Scalar>(input: &str) -> Result<Vec<PredicateRule<S>>, RuleError> {
    let mut rules: Vec<PredicateRule<S>> = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let rule = parse_rule_line(trimmed).map_err(|reason| RuleError { line, reason })?;
        if rules.iter().any(|r| r.id == rule.id) {
            return Err(RuleError {
                line,
                reason: format!("duplicate rule id {:?}", rule.id),
            });
        }
        rules.push(rule);
    }
    Ok(rules)
}

fn parse_rule_line<S: Scalar>(line: &str) -> Result<PredicateRule<S>, String> {
    let (id, rest) = line.split_once(char::is_whitespace).ok_or("expected `<id> \"<pattern>\" ...`")?;
    let rest = rest.trim_start();
    let rest = rest.strip_prefix('"').ok_or("pattern must be double-quoted")?;
    let close = rest.find('"').ok_or("unterminated pattern")?;
    let pattern = &rest[..close];
    let (mut predicate, mut kind, mut scale) = (None, None, None);
    for tok in rest[close + 1..].split_whitespace() {
        if tok.starts_with('#') {
            break;
        }
        let (k, v) = tok.split_once('=').ok_or_else(|| format!("expected key=value, found {tok:?}"))?;
        match k {
            "predicate" => {
                let body = v
                    .strip_prefix('<')
                    .and_then(|b| b.strip_suffix('>'))
                    .ok_or_else(|| format!("predicate: expected <iri>, found {v:?}"))?;
                predicate = Some(Iri::new(body).map_err(|e| e.to_string())?);
            }
            "kind" => kind = Some(v),
            "scale" => scale = Some(S::parse_decimal(v).ok_or_else(|| format!("scale: {v:?} is not a decimal"))?),
            other => return Err(format!("unknown key {other:?}")),
        }
    }
    let predicate = predicate.ok_or("missing predicate")?;
    let object = match (kind, scale) {
        (Some("numeric"), scale) => ObjectKind::Numeric {
            scale: scale.unwrap_or_else(S::one),
        },
        (Some("entity"), None) => ObjectKind::Entity,
        (Some("entity"), Some(_)) => return Err("scale is only valid for numeric rules".into()),
        (Some(other), _) => return Err(format!("unknown kind {other:?}")),
        (None, _) => return Err("missing kind".into()),
    };
    PredicateRule::new(id, pattern, predicate, object)
}
