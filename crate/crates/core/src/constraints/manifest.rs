//! Line-oriented constraint manifest:
//!
//! ```text
//! # id   kind                 key=value ...
//! C2     min_exclusive        class=<River> property=<sourceElevation> bound=0
//! C6     less_than_property   class=<River> lesser=<mouthElevation> greater=<sourceElevation>
//! ```

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Constraint, ConstraintKind, ConstraintSet};
use crate::kg::Iri;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct ManifestError {
    pub line: usize,
    pub reason: String,
}

pub fn parse_manifest<S: Scalar>(input: &str) -> Result<ConstraintSet<S>, ManifestError> {
    let mut constraints = Vec::new();
    let mut lines = BTreeMap::new();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let err = |reason: String| ManifestError { line, reason };
        let tokens: Vec<&str> = raw
            .split_whitespace()
            .take_while(|t| !t.starts_with('#'))
            .collect();
        let [id, kind, params @ ..] = tokens.as_slice() else {
            if tokens.is_empty() {
                continue;
            }
            return Err(err("expected `<id> <kind> key=value ...`".into()));
        };
        if let Some(first) = lines.insert(id.to_string(), line) {
            return Err(err(format!("duplicate constraint id {id:?} (first defined on line {first})")));
        }
        let mut args = Params::parse(params).map_err(err)?;
        let kind = match *kind {
            "class_of_object" => ConstraintKind::ClassOfObject {
                predicate: args.iri("predicate"),
                class: args.iri("class"),
            },
            "min_exclusive" => ConstraintKind::MinExclusive {
                class: args.iri("class"),
                property: args.iri("property"),
                bound: args.number("bound"),
            },
            "min_inclusive" => ConstraintKind::MinInclusive {
                class: args.iri("class"),
                property: args.iri("property"),
                bound: args.number("bound"),
            },
            "max_inclusive" => ConstraintKind::MaxInclusive {
                class: args.iri("class"),
                property: args.iri("property"),
                bound: args.number("bound"),
            },
            "less_than_property" => ConstraintKind::LessThanProperty {
                class: args.iri("class"),
                lesser: args.iri("lesser"),
                greater: args.iri("greater"),
            },
            "conditional_requirement" => ConstraintKind::ConditionalRequirement {
                predicate: args.iri("predicate"),
                object_class: args.iri("object_class"),
                required_predicate: args.iri("required_predicate"),
                required_object: args.iri("required_object"),
            },
            "interval_overlap" => ConstraintKind::IntervalOverlap {
                predicate: args.iri("predicate"),
                start: args.iri("start"),
                end: args.iri("end"),
            },
            other => return Err(err(format!("unknown constraint kind {other:?}"))),
        };
        args.finish().map_err(err)?;
        constraints.push(Constraint {
            id: id.to_string(),
            kind,
        });
    }
    Ok(ConstraintSet { constraints })
}

/// Collects `key=value` pairs; accessors record problems instead of failing
/// immediately so the kind table above stays declarative.
struct Params<'a> {
    values: BTreeMap<&'a str, &'a str>,
    problems: Vec<String>,
}

impl<'a> Params<'a> {
    fn parse(tokens: &[&'a str]) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, found {tok:?}"))?;
            if values.insert(k, v).is_some() {
                return Err(format!("duplicate key {k:?}"));
            }
        }
        Ok(Self {
            values,
            problems: Vec::new(),
        })
    }

    fn take(&mut self, key: &str) -> Option<&'a str> {
        let v = self.values.remove(key);
        if v.is_none() {
            self.problems.push(format!("missing key {key:?}"));
        }
        v
    }

    fn iri(&mut self, key: &str) -> Iri {
        let placeholder = || Iri::new("_").expect("placeholder IRI");
        let Some(raw) = self.take(key) else {
            return placeholder();
        };
        let parsed = raw
            .strip_prefix('<')
            .and_then(|r| r.strip_suffix('>'))
            .ok_or_else(|| format!("{key}: expected <iri>, found {raw:?}"))
            .and_then(|body| Iri::new(body).map_err(|e| format!("{key}: {e}")));
        parsed.unwrap_or_else(|e| {
            self.problems.push(e);
            placeholder()
        })
    }

    fn number<S: Scalar>(&mut self, key: &str) -> S {
        let Some(raw) = self.take(key) else {
            return S::zero();
        };
        S::parse_decimal(raw).unwrap_or_else(|| {
            self.problems.push(format!("{key}: {raw:?} is not a decimal"));
            S::zero()
        })
    }

    fn finish(self) -> Result<(), String> {
        let mut problems = self.problems;
        problems.extend(self.values.keys().map(|k| format!("unknown key {k:?}")));
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems.join("; "))
        }
    }
}
