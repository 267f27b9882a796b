//! Declarative constraint sets and their validation.
//!
//! Seven constraint families are supported: object class typing, three
//! numeric bounds, ordering between two properties of one node, conditional
//! requirements and closed-interval overlap between linked nodes. Absent
//! properties never violate anything except a conditional requirement.

mod manifest;
mod validate;

use std::fmt;

use crate::kg::{Iri, Triple};

pub use manifest::{parse_manifest, ManifestError};
pub use validate::{validate_claim, validate_graph, validate_source};

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintKind<S> {
    /// Every object of `predicate` is an IRI typed `class`.
    ClassOfObject { predicate: Iri, class: Iri },
    /// Numeric `property` values of `class` instances are `> bound`.
    MinExclusive { class: Iri, property: Iri, bound: S },
    /// `>= bound`.
    MinInclusive { class: Iri, property: Iri, bound: S },
    /// `<= bound`.
    MaxInclusive { class: Iri, property: Iri, bound: S },
    /// `lesser < greater` strictly, when both are present on a `class` instance.
    LessThanProperty { class: Iri, lesser: Iri, greater: Iri },
    /// `(s, predicate, o)` with `o` typed `object_class` requires
    /// `(s, required_predicate, required_object)`.
    ConditionalRequirement {
        predicate: Iri,
        object_class: Iri,
        required_predicate: Iri,
        required_object: Iri,
    },
    /// For `(a, predicate, b)`, `[start(a), end(a)]` and `[start(b), end(b)]`
    /// overlap (closed intervals).
    IntervalOverlap { predicate: Iri, start: Iri, end: Iri },
}

impl<S> ConstraintKind<S> {
    pub fn name(&self) -> &'static str {
        match self {
            ConstraintKind::ClassOfObject { .. } => "class_of_object",
            ConstraintKind::MinExclusive { .. } => "min_exclusive",
            ConstraintKind::MinInclusive { .. } => "min_inclusive",
            ConstraintKind::MaxInclusive { .. } => "max_inclusive",
            ConstraintKind::LessThanProperty { .. } => "less_than_property",
            ConstraintKind::ConditionalRequirement { .. } => "conditional_requirement",
            ConstraintKind::IntervalOverlap { .. } => "interval_overlap",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub id: String,
    pub kind: ConstraintKind<S>,
}

/// Constraints in manifest order. Ids are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet<S> {
    constraints: Vec<Constraint<S>>,
}

impl<S> Default for ConstraintSet<S> {
    fn default() -> Self {
        Self {
            constraints: Vec::new(),
        }
    }
}

impl<S> ConstraintSet<S> {
    /// Fails with the offending id if two constraints share one.
    pub fn new(constraints: Vec<Constraint<S>>) -> Result<Self, String> {
        let mut seen = std::collections::BTreeSet::new();
        for c in &constraints {
            if !seen.insert(c.id.as_str()) {
                return Err(c.id.clone());
            }
        }
        Ok(Self { constraints })
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Constraint<S>> {
        self.constraints.iter()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Constraint<S>> {
        self.constraints.iter().find(|c| c.id == id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation<S> {
    pub constraint_id: String,
    pub focus: Iri,
    pub triple: Option<Triple<S>>,
    pub message: String,
}

impl<S> fmt::Display for Violation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.constraint_id, self.focus, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<S> {
    pub violations: Vec<Violation<S>>,
}

impl<S> ValidationReport<S> {
    pub fn conforms(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `conforms=<bool> violations=<n>` followed by one line per violation.
impl<S> fmt::Display for ValidationReport<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "conforms={} violations={}", self.conforms(), self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}
