use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use super::dataset::QAItem;
use super::run::ResultRecord;
use crate::oracle::AbstainReason;
use crate::scalar::{Exact, Scalar};

/// A ratio of counts, undefined when the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fraction {
    pub numerator: u64,
    pub denominator: u64,
}

impl Fraction {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        Self { numerator, denominator }
    }

    pub fn is_defined(&self) -> bool {
        self.denominator != 0
    }

    pub fn exact(&self) -> Option<Exact> {
        self.is_defined()
            .then(|| Exact::new(BigInt::from(self.numerator), BigInt::from(self.denominator)))
    }

    pub fn value_as<S: Scalar>(&self) -> Option<S> {
        self.is_defined()
            .then(|| S::from_usize(self.numerator as usize) / S::from_usize(self.denominator as usize))
    }

    pub fn value(&self) -> Option<f64> {
        self.is_defined().then(|| self.numerator as f64 / self.denominator as f64)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// The five reliability metrics with their counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalMetrics {
    /// Correct answers over all dataset items.
    pub accuracy: Fraction,
    /// Appropriate abstentions over all abstentions.
    pub abstention_precision: Fraction,
    /// Rejected planted violations over all planted violations.
    pub cvrr: Fraction,
    /// Wrong answers on non-entailed items over all non-entailed items.
    pub far_ne: Fraction,
    /// Correct licensed answers over licensed answers, entailed items only.
    pub licensed_accuracy: Fraction,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("record refers to unknown item {0:?}")]
    UnknownItem(String),
    #[error("more than one record for item {0:?}")]
    DuplicateRecord(String),
}

/// Whether an abstention was epistemically appropriate. An abstention the
/// gate traced to an unsupported or violating claim is appropriate whatever
/// the item; otherwise it is appropriate only on a non-entailed item.
pub fn abstention_appropriate<S>(record: &ResultRecord, item: &QAItem<S>) -> bool {
    match record.abstain_reason {
        Some(AbstainReason::NoEvidence | AbstainReason::ConstraintViolation) => true,
        Some(AbstainReason::NoClaimsPolicy) | None => !item.entailed,
    }
}

/// Denominators over items (accuracy, CVRR, FAR-NE) count every dataset
/// item; items without a record count as unanswered and unrejected.
pub fn compute_metrics<S>(items: &[QAItem<S>], records: &[ResultRecord]) -> Result<EvalMetrics, MetricsError> {
    let by_id: HashMap<&str, &QAItem<S>> = items.iter().map(|i| (i.id.as_str(), i)).collect();
    let mut seen = HashSet::new();
    let mut m = EvalMetrics {
        accuracy: Fraction::new(0, items.len() as u64),
        cvrr: Fraction::new(0, items.iter().filter(|i| i.violates_constraints).count() as u64),
        far_ne: Fraction::new(0, items.iter().filter(|i| !i.entailed).count() as u64),
        ..EvalMetrics::default()
    };
    for r in records {
        let item = *by_id
            .get(r.item_id.as_str())
            .ok_or_else(|| MetricsError::UnknownItem(r.item_id.clone()))?;
        if !seen.insert(r.item_id.as_str()) {
            return Err(MetricsError::DuplicateRecord(r.item_id.clone()));
        }
        let correct = r.answered() && r.correct == Some(true);
        if correct {
            m.accuracy.numerator += 1;
        }
        if !r.answered() {
            m.abstention_precision.denominator += 1;
            if abstention_appropriate(r, item) {
                m.abstention_precision.numerator += 1;
            }
        }
        if item.violates_constraints && r.rejected_violation {
            m.cvrr.numerator += 1;
        }
        if !item.entailed && r.answered() && !correct {
            m.far_ne.numerator += 1;
        }
        if item.entailed && r.licensed {
            m.licensed_accuracy.denominator += 1;
            if correct {
                m.licensed_accuracy.numerator += 1;
            }
        }
    }
    Ok(m)
}
