use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dataset::QAItem;
use super::grade::grade_answer;
use crate::generator::Generator;
use crate::oracle::{AbstainReason, Oracle};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    /// Generation without context.
    Baseline,
    /// Retrieved context, no validation.
    ContextOnly,
    /// Retrieved context and the licensing gate.
    Oracle,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Baseline, Condition::ContextOnly, Condition::Oracle];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Baseline => "BASELINE",
            Self::ContextOnly => "CONTEXT_ONLY",
            Self::Oracle => "ORACLE",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown condition {0:?} (expected BASELINE, CONTEXT_ONLY or ORACLE)")]
pub struct UnknownCondition(pub String);

impl FromStr for Condition {
    type Err = UnknownCondition;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "BASELINE" => Ok(Self::Baseline),
            "CONTEXT_ONLY" => Ok(Self::ContextOnly),
            "ORACLE" => Ok(Self::Oracle),
            _ => Err(UnknownCondition(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Responded {
    Answered,
    Abstained,
}

/// Outcome of one item under one condition; one JSON line in a result log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub item_id: String,
    pub responded: Responded,
    /// Present iff answered.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correct: Option<bool>,
    pub licensed: bool,
    pub rejected_violation: bool,
    /// Why the gate abstained; absent outside the oracle condition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abstain_reason: Option<AbstainReason>,
    /// The generator failed; recorded as an abstention.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub failed: bool,
}

impl ResultRecord {
    pub fn answered(&self) -> bool {
        self.responded == Responded::Answered
    }

    fn failure(item_id: &str) -> Self {
        Self {
            item_id: item_id.to_string(),
            responded: Responded::Abstained,
            correct: None,
            licensed: false,
            rejected_violation: false,
            abstain_reason: None,
            failed: true,
        }
    }

    fn unchecked_answer(item_id: &str, correct: bool) -> Self {
        Self {
            item_id: item_id.to_string(),
            responded: Responded::Answered,
            correct: Some(correct),
            licensed: false,
            rejected_violation: false,
            abstain_reason: None,
            failed: false,
        }
    }
}

/// Runs one item. Generator failures become failed abstentions.
pub fn run_item<S: Scalar>(
    condition: Condition,
    item: &QAItem<S>,
    oracle: &Oracle<'_, S>,
    generator: &dyn Generator,
) -> ResultRecord {
    match condition {
        Condition::Baseline | Condition::ContextOnly => {
            let context = match condition {
                Condition::Baseline => String::new(),
                _ => oracle.context(&item.question),
            };
            match generator.generate(&item.question, &context) {
                Ok(response) => ResultRecord::unchecked_answer(&item.id, grade_answer(&response, &item.gold_answer)),
                Err(e) => {
                    log_failure(item, &e);
                    ResultRecord::failure(&item.id)
                }
            }
        }
        Condition::Oracle => match oracle.run(&item.question, generator) {
            Ok(decision) => {
                let answered = decision.answered();
                ResultRecord {
                    item_id: item.id.clone(),
                    responded: if answered { Responded::Answered } else { Responded::Abstained },
                    correct: answered.then(|| grade_answer(&decision.response_text, &item.gold_answer)),
                    licensed: answered && !decision.audits.is_empty(),
                    rejected_violation: item.violates_constraints && !answered && decision.has_violation(),
                    abstain_reason: decision.abstain_reason,
                    failed: false,
                }
            }
            Err(e) => {
                log_failure(item, &e);
                ResultRecord::failure(&item.id)
            }
        },
    }
}

fn log_failure<S>(item: &QAItem<S>, err: &dyn std::error::Error) {
    log::warn!("item {}: generator failed: {err}", item.id);
}

/// Runs every item; records come back in dataset order regardless of `jobs`.
pub fn run_condition<S: Scalar>(
    condition: Condition,
    items: &[QAItem<S>],
    oracle: &Oracle<'_, S>,
    generator: &dyn Generator,
    jobs: usize,
) -> Vec<ResultRecord> {
    let jobs = jobs.clamp(1, items.len().max(1));
    if jobs == 1 {
        return items.iter().map(|item| run_item(condition, item, oracle, generator)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<ResultRecord>>> = Mutex::new(vec![None; items.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let record = run_item(condition, item, oracle, generator);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(record);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: {reason}")]
    Invalid { line: usize, reason: String },
    #[error("cannot read result log: {0}")]
    Io(#[from] io::Error),
}

pub fn write_records<W: Write>(mut out: W, records: &[ResultRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn parse_records(input: &str) -> Result<Vec<ResultRecord>, RecordError> {
    let mut records = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line = i + 1;
        let r: ResultRecord = serde_json::from_str(raw).map_err(|e| RecordError::Invalid {
            line,
            reason: e.to_string(),
        })?;
        if r.answered() != r.correct.is_some() {
            return Err(RecordError::Invalid {
                line,
                reason: "correct must be present exactly when the item was answered".into(),
            });
        }
        records.push(r);
    }
    Ok(records)
}
