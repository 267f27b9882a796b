use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::kg::{parse_line, Triple};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct QAItem<S> {
    pub id: String,
    pub question: String,
    pub gold_answer: String,
    /// Whether the gold fact is in the graph.
    pub entailed: bool,
    pub gold_triple: Option<Triple<S>>,
    /// Whether the item's tested claim is a planted constraint contradiction.
    pub violates_constraints: bool,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {reason}")]
    Invalid { line: usize, reason: String },
    #[error("duplicate item id {0:?}")]
    DuplicateId(String),
    #[error("cannot read dataset: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawItem {
    id: String,
    question: String,
    gold_answer: String,
    entailed: bool,
    #[serde(default)]
    gold_triple: Option<String>,
    #[serde(default)]
    violates_constraints: bool,
}

pub fn load_dataset<S: Scalar>(path: impl AsRef<Path>) -> Result<Vec<QAItem<S>>, DatasetError> {
    parse_dataset(&fs::read_to_string(path)?)
}

/// One JSON object per line; `gold_triple` is an N-Triples statement.
pub fn parse_dataset<S: Scalar>(input: &str) -> Result<Vec<QAItem<S>>, DatasetError> {
    let mut items = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in input.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let item = parse_item(raw).map_err(|reason| DatasetError::Invalid { line: i + 1, reason })?;
        if !seen.insert(item.id.clone()) {
            return Err(DatasetError::DuplicateId(item.id));
        }
        items.push(item);
    }
    Ok(items)
}

fn parse_item<S: Scalar>(line: &str) -> Result<QAItem<S>, String> {
    let raw: RawItem = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if raw.gold_answer.trim().is_empty() {
        return Err("gold_answer is empty".into());
    }
    let gold_triple = match raw.gold_triple.as_deref() {
        None => None,
        Some(stmt) => Some(parse_line(stmt).and_then(|t| t.ok_or_else(|| "gold_triple is empty".to_string()))?),
    };
    if raw.entailed && gold_triple.is_none() {
        return Err("entailed items need a gold_triple".into());
    }
    if raw.violates_constraints && raw.entailed {
        return Err("a constraint-violating item cannot be entailed".into());
    }
    Ok(QAItem {
        id: raw.id,
        question: raw.question,
        gold_answer: raw.gold_answer,
        entailed: raw.entailed,
        gold_triple,
        violates_constraints: raw.violates_constraints,
    })
}
