use crate::extract::{tokenize, TokenKind};
use crate::scalar::{Exact, Scalar};

/// Whether `response` contains `gold` as a contiguous token sequence after
/// case-folding, with numbers compared by value ("2334.0" matches "2334").
pub fn grade_answer(response: &str, gold: &str) -> bool {
    let gold = canonical_tokens(gold);
    if gold.is_empty() {
        return false;
    }
    canonical_tokens(response).windows(gold.len()).any(|w| w == gold.as_slice())
}

fn canonical_tokens(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .map(|t| match t.kind {
            TokenKind::Number => Exact::parse_decimal(&t.text).map_or(t.text, |v| v.to_decimal_string()),
            TokenKind::Word => t.text,
        })
        .collect()
}
