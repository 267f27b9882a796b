/// Word-boundary tokenizer shared by aliases, rule patterns and input text.
///
/// Tokens are maximal alphanumeric runs, lowercased. A run starting with a
/// digit (or a `-` directly before a digit, not attached to a word) is a
/// number and may carry one decimal fraction: `-12.5`. Offsets are in
/// characters, end-exclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Word,
    Number,
}

pub fn tokenize(input: &str) -> Vec<Token> {
    let chars: Vec<char> = input.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let prev_is_word = i > 0 && chars[i - 1].is_alphanumeric();
        let starts_number = c.is_ascii_digit()
            || (c == '-' && !prev_is_word && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()));
        if starts_number {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            tokens.push(Token {
                text: chars[start..i].iter().collect(),
                kind: TokenKind::Number,
                start,
                end: i,
            });
        } else if c.is_alphanumeric() {
            let start = i;
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
            tokens.push(Token {
                text: chars[start..i].iter().collect::<String>().to_lowercase(),
                kind: TokenKind::Word,
                start,
                end: i,
            });
        } else {
            i += 1;
        }
    }
    tokens
}

/// Token texts joined by single spaces: the normal form used for alias keys.
pub fn normalize(input: &str) -> String {
    join(&tokenize(input))
}

pub(crate) fn join(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&t.text);
    }
    out
}

/// Substring by character offsets.
pub(crate) fn char_slice(input: &str, start: usize, end: usize) -> String {
    input.chars().skip(start).take(end - start).collect()
}
