//! N-Triples subset: IRIs and literals only (no blank nodes, no language
//! tags). Untyped literals that look like decimals are read as decimals.

use std::io::BufRead;

use thiserror::Error;

use super::graph::Graph;
use super::term::{Datatype, Iri, Literal, Term, Triple};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("read error: {0}")]
    Io(#[from] std::io::Error),
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. } => Some(*line),
            ParseError::Io(_) => None,
        }
    }
}

/// Parses a whole document. All-or-nothing: the first malformed line aborts.
pub fn parse_ntriples<S: Scalar>(input: &str) -> Result<Graph<S>, ParseError> {
    let mut triples = Vec::new();
    for (i, line) in input.lines().enumerate() {
        if let Some(t) = parse_line(line).map_err(|reason| ParseError::Syntax { line: i + 1, reason })? {
            triples.push(t);
        }
    }
    Ok(triples.into_iter().collect())
}

pub fn read_ntriples<S: Scalar, R: BufRead>(reader: R) -> Result<Graph<S>, ParseError> {
    let mut triples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some(t) = parse_line(&line).map_err(|reason| ParseError::Syntax { line: i + 1, reason })? {
            triples.push(t);
        }
    }
    Ok(triples.into_iter().collect())
}

/// Parses one statement. `Ok(None)` for blank and comment lines.
pub fn parse_line<S: Scalar>(line: &str) -> Result<Option<Triple<S>>, String> {
    let mut cur = Cursor::new(line);
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = cur.iri("subject")?;
    cur.require_ws()?;
    let predicate = cur.iri("predicate")?;
    cur.require_ws()?;
    let object = match cur.peek() {
        Some('<') => Term::Iri(cur.iri("object")?),
        Some('"') => Term::Literal(cur.literal()?),
        Some('_') => return Err("blank nodes are not supported".into()),
        Some(c) => return Err(format!("unexpected {c:?} at object position")),
        None => return Err("missing object".into()),
    };
    cur.skip_ws();
    if cur.peek() != Some('.') {
        return Err("expected '.' terminating the statement".into());
    }
    cur.bump();
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some('#') {
        return Err("trailing content after '.'".into());
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

struct Cursor<'a> {
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str) -> Self {
        Self { rest: s }
    }

    fn peek(&self) -> Option<char> {
        self.rest.chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.rest = &self.rest[c.len_utf8()..];
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.rest.is_empty()
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t', '\r']);
    }

    fn require_ws(&mut self) -> Result<(), String> {
        let before = self.rest.len();
        self.skip_ws();
        if self.rest.len() == before {
            return Err("expected whitespace between terms".into());
        }
        Ok(())
    }

    fn iri(&mut self, role: &str) -> Result<Iri, String> {
        match self.peek() {
            Some('<') => {}
            Some('_') => return Err(format!("blank node at {role} position is not supported")),
            None => return Err(format!("missing {role}")),
            Some(c) => return Err(format!("expected '<' at {role} position, found {c:?}")),
        }
        self.bump();
        let end = self
            .rest
            .find('>')
            .ok_or_else(|| format!("unterminated IRI at {role} position"))?;
        let body = &self.rest[..end];
        self.rest = &self.rest[end + 1..];
        Iri::new(body).map_err(|e| e.to_string())
    }

    fn literal<S: Scalar>(&mut self) -> Result<Literal<S>, String> {
        self.bump();
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated literal".into()),
                Some('"') => break,
                Some('\\') => lexical.push(self.escape()?),
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => Err("language tags are not supported".into()),
            Some('^') => {
                if !self.rest.starts_with("^^") {
                    return Err("malformed datatype suffix".into());
                }
                self.rest = &self.rest[2..];
                let dt = self.iri("datatype")?;
                let datatype = Datatype::from_iri(dt.as_str()).map_err(|e| e.to_string())?;
                Literal::typed(lexical, datatype).map_err(|e| e.to_string())
            }
            _ => Ok(Literal::infer(lexical)),
        }
    }

    fn escape(&mut self) -> Result<char, String> {
        match self.bump() {
            Some('"') => Ok('"'),
            Some('\\') => Ok('\\'),
            Some('n') => Ok('\n'),
            Some('r') => Ok('\r'),
            Some('t') => Ok('\t'),
            Some('b') => Ok('\u{8}'),
            Some('f') => Ok('\u{c}'),
            Some('\'') => Ok('\''),
            Some('u') => self.hex_escape(4),
            Some('U') => self.hex_escape(8),
            Some(c) => Err(format!("invalid escape \\{c}")),
            None => Err("dangling escape".into()),
        }
    }

    fn hex_escape(&mut self, digits: usize) -> Result<char, String> {
        let hex = self.rest.get(..digits).ok_or("truncated unicode escape")?;
        let code = u32::from_str_radix(hex, 16).map_err(|_| format!("invalid unicode escape {hex:?}"))?;
        self.rest = &self.rest[digits..];
        char::from_u32(code).ok_or_else(|| format!("invalid code point U+{code:X}"))
    }
}
