//! The JSON algebra format and the prefix term syntax.
//!
//! Term grammar (whitespace allowed between tokens):
//!
//! ```text
//! term   := symbol '(' term (',' term)* ')' | symbol '(' ')' | symbol
//! symbol := one or more characters other than whitespace, '(', ')', ','
//! ```
//!
//! A bare symbol naming a 0-ary operation is a constant; otherwise it must be an
//! identifier (letter or `_` first, then letters, digits, `_`) and is a variable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Algebra, AlgebraError, OpSymbol, Signature, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("syntax error at offset {offset}: {message}")]
    TermSyntax { offset: usize, message: String },
    #[error("unknown symbol `{name}` at offset {offset}")]
    UnknownSymbol { name: String, offset: usize },
    #[error("`{symbol}` at offset {offset} expects {expected} arguments, got {found}")]
    ArityMismatch { symbol: String, expected: usize, found: usize, offset: usize },
    #[error("table for `{op}` has {found} entries, expected {expected}")]
    TableLength { op: String, expected: usize, found: usize },
    #[error("table for `{op}` has entry {value} at position {position}, outside 0..{size}")]
    OutOfRange { op: String, position: usize, value: usize, size: usize },
    #[error("table given for undeclared symbol `{0}`")]
    UndeclaredTable(String),
    #[error(transparent)]
    Invalid(AlgebraError),
}

impl From<AlgebraError> for ParseError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::TableLength { op, expected, found } => ParseError::TableLength { op, expected, found },
            AlgebraError::OutOfRange { op, position, value, size } => ParseError::OutOfRange { op, position, value, size },
            other => ParseError::Invalid(other),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    signature: Vec<OpSymbol>,
    size: usize,
    tables: BTreeMap<String, Vec<usize>>,
}

pub fn parse_algebra(text: &str) -> Result<Algebra, ParseError> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let signature = Signature::new(file.signature)?;
    let mut tables = file.tables;
    if let Some(extra) = tables.keys().find(|k| signature.index_of(k).is_none()) {
        return Err(ParseError::UndeclaredTable(extra.clone()));
    }
    let ordered = signature
        .ops()
        .iter()
        .map(|op| tables.remove(&op.name).ok_or_else(|| AlgebraError::MissingTable(op.name.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Algebra::new(signature, file.size, ordered)?)
}

pub fn algebra_to_json(a: &Algebra) -> String {
    let file = AlgebraFile {
        signature: a.signature().ops().to_vec(),
        size: a.size(),
        tables: a
            .signature()
            .ops()
            .iter()
            .enumerate()
            .map(|(i, op)| (op.name.clone(), a.table(i).to_vec()))
            .collect(),
    };
    serde_json::to_string(&file).expect("algebra serializes")
}

/// Parses a whole string as one term over `sig`.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let (t, end) = parse_term_at(text, 0, sig)?;
    let end = skip_ws(text, end);
    if end < text.len() {
        return Err(ParseError::TermSyntax { offset: end, message: "trailing input after term".into() });
    }
    Ok(t)
}

pub(crate) fn is_symbol_char(c: char) -> bool {
    !(c.is_whitespace() || c == '(' || c == ')' || c == ',')
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

pub(crate) fn skip_ws(text: &str, mut pos: usize) -> usize {
    while let Some(c) = text[pos..].chars().next() {
        if !c.is_whitespace() {
            break;
        }
        pos += c.len_utf8();
    }
    pos
}

/// Reads a maximal run of symbol characters starting at `pos` (after whitespace).
pub(crate) fn read_symbol(text: &str, pos: usize) -> (usize, &str, usize) {
    let start = skip_ws(text, pos);
    let mut end = start;
    while let Some(c) = text[end..].chars().next() {
        if !is_symbol_char(c) {
            break;
        }
        end += c.len_utf8();
    }
    (start, &text[start..end], end)
}

/// Parses one term starting at byte offset `pos`; returns it and the offset just past it.
pub(crate) fn parse_term_at(text: &str, pos: usize, sig: &Signature) -> Result<(Term, usize), ParseError> {
    let (start, name, mut end) = read_symbol(text, pos);
    if name.is_empty() {
        let message = match text[start..].chars().next() {
            Some(c) => format!("expected a term, found `{c}`"),
            None => "expected a term, found end of input".into(),
        };
        return Err(ParseError::TermSyntax { offset: start, message });
    }
    if text[end..].starts_with('(') {
        let sym = sig.lookup(name).ok_or_else(|| ParseError::UnknownSymbol { name: name.into(), offset: start })?;
        end += 1;
        let mut args = Vec::new();
        let after = skip_ws(text, end);
        if text[after..].starts_with(')') {
            end = after + 1;
        } else {
            loop {
                let (arg, next) = parse_term_at(text, end, sig)?;
                args.push(arg);
                let next = skip_ws(text, next);
                match text[next..].chars().next() {
                    Some(',') => end = next + 1,
                    Some(')') => {
                        end = next + 1;
                        break;
                    }
                    _ => {
                        return Err(ParseError::TermSyntax { offset: next, message: "expected `,` or `)`".into() });
                    }
                }
            }
        }
        if sym.arity != args.len() {
            return Err(ParseError::ArityMismatch { symbol: name.into(), expected: sym.arity, found: args.len(), offset: start });
        }
        return Ok((Term::App(name.into(), args), end));
    }
    match sig.lookup(name) {
        Some(sym) if sym.arity == 0 => Ok((Term::constant(name), end)),
        Some(sym) => Err(ParseError::ArityMismatch { symbol: name.into(), expected: sym.arity, found: 0, offset: start }),
        None if is_identifier(name) => Ok((Term::var(name), end)),
        None => Err(ParseError::UnknownSymbol { name: name.into(), offset: start }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const L2: &str = r#"{"signature":[{"name":"+","arity":2},{"name":"*","arity":2},{"name":"0","arity":0},{"name":"1","arity":0}],
        "size":2,"tables":{"+":[0,0,1,1],"*":[0,0,0,1],"0":[0],"1":[1]}}"#;

    fn sig() -> Signature {
        Signature::from_pairs(&[("+", 2), ("*", 2), ("0", 0), ("1", 0), ("∨", 2)]).unwrap()
    }

    #[test]
    fn parses_two_element_file() {
        let a = parse_algebra(L2).unwrap();
        assert_eq!(a.size(), 2);
        assert_eq!(a.apply(0, &[1, 0]), 1);
        let back = parse_algebra(&algebra_to_json(&a)).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn distinct_errors() {
        let out_of_range = L2.replace(r#""*":[0,0,0,1]"#, r#""*":[0,0,0,2]"#);
        assert!(matches!(parse_algebra(&out_of_range), Err(ParseError::OutOfRange { value: 2, .. })));
        let short = L2.replace(r#""*":[0,0,0,1]"#, r#""*":[0,0,1]"#);
        assert!(matches!(parse_algebra(&short), Err(ParseError::TableLength { expected: 4, found: 3, .. })));
        assert!(matches!(parse_algebra("{\"signature\": ["), Err(ParseError::Syntax { line: 1, .. })));
        let missing = L2.replace(r#","1":[1]"#, "");
        assert!(matches!(parse_algebra(&missing), Err(ParseError::Invalid(AlgebraError::MissingTable(_)))));
    }

    #[test]
    fn term_syntax() {
        let s = sig();
        let t = parse_term(" +( x , *(y,0))", &s).unwrap();
        assert_eq!(t.to_string(), "+(x,*(y,0))");
        assert_eq!(parse_term("∨(x,1)", &s).unwrap().to_string(), "∨(x,1)");
        assert_eq!(parse_term("0", &s).unwrap(), Term::constant("0"));
        assert_eq!(parse_term("x1", &s).unwrap(), Term::var("x1"));
        assert!(matches!(parse_term("+(x)", &s), Err(ParseError::ArityMismatch { found: 1, .. })));
        assert!(matches!(parse_term("f(x)", &s), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse_term("+(x,y", &s), Err(ParseError::TermSyntax { .. })));
        assert!(matches!(parse_term("x y", &s), Err(ParseError::TermSyntax { offset: 2, .. })));
        assert!(matches!(parse_term("+", &s), Err(ParseError::ArityMismatch { found: 0, .. })));
    }
}
