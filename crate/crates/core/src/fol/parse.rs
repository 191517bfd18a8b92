use crate::algebra::{is_identifier, parse_term_at, read_symbol, skip_ws, ParseError, Signature};

use super::Formula;

const KEYWORDS: [&str; 8] = ["true", "false", "not", "and", "or", "->", "forall", "exists"];

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::TermSyntax { offset, message: message.into() }
}

/// Parses the s-expression formula syntax described in the module docs.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let (f, end) = formula_at(text, 0, sig)?;
    let end = skip_ws(text, end);
    if end != text.len() {
        return Err(syntax(end, "trailing input after formula"));
    }
    Ok(f)
}

fn expect_close(text: &str, pos: usize) -> Result<usize, ParseError> {
    let pos = skip_ws(text, pos);
    if text[pos..].starts_with(')') {
        Ok(pos + 1)
    } else {
        Err(syntax(pos, "expected `)`"))
    }
}

fn formula_at(text: &str, pos: usize, sig: &Signature) -> Result<(Formula, usize), ParseError> {
    let pos = skip_ws(text, pos);
    if text[pos..].starts_with('(') {
        let (start, head, end) = read_symbol(text, pos + 1);
        let (f, end) = match head {
            "=" => {
                let (a, end) = parse_term_at(text, end, sig)?;
                let (b, end) = parse_term_at(text, end, sig)?;
                (Formula::Eq(a, b), end)
            }
            "not" => {
                let (f, end) = formula_at(text, end, sig)?;
                (Formula::not(f), end)
            }
            "and" | "or" => {
                let mut parts = Vec::new();
                let mut at = end;
                while !text[skip_ws(text, at)..].starts_with(')') {
                    if skip_ws(text, at) == text.len() {
                        return Err(syntax(text.len(), "unclosed connective"));
                    }
                    let (f, next) = formula_at(text, at, sig)?;
                    parts.push(f);
                    at = next;
                }
                (if head == "and" { Formula::And(parts) } else { Formula::Or(parts) }, at)
            }
            "->" => {
                let (a, end) = formula_at(text, end, sig)?;
                let (b, end) = formula_at(text, end, sig)?;
                (Formula::implies(a, b), end)
            }
            "forall" | "exists" => quantified(text, head, end, sig)?,
            "" => return Err(syntax(start, "expected a connective after `(`")),
            other => return Err(syntax(start, format!("unknown connective `{other}`"))),
        };
        return Ok((f, expect_close(text, end)?));
    }
    let (start, word, end) = read_symbol(text, pos);
    match word {
        "true" => Ok((Formula::True, end)),
        "false" => Ok((Formula::False, end)),
        "forall" | "exists" => quantified(text, word, end, sig),
        "" if start == text.len() => Err(syntax(start, "expected a formula, found end of input")),
        "" => Err(syntax(start, "expected a formula")),
        other => Err(syntax(start, format!("expected a formula, found `{other}`"))),
    }
}

/// Reads `v₁ … vₖ φ` after a quantifier keyword.
fn quantified(text: &str, keyword: &str, pos: usize, sig: &Signature) -> Result<(Formula, usize), ParseError> {
    let mut vars = Vec::new();
    let mut at = pos;
    loop {
        let (start, word, end) = read_symbol(text, at);
        if word.is_empty() || KEYWORDS.contains(&word) {
            break;
        }
        if !is_identifier(word) || sig.index_of(word).is_some() {
            return Err(syntax(start, format!("`{word}` cannot be a bound variable")));
        }
        vars.push(word.to_string());
        at = end;
    }
    if vars.is_empty() {
        return Err(syntax(skip_ws(text, pos), format!("`{keyword}` needs at least one variable")));
    }
    let (body, end) = formula_at(text, at, sig)?;
    let f = if keyword == "forall" { Formula::forall_all(&vars, body) } else { Formula::exists_all(&vars, body) };
    Ok((f, end))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::from_pairs(&[("+", 2), ("*", 2), ("0", 0), ("1", 0), ("∨", 2)]).unwrap()
    }

    #[test]
    fn round_trip() {
        let s = sig();
        for text in [
            "true",
            "(= x y)",
            "(forall u (-> (and (= ∨(+(x,z),u) ∨(+(x,0),u))) (= ∨(x,u) ∨(y,u))))",
            "(exists u (not (= u x)))",
            "(or (= x 0) (and) (= *(x,1) x))",
        ] {
            let f = parse_formula(text, &s).unwrap();
            assert_eq!(f.to_string(), text);
            assert_eq!(parse_formula(&f.to_string(), &s).unwrap(), f);
        }
    }

    #[test]
    fn quantifier_blocks() {
        let s = sig();
        let f = parse_formula("forall u v (= u v)", &s).unwrap();
        assert_eq!(f.to_string(), "(forall u (forall v (= u v)))");
        let g = parse_formula("(exists u v (= u v))", &s).unwrap();
        assert_eq!(g.to_string(), "(exists u (exists v (= u v)))");
        let h = parse_formula("exists u forall v (= u v)", &s).unwrap();
        assert_eq!(h.quantifier_depth(), 2);
    }

    #[test]
    fn errors_carry_offsets() {
        let s = sig();
        assert!(matches!(parse_formula("(= x y", &s), Err(ParseError::TermSyntax { offset: 6, .. })));
        assert!(matches!(parse_formula("(xor true)", &s), Err(ParseError::TermSyntax { offset: 1, .. })));
        assert!(matches!(parse_formula("(= f(x) y)", &s), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse_formula("forall (= x x)", &s), Err(ParseError::TermSyntax { .. })));
        assert!(matches!(parse_formula("forall 0 (= x x)", &s), Err(ParseError::TermSyntax { offset: 7, .. })));
        assert!(matches!(parse_formula("true true", &s), Err(ParseError::TermSyntax { offset: 5, .. })));
        assert!(matches!(parse_formula("(and (= x x)", &s), Err(ParseError::TermSyntax { .. })));
    }
}
