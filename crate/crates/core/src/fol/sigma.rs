use serde::Serialize;
use thiserror::Error;

use crate::algebra::{indexed_names, Algebra, Element, Signature, Term, ZeroOneSpec};

use super::builders::instantiate;
use super::{EvalConfig, EvalError, Evaluator, Formula};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigmaError {
    #[error("Φ may only have the free variables {expected}, found {found}")]
    FreeVariables { expected: String, found: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("expected tuples of length {expected}")]
    Length { expected: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedFormula {
    pub name: String,
    pub formula: Formula,
}

/// The axioms asserting that `Φ(·,·,e⃗)` and `Φ(·,·,f⃗)` define complementary
/// factor congruences with `e⃗` and `f⃗` as their central elements.
///
/// Free variables of every member are `e⃗, f⃗` (named `e`, `f` when `l = 1`,
/// else `e1…el`, `f1…fl`). In `PRES_F` the element `z` is universally
/// quantified along with the `uⱼ, vⱼ`.
pub fn sigma_suite(sig: &Signature, phi: &Formula, z: &ZeroOneSpec) -> Result<Vec<NamedFormula>, SigmaError> {
    let l = z.l();
    let mut allowed = vec!["x".to_string(), "y".to_string()];
    allowed.extend(indexed_names("z", l));
    let free = phi.free_vars();
    if !free.iter().all(|v| allowed.contains(v)) {
        return Err(SigmaError::FreeVariables {
            expected: allowed.join(","),
            found: free.into_iter().collect::<Vec<_>>().join(","),
        });
    }
    fn v(s: &str) -> Term {
        Term::var(s)
    }
    let es: Vec<Term> = indexed_names("e", l).into_iter().map(Term::var).collect();
    let fs: Vec<Term> = indexed_names("f", l).into_iter().map(Term::var).collect();
    let at = |a: Term, b: Term, w: &[Term]| instantiate(phi, z, a, b, w);
    let eq = |a: &str, b: &str| Formula::eq(v(a), v(b));

    let mut out = Vec::new();
    // The primed variants swap the roles of e⃗ and f⃗.
    for (prime, e, f) in [("", &es, &fs), ("'", &fs, &es)] {
        let can = Formula::And(
            (0..l)
                .map(|i| at(z.zeros()[i].clone(), e[i].clone(), e))
                .chain((0..l).map(|i| at(z.ones()[i].clone(), f[i].clone(), e)))
                .collect(),
        );
        let refl = Formula::forall("x", at(v("x"), v("x"), e));
        let sym = Formula::forall_all(
            &["x", "y", "z"],
            Formula::implies(Formula::And(vec![at(v("x"), v("y"), e), at(v("y"), v("z"), e), at(v("z"), v("x"), f)]), eq("z", "x")),
        );
        let trans = Formula::forall_all(
            &["x", "y", "z", "u"],
            Formula::implies(
                Formula::And(vec![at(v("x"), v("y"), e), at(v("y"), v("z"), e), at(v("x"), v("u"), e), at(v("u"), v("z"), f)]),
                eq("u", "z"),
            ),
        );
        out.push((format!("CAN{prime}"), can));
        if prime.is_empty() {
            let prod = Formula::forall_all(&["x", "y"], Formula::exists("z", Formula::And(vec![at(v("x"), v("z"), e), at(v("z"), v("y"), f)])));
            let int = Formula::forall_all(&["x", "y"], Formula::implies(Formula::And(vec![at(v("x"), v("y"), e), at(v("x"), v("y"), f)]), eq("x", "y")));
            out.push(("PROD".into(), prod));
            out.push(("INT".into(), int));
        }
        out.push((format!("REF{prime}"), refl));
        out.push((format!("SYM{prime}"), sym));
        out.push((format!("TRANS{prime}"), trans));
    }
    for op in 0..sig.len() {
        let m = sig.arity(op);
        let us: Vec<String> = (1..=m).map(|j| format!("u{j}")).collect();
        let vs: Vec<String> = (1..=m).map(|j| format!("v{j}")).collect();
        let fu = Term::app(sig.name(op), us.iter().map(|s| v(s)).collect());
        let fv = Term::app(sig.name(op), vs.iter().map(|s| v(s)).collect());
        let mut bound: Vec<String> = us.iter().zip(&vs).flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
        bound.push("z".into());
        for (prime, e, f) in [("", &es, &fs), ("'", &fs, &es)] {
            let mut hyps: Vec<Formula> = us.iter().zip(&vs).map(|(a, b)| at(v(a), v(b), e)).collect();
            hyps.push(at(fu.clone(), v("z"), e));
            hyps.push(at(v("z"), fv.clone(), f));
            let body = Formula::implies(Formula::And(hyps), Formula::eq(v("z"), fv.clone()));
            out.push((format!("PRES_{}{prime}", sig.name(op)), Formula::forall_all(&bound, body)));
        }
    }
    Ok(out.into_iter().map(|(name, formula)| NamedFormula { name, formula }).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SigmaReport {
    pub e: Vec<Element>,
    pub f: Vec<Element>,
    pub results: Vec<(String, bool)>,
    pub holds: bool,
}

impl SigmaReport {
    pub fn failed(&self) -> Vec<&str> {
        self.results.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect()
    }
}

/// Evaluates every member of `suite` at `(e⃗, f⃗)`.
pub fn check_sigma(a: &Algebra, suite: &[NamedFormula], e: &[Element], f: &[Element], config: EvalConfig) -> Result<SigmaReport, SigmaError> {
    if e.len() != f.len() || e.is_empty() {
        return Err(SigmaError::Length { expected: e.len().max(1) });
    }
    let l = e.len();
    let order: Vec<String> = indexed_names("e", l).into_iter().chain(indexed_names("f", l)).collect();
    let values: Vec<Element> = e.iter().chain(f).copied().collect();
    let mut results = Vec::with_capacity(suite.len());
    for member in suite {
        let mut ev = Evaluator::new(a, &member.formula, &order, config)?;
        results.push((member.name.clone(), ev.eval(&values)?));
    }
    let holds = results.iter().all(|(_, ok)| *ok);
    Ok(SigmaReport { e: e.to_vec(), f: f.to_vec(), results, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::join_signature;

    #[test]
    fn suite_shape() {
        let phi = Formula::eq(Term::var("x"), Term::var("y"));
        let suite = sigma_suite(&join_signature(), &phi, &ZeroOneSpec::standard()).unwrap();
        assert_eq!(suite.len(), 10 + 2 * 5);
        let names: Vec<&str> = suite.iter().map(|m| m.name.as_str()).collect();
        for n in ["CAN", "PROD", "INT", "REF", "SYM", "TRANS", "CAN'", "REF'", "SYM'", "TRANS'", "PRES_∨", "PRES_0'"] {
            assert!(names.contains(&n), "{n}");
        }
        for m in &suite {
            let free: Vec<String> = m.formula.free_vars().into_iter().collect();
            assert!(free.iter().all(|v| v == "e" || v == "f"), "{}: {free:?}", m.name);
        }
        let bad = Formula::eq(Term::var("w"), Term::var("y"));
        assert!(matches!(sigma_suite(&join_signature(), &bad, &ZeroOneSpec::standard()), Err(SigmaError::FreeVariables { .. })));
    }
}
