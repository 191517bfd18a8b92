use serde::Serialize;

use crate::algebra::{decode_tuple, direct_product, Algebra, AlgebraError, Element};

use super::{EvalConfig, EvalError, Evaluator, Formula};

/// Counterexamples kept in a report; the total is always counted.
const KEPT: usize = 32;

/// Which assignments a preservation check ranges over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scope {
    /// Every `(a⃗, b⃗)` with `a⃗ ∈ Aʳ`, `b⃗ ∈ Bʳ`, `r` the number of free variables.
    Exhaustive,
    /// Only the listed pairs of tuples.
    Tuples(Vec<(Vec<Element>, Vec<Element>)>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreservationCounterexample {
    pub a: Vec<Element>,
    pub b: Vec<Element>,
    pub in_a: bool,
    pub in_b: bool,
    pub in_product: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreservationReport {
    /// Free variables of φ in the order the tuples use (sorted by name).
    pub variables: Vec<String>,
    pub checked: u64,
    pub count: u64,
    pub counterexamples: Vec<PreservationCounterexample>,
    pub holds: bool,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum PreservationError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("tuple of length {found}, expected {expected}")]
    Length { expected: usize, found: usize },
}

/// Counterexamples to `A ⊨ φ(a⃗) ∧ B ⊨ φ(b⃗) ⇒ A×B ⊨ φ([a⃗,b⃗])`.
pub fn check_product_preservation(
    phi: &Formula,
    a: &Algebra,
    b: &Algebra,
    scope: &Scope,
    config: EvalConfig,
) -> Result<PreservationReport, PreservationError> {
    run(phi, a, b, scope, config, |ia, ib, ip| !(ia && ib) || ip)
}

/// Counterexamples to `A×B ⊨ φ([a⃗,b⃗]) ⇒ A ⊨ φ(a⃗) ∧ B ⊨ φ(b⃗)`.
pub fn check_factor_preservation(
    phi: &Formula,
    a: &Algebra,
    b: &Algebra,
    scope: &Scope,
    config: EvalConfig,
) -> Result<PreservationReport, PreservationError> {
    run(phi, a, b, scope, config, |ia, ib, ip| !ip || (ia && ib))
}

fn run(
    phi: &Formula,
    a: &Algebra,
    b: &Algebra,
    scope: &Scope,
    config: EvalConfig,
    ok: impl Fn(bool, bool, bool) -> bool,
) -> Result<PreservationReport, PreservationError> {
    let variables: Vec<String> = phi.free_vars().into_iter().collect();
    let r = variables.len();
    let prod = direct_product(&[a, b])?;
    let mut ev_a = Evaluator::new(a, phi, &variables, config)?;
    let mut ev_b = Evaluator::new(b, phi, &variables, config)?;
    let mut ev_p = Evaluator::new(prod.algebra(), phi, &variables, config)?;

    let tuples: Vec<(Vec<Element>, Vec<Element>)> = match scope {
        Scope::Tuples(t) => {
            for (x, y) in t {
                for len in [x.len(), y.len()] {
                    if len != r {
                        return Err(PreservationError::Length { expected: r, found: len });
                    }
                }
            }
            t.clone()
        }
        Scope::Exhaustive => {
            let all = |size: usize| -> Vec<Vec<Element>> {
                let count = size.pow(r as u32);
                (0..count)
                    .map(|i| {
                        let mut t = vec![0; r];
                        decode_tuple(i, size, &mut t);
                        t
                    })
                    .collect()
            };
            let bs = all(b.size());
            all(a.size()).into_iter().flat_map(|x| bs.iter().map(move |y| (x.clone(), y.clone()))).collect()
        }
    };

    let mut report = PreservationReport { variables, checked: 0, count: 0, counterexamples: Vec::new(), holds: true };
    for (x, y) in tuples {
        let in_a = ev_a.eval(&x)?;
        let in_b = ev_b.eval(&y)?;
        let joined: Vec<Element> = x.iter().zip(&y).map(|(&p, &q)| prod.encode(&[p, q])).collect();
        let in_product = ev_p.eval(&joined)?;
        report.checked += 1;
        if !ok(in_a, in_b, in_product) {
            report.count += 1;
            report.holds = false;
            if report.counterexamples.len() < KEPT {
                report.counterexamples.push(PreservationCounterexample { a: x, b: y, in_a, in_b, in_product });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Term;
    use crate::gallery::{base_signature, build_l};

    #[test]
    fn atomic_is_preserved_both_ways() {
        let phi = Formula::eq(Term::binary("+", Term::var("x"), Term::var("y")), Term::var("y"));
        let (l2, l3) = (build_l(2, false).unwrap(), build_l(3, false).unwrap());
        let p = check_product_preservation(&phi, &l2, &l3, &Scope::Exhaustive, EvalConfig::default()).unwrap();
        let f = check_factor_preservation(&phi, &l2, &l3, &Scope::Exhaustive, EvalConfig::default()).unwrap();
        assert_eq!(p.checked, 4 * 9);
        assert!(p.holds && f.holds);
    }

    #[test]
    fn cardinality_fails_for_factors() {
        let phi = Formula::exists("u", Formula::not(Formula::eq(Term::var("u"), Term::var("x"))));
        let one = Algebra::trivial(base_signature());
        let l2 = build_l(2, false).unwrap();
        let f = check_factor_preservation(&phi, &one, &l2, &Scope::Exhaustive, EvalConfig::default()).unwrap();
        assert!(!f.holds);
        assert_eq!(f.count, 2);
        let c = &f.counterexamples[0];
        assert!(c.in_product && !c.in_a && c.in_b);
        let p = check_product_preservation(&phi, &one, &l2, &Scope::Exhaustive, EvalConfig::default()).unwrap();
        assert!(p.holds);
    }

    #[test]
    fn tuple_scope_checks_lengths() {
        let phi = Formula::eq(Term::var("x"), Term::var("x"));
        let l2 = build_l(2, false).unwrap();
        let scope = Scope::Tuples(vec![(vec![0, 1], vec![0])]);
        assert!(matches!(
            check_product_preservation(&phi, &l2, &l2, &scope, EvalConfig::default()),
            Err(PreservationError::Length { expected: 1, found: 2 })
        ));
    }
}
