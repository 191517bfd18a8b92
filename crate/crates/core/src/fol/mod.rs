//! First-order formulas over a signature with equality: syntax, evaluation,
//! the formula builders, Σ, preservation testers and the back-and-forth game.
//!
//! Text syntax (s-expressions; terms use the prefix term syntax):
//!
//! ```text
//! formula := 'true' | 'false'
//!          | '(' '=' term term ')'
//!          | '(' 'not' formula ')'
//!          | '(' 'and' formula* ')' | '(' 'or' formula* ')'
//!          | '(' '->' formula formula ')'
//!          | '(' quant var+ formula ')' | quant var+ formula
//! quant   := 'forall' | 'exists'
//! ```

mod builders;
mod definability;
mod eval;
mod game;
mod parse;
mod preservation;
mod sigma;

pub use builders::{build_e, build_eo, build_o, build_phi12, build_semilattice_phi, family_taus, instantiate, BuildError, Phi12};
pub use definability::{check_definable_kernels, formula_relation, DefinabilityError, KernelDefinabilityReport, KernelEntry};
pub use eval::{eval_formula, eval_formula_with, EvalConfig, EvalError, Evaluator};
pub use game::{
    ef_game, is_partial_isomorphism, validate_strategy, Certificate, GameConfig, GameError, GameResult, Move, Player, Side,
    StrategyFailure, StrategyReport,
};
pub use parse::parse_formula;
pub use preservation::{
    check_factor_preservation, check_product_preservation, PreservationCounterexample, PreservationError, PreservationReport,
    Scope,
};
pub use sigma::{check_sigma, sigma_suite, NamedFormula, SigmaError, SigmaReport};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::algebra::Term;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(body))
    }

    /// `∀v₁ … ∀vₖ body`.
    pub fn forall_all<S: AsRef<str>>(vars: &[S], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::forall(v.as_ref(), acc))
    }

    pub fn exists_all<S: AsRef<str>>(vars: &[S], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::exists(v.as_ref(), acc))
    }

    /// Conjunction of one or more formulas without a wrapper for a single one.
    pub fn conj(mut parts: Vec<Formula>) -> Formula {
        if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) => {
                for v in a.vars().into_iter().chain(b.vars()) {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring, free or bound.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Eq(a, b) => out.extend(a.vars().into_iter().chain(b.vars())),
            Formula::Forall(v, _) | Formula::Exists(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(g) | Formula::Forall(_, g) | Formula::Exists(_, g) => g.visit(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit(f)),
            Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Eq(..) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::quantifier_depth).max().unwrap_or(0),
            Formula::Implies(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.quantifier_depth(),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Simultaneous, capture-avoiding substitution of terms for free variables.
    pub fn substitute(&self, map: &HashMap<String, Term>) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(a.substitute(map), b.substitute(map)),
            Formula::Not(f) => Formula::not(f.substitute(map)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(map)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(map)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map), b.substitute(map)),
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                let free = f.free_vars();
                let mut inner: HashMap<String, Term> =
                    map.iter().filter(|(k, _)| *k != v && free.contains(*k)).map(|(k, t)| (k.clone(), t.clone())).collect();
                let captures = inner.values().any(|t| t.mentions(v));
                let name = if captures {
                    let mut avoid = f.all_vars();
                    avoid.extend(inner.values().flat_map(Term::vars));
                    avoid.extend(inner.keys().cloned());
                    let fresh = fresh_name(v, &avoid);
                    inner.insert(v.clone(), Term::var(fresh.clone()));
                    fresh
                } else {
                    v.clone()
                };
                let body = Box::new(f.substitute(&inner));
                if matches!(self, Formula::Forall(..)) {
                    Formula::Forall(name, body)
                } else {
                    Formula::Exists(name, body)
                }
            }
        }
    }

    /// Syntactic fragment membership, computed from the polarity of each node.
    pub fn classify(&self) -> FormulaClass {
        let mut c = FormulaClass { quantifier_free: true, positive: true, existential: true, universal: true };
        self.classify_into(true, &mut c);
        c
    }

    fn classify_into(&self, positive: bool, c: &mut FormulaClass) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(..) => {
                if !positive {
                    c.positive = false;
                }
            }
            Formula::Not(f) => f.classify_into(!positive, c),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.classify_into(positive, c)),
            Formula::Implies(a, b) => {
                a.classify_into(!positive, c);
                b.classify_into(positive, c);
            }
            Formula::Forall(_, f) | Formula::Exists(_, f) => {
                c.quantifier_free = false;
                // A universal in positive position (or existential in negative) is universal in effect.
                let universal = matches!(self, Formula::Forall(..)) == positive;
                if universal {
                    c.existential = false;
                } else {
                    c.universal = false;
                }
                f.classify_into(positive, c);
            }
        }
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    (1..).map(|i| format!("{base}_{i}")).find(|n| !avoid.contains(n)).expect("infinitely many names")
}

/// Syntactic tags used in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FormulaClass {
    pub quantifier_free: bool,
    /// No equation occurs negatively.
    pub positive: bool,
    /// Every quantifier is existential in effect.
    pub existential: bool,
    /// Every quantifier is universal in effect.
    pub universal: bool,
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, fs: &[Formula]| {
            write!(f, "({head}")?;
            for g in fs {
                write!(f, " {g}")?;
            }
            f.write_str(")")
        };
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(gs) => list(f, "and", gs),
            Formula::Or(gs) => list(f, "or", gs),
            Formula::Implies(a, b) => write!(f, "(-> {a} {b})"),
            Formula::Forall(v, g) => write!(f, "(forall {v} {g})"),
            Formula::Exists(v, g) => write!(f, "(exists {v} {g})"),
        }
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    #[test]
    fn free_variables_and_depth() {
        let f = Formula::forall("u", Formula::and_eq(v("x"), v("u")));
        assert_eq!(f.free_vars(), BTreeSet::from(["x".to_string()]));
        assert_eq!(f.quantifier_depth(), 1);
    }

    #[test]
    fn substitution_avoids_capture() {
        // ∀u (x = u)  with x := u  must not become ∀u (u = u).
        let f = Formula::forall("u", Formula::eq(v("x"), v("u")));
        let g = f.substitute(&HashMap::from([("x".to_string(), v("u"))]));
        assert_eq!(g.to_string(), "(forall u_1 (= u u_1))");
        assert_eq!(g.free_vars(), BTreeSet::from(["u".to_string()]));
        // Bound occurrences are untouched.
        let h = f.substitute(&HashMap::from([("u".to_string(), v("y"))]));
        assert_eq!(h, f);
    }

    #[test]
    fn simultaneous_substitution() {
        let f = Formula::eq(v("x"), v("y"));
        let g = f.substitute(&HashMap::from([("x".to_string(), v("y")), ("y".to_string(), v("x"))]));
        assert_eq!(g.to_string(), "(= y x)");
    }

    #[test]
    fn classification() {
        let phi = Formula::forall("u", Formula::implies(Formula::eq(v("x"), v("u")), Formula::eq(v("y"), v("u"))));
        let c = phi.classify();
        assert!(!c.positive && !c.existential && c.universal && !c.quantifier_free);
        let psi = Formula::not(Formula::forall("u", Formula::eq(v("x"), v("u"))));
        let c = psi.classify();
        assert!(c.existential && !c.universal && !c.positive);
    }

    impl Formula {
        fn and_eq(a: Term, b: Term) -> Formula {
            Formula::And(vec![Formula::eq(a, b), Formula::True])
        }
    }
}
