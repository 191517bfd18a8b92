use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use super::{Algebra, Element, Signature, MAX_ARITY};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("`{symbol}` expects {expected} arguments, got {found}")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("variable `{var}` bound to {value}, outside the universe")]
    ValueOutOfRange { var: String, value: Element },
    #[error("term `{0}` is not closed")]
    NotClosed(String),
    #[error("0⃗ has length {zeros} but 1⃗ has length {ones}; both must be equal and positive")]
    ZeroOneLength { zeros: usize, ones: usize },
}

/// A term over named variables and operation symbols.
///
/// Constants are applications of 0-ary symbols with no arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn app(op: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(op.into(), args)
    }

    pub fn constant(op: impl Into<String>) -> Term {
        Term::App(op.into(), Vec::new())
    }

    pub fn binary(op: &str, a: Term, b: Term) -> Term {
        Term::App(op.to_string(), vec![a, b])
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn var_set(&self) -> BTreeSet<String> {
        self.vars().into_iter().collect()
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::App(_, args) => args.iter().any(|a| a.mentions(var)),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_closed),
        }
    }

    /// Variables and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Simultaneous substitution of variables.
    pub fn substitute(&self, map: &HashMap<String, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(op, args) => Term::App(op.clone(), args.iter().map(|a| a.substitute(map)).collect()),
        }
    }

    /// Checks that every symbol exists in `sig` with the arity used.
    pub fn check(&self, sig: &Signature) -> Result<(), TermError> {
        match self {
            Term::Var(_) => Ok(()),
            Term::App(op, args) => {
                let sym = sig.lookup(op).ok_or_else(|| TermError::UnknownSymbol(op.clone()))?;
                if sym.arity != args.len() {
                    return Err(TermError::ArityMismatch { symbol: op.clone(), expected: sym.arity, found: args.len() });
                }
                args.iter().try_for_each(|a| a.check(sig))
            }
        }
    }

    /// Resolves symbols against `sig` and variables against the slot list `vars`.
    pub fn compile<S: AsRef<str>>(&self, sig: &Signature, vars: &[S]) -> Result<CompiledTerm, TermError> {
        self.compile_with(sig, &|v| vars.iter().position(|s| s.as_ref() == v))
    }

    /// Like [`Term::compile`], with variable slots chosen by `resolve`.
    pub fn compile_with(&self, sig: &Signature, resolve: &dyn Fn(&str) -> Option<usize>) -> Result<CompiledTerm, TermError> {
        Ok(CompiledTerm { root: compile_node(self, sig, resolve)? })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(op, args) if args.is_empty() => f.write_str(op),
            Term::App(op, args) => {
                write!(f, "{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Evaluates `t` in `a` under `env`.
pub fn eval_term(a: &Algebra, t: &Term, env: &HashMap<String, Element>) -> Result<Element, TermError> {
    match t {
        Term::Var(v) => {
            let value = *env.get(v).ok_or_else(|| TermError::UnboundVariable(v.clone()))?;
            if value >= a.size() {
                return Err(TermError::ValueOutOfRange { var: v.clone(), value });
            }
            Ok(value)
        }
        Term::App(op, args) => {
            let idx = a.op_index(op).ok_or_else(|| TermError::UnknownSymbol(op.clone()))?;
            let arity = a.signature().arity(idx);
            if arity != args.len() {
                return Err(TermError::ArityMismatch { symbol: op.clone(), expected: arity, found: args.len() });
            }
            let mut values = [0; MAX_ARITY];
            for (slot, arg) in values.iter_mut().zip(args) {
                *slot = eval_term(a, arg, env)?;
            }
            Ok(a.apply(idx, &values[..arity]))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Var(usize),
    App(usize, Box<[Node]>),
}

fn compile_node(t: &Term, sig: &Signature, resolve: &dyn Fn(&str) -> Option<usize>) -> Result<Node, TermError> {
    match t {
        Term::Var(v) => resolve(v).map(Node::Var).ok_or_else(|| TermError::UnboundVariable(v.clone())),
        Term::App(op, args) => {
            let idx = sig.index_of(op).ok_or_else(|| TermError::UnknownSymbol(op.clone()))?;
            if sig.arity(idx) != args.len() {
                return Err(TermError::ArityMismatch { symbol: op.clone(), expected: sig.arity(idx), found: args.len() });
            }
            let children = args.iter().map(|a| compile_node(a, sig, resolve)).collect::<Result<Vec<_>, _>>()?;
            Ok(Node::App(idx, children.into_boxed_slice()))
        }
    }
}

/// A term with symbols and variables resolved to indices; evaluation does no lookups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledTerm {
    root: Node,
}

impl CompiledTerm {
    /// `env[i]` is the value of the i-th variable slot given at compile time.
    #[inline]
    pub fn eval(&self, a: &Algebra, env: &[Element]) -> Element {
        eval_node(&self.root, a, env)
    }
}

fn eval_node(node: &Node, a: &Algebra, env: &[Element]) -> Element {
    match node {
        Node::Var(i) => env[*i],
        Node::App(op, args) => {
            let mut values = [0; MAX_ARITY];
            for (slot, arg) in values.iter_mut().zip(args.iter()) {
                *slot = eval_node(arg, a, env);
            }
            a.apply(*op, &values[..args.len()])
        }
    }
}

/// Names `base` when `l == 1`, otherwise `base1..basel`.
pub fn indexed_names(base: &str, l: usize) -> Vec<String> {
    if l == 1 {
        vec![base.to_string()]
    } else {
        (1..=l).map(|i| format!("{base}{i}")).collect()
    }
}

/// The closed term tuples 0⃗ and 1⃗ of a variety with 0⃗ and 1⃗.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZeroOneSpec {
    zeros: Vec<Term>,
    ones: Vec<Term>,
}

impl ZeroOneSpec {
    pub fn new(zeros: Vec<Term>, ones: Vec<Term>) -> Result<Self, TermError> {
        if zeros.len() != ones.len() || zeros.is_empty() {
            return Err(TermError::ZeroOneLength { zeros: zeros.len(), ones: ones.len() });
        }
        if let Some(t) = zeros.iter().chain(&ones).find(|t| !t.is_closed()) {
            return Err(TermError::NotClosed(t.to_string()));
        }
        Ok(ZeroOneSpec { zeros, ones })
    }

    /// `0⃗ = (0)`, `1⃗ = (1)` using the constants named "0" and "1".
    pub fn standard() -> Self {
        ZeroOneSpec { zeros: vec![Term::constant("0")], ones: vec![Term::constant("1")] }
    }

    pub fn l(&self) -> usize {
        self.zeros.len()
    }

    pub fn zeros(&self) -> &[Term] {
        &self.zeros
    }

    pub fn ones(&self) -> &[Term] {
        &self.ones
    }

    pub fn check(&self, sig: &Signature) -> Result<(), TermError> {
        self.zeros.iter().chain(&self.ones).try_for_each(|t| t.check(sig))
    }

    /// The element tuples denoted by 0⃗ and 1⃗ in `a`.
    pub fn values(&self, a: &Algebra) -> Result<(Vec<Element>, Vec<Element>), TermError> {
        let env = HashMap::new();
        let zeros = self.zeros.iter().map(|t| eval_term(a, t, &env)).collect::<Result<_, _>>()?;
        let ones = self.ones.iter().map(|t| eval_term(a, t, &env)).collect::<Result<_, _>>()?;
        Ok((zeros, ones))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice2() -> Algebra {
        let sig = Signature::from_pairs(&[("*", 2), ("0", 0), ("1", 0)]).unwrap();
        Algebra::from_fn(sig, 2, |op, a| match op {
            0 => a[0].min(a[1]),
            1 => 0,
            _ => 1,
        })
        .unwrap()
    }

    #[test]
    fn variable_evaluates_to_its_binding() {
        let a = lattice2();
        let env = HashMap::from([("x".to_string(), 1)]);
        assert_eq!(eval_term(&a, &Term::var("x"), &env), Ok(1));
    }

    #[test]
    fn evaluation_errors() {
        let a = lattice2();
        let env = HashMap::new();
        assert_eq!(eval_term(&a, &Term::var("x"), &env), Err(TermError::UnboundVariable("x".into())));
        assert!(matches!(eval_term(&a, &Term::constant("+"), &env), Err(TermError::UnknownSymbol(_))));
        let bad = Term::app("*", vec![Term::constant("0")]);
        assert!(matches!(eval_term(&a, &bad, &env), Err(TermError::ArityMismatch { expected: 2, found: 1, .. })));
    }

    #[test]
    fn compiled_agrees_with_named() {
        let a = lattice2();
        let t = Term::binary("*", Term::var("y"), Term::binary("*", Term::var("x"), Term::constant("1")));
        let c = t.compile(a.signature(), &["x", "y"]).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                let env = HashMap::from([("x".to_string(), x), ("y".to_string(), y)]);
                assert_eq!(c.eval(&a, &[x, y]), eval_term(&a, &t, &env).unwrap());
            }
        }
        assert_eq!(t.to_string(), "*(y,*(x,1))");
        assert_eq!(t.depth(), 2);
        assert_eq!(t.vars(), vec!["y".to_string(), "x".to_string()]);
    }

    #[test]
    fn zero_one_spec_validation() {
        assert!(ZeroOneSpec::new(vec![Term::var("x")], vec![Term::constant("1")]).is_err());
        assert!(ZeroOneSpec::new(vec![], vec![]).is_err());
        let z = ZeroOneSpec::standard();
        assert_eq!(z.values(&lattice2()).unwrap(), (vec![0], vec![1]));
        assert_eq!(indexed_names("z", 1), vec!["z"]);
        assert_eq!(indexed_names("z", 2), vec!["z1", "z2"]);
    }
}
