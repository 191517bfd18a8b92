use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::algebra::{Algebra, CompiledTerm, Element, TermError};

use super::Formula;

/// Dense memo tables larger than this many entries are not allocated.
const MEMO_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    /// Maximum number of formula nodes visited per top-level evaluation.
    pub budget: u64,
    /// Cache the truth value of quantified subformulas by the values of their free variables.
    pub memoize: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { budget: 1_000_000_000, memoize: true }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("free variable `{0}` has no value")]
    Unbound(String),
    #[error("expected {expected} values, got {found}")]
    EnvLength { expected: usize, found: usize },
    #[error("value {value} for `{var}` is outside the universe")]
    ValueOutOfRange { var: String, value: Element },
    #[error("work budget of {budget} nodes exceeded while evaluating {subformula}")]
    BudgetExceeded { budget: u64, subformula: String },
}

enum Node {
    True,
    False,
    Eq(CompiledTerm, CompiledTerm),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    Quant { universal: bool, slot: usize, body: Box<Node>, id: usize },
}

struct QuantInfo {
    text: Formula,
    /// Slots free in the quantified formula, in increasing order.
    key: Vec<usize>,
    /// 0 = unknown, 1 = false, 2 = true; empty when not memoized.
    memo: Vec<u8>,
}

/// A formula compiled against one algebra, reusable across assignments.
///
/// Free variables occupy the first slots in the order given to [`Evaluator::new`];
/// each binder gets its own slot, so shadowing needs no bookkeeping at run time.
pub struct Evaluator<'a> {
    algebra: &'a Algebra,
    free: Vec<String>,
    root: Node,
    slots: usize,
    quants: Vec<QuantInfo>,
    config: EvalConfig,
    env: Vec<Element>,
    visited: u64,
}

struct Compiler<'s> {
    algebra: &'s Algebra,
    scope: Vec<(String, usize)>,
    slots: usize,
    quants: Vec<QuantInfo>,
    memoize: bool,
}

impl Compiler<'_> {
    fn resolve(&self, name: &str) -> Option<usize> {
        self.scope.iter().rev().find(|(n, _)| n == name).map(|&(_, s)| s)
    }

    /// Returns the node and the slots occurring free in it.
    fn compile(&mut self, f: &Formula) -> Result<(Node, BTreeSet<usize>), EvalError> {
        Ok(match f {
            Formula::True => (Node::True, BTreeSet::new()),
            Formula::False => (Node::False, BTreeSet::new()),
            Formula::Eq(a, b) => {
                for v in a.vars().into_iter().chain(b.vars()) {
                    if self.resolve(&v).is_none() {
                        return Err(EvalError::Unbound(v));
                    }
                }
                let sig = self.algebra.signature();
                let resolve = |v: &str| self.resolve(v);
                let ca = a.compile_with(sig, &resolve)?;
                let cb = b.compile_with(sig, &resolve)?;
                let used = a.vars().iter().chain(&b.vars()).filter_map(|v| self.resolve(v)).collect();
                (Node::Eq(ca, cb), used)
            }
            Formula::Not(g) => {
                let (n, used) = self.compile(g)?;
                (Node::Not(Box::new(n)), used)
            }
            Formula::And(gs) | Formula::Or(gs) => {
                let mut nodes = Vec::with_capacity(gs.len());
                let mut used = BTreeSet::new();
                for g in gs {
                    let (n, u) = self.compile(g)?;
                    nodes.push(n);
                    used.extend(u);
                }
                (if matches!(f, Formula::And(_)) { Node::And(nodes) } else { Node::Or(nodes) }, used)
            }
            Formula::Implies(a, b) => {
                let (na, mut ua) = self.compile(a)?;
                let (nb, ub) = self.compile(b)?;
                ua.extend(ub);
                (Node::Implies(Box::new(na), Box::new(nb)), ua)
            }
            Formula::Forall(v, g) | Formula::Exists(v, g) => {
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((v.clone(), slot));
                let id = self.quants.len();
                self.quants.push(QuantInfo { text: f.clone(), key: Vec::new(), memo: Vec::new() });
                let (body, mut used) = self.compile(g)?;
                self.scope.pop();
                used.remove(&slot);
                let key: Vec<usize> = used.iter().copied().collect();
                let cells = (0..key.len()).try_fold(1usize, |acc, _| acc.checked_mul(self.algebra.size()));
                if self.memoize {
                    if let Some(cells) = cells.filter(|&c| c <= MEMO_LIMIT) {
                        self.quants[id].memo = vec![0; cells];
                    }
                }
                self.quants[id].key = key;
                let universal = matches!(f, Formula::Forall(..));
                (Node::Quant { universal, slot, body: Box::new(body), id }, used)
            }
        })
    }
}

impl<'a> Evaluator<'a> {
    /// Compiles `f`; every free variable of `f` must appear in `free_order`.
    pub fn new<S: AsRef<str>>(algebra: &'a Algebra, f: &Formula, free_order: &[S], config: EvalConfig) -> Result<Self, EvalError> {
        let free: Vec<String> = free_order.iter().map(|s| s.as_ref().to_string()).collect();
        let mut c = Compiler {
            algebra,
            scope: free.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect(),
            slots: free.len(),
            quants: Vec::new(),
            memoize: config.memoize,
        };
        let (root, _) = c.compile(f)?;
        let slots = c.slots;
        Ok(Evaluator { algebra, free, root, slots, quants: c.quants, config, env: vec![0; slots], visited: 0 })
    }

    pub fn free_order(&self) -> &[String] {
        &self.free
    }

    /// Truth value with the free variables bound to `values` (in `free_order`).
    pub fn eval(&mut self, values: &[Element]) -> Result<bool, EvalError> {
        if values.len() != self.free.len() {
            return Err(EvalError::EnvLength { expected: self.free.len(), found: values.len() });
        }
        if let Some(i) = values.iter().position(|&v| v >= self.algebra.size()) {
            return Err(EvalError::ValueOutOfRange { var: self.free[i].clone(), value: values[i] });
        }
        self.env[..values.len()].copy_from_slice(values);
        self.visited = 0;
        let mut state = State { algebra: self.algebra, env: &mut self.env, quants: &mut self.quants, visited: 0, budget: self.config.budget };
        let r = state.eval(&self.root, None);
        self.visited = state.visited;
        debug_assert!(self.env.len() == self.slots);
        r
    }

    /// Nodes visited by the last call to [`Evaluator::eval`].
    pub fn visited(&self) -> u64 {
        self.visited
    }
}

struct State<'e> {
    algebra: &'e Algebra,
    env: &'e mut Vec<Element>,
    quants: &'e mut Vec<QuantInfo>,
    visited: u64,
    budget: u64,
}

impl State<'_> {
    fn eval(&mut self, node: &Node, innermost: Option<usize>) -> Result<bool, EvalError> {
        self.visited += 1;
        if self.visited > self.budget {
            let subformula = match innermost {
                Some(id) => self.quants[id].text.to_string(),
                None => "the top level".into(),
            };
            return Err(EvalError::BudgetExceeded { budget: self.budget, subformula });
        }
        Ok(match node {
            Node::True => true,
            Node::False => false,
            Node::Eq(a, b) => a.eval(self.algebra, self.env) == b.eval(self.algebra, self.env),
            Node::Not(g) => !self.eval(g, innermost)?,
            Node::And(gs) => {
                for g in gs {
                    if !self.eval(g, innermost)? {
                        return Ok(false);
                    }
                }
                true
            }
            Node::Or(gs) => {
                for g in gs {
                    if self.eval(g, innermost)? {
                        return Ok(true);
                    }
                }
                false
            }
            Node::Implies(a, b) => !self.eval(a, innermost)? || self.eval(b, innermost)?,
            Node::Quant { universal, slot, body, id } => {
                let n = self.algebra.size();
                let cell = if self.quants[*id].memo.is_empty() {
                    None
                } else {
                    let key = &self.quants[*id].key;
                    let cell = key.iter().fold(0, |acc, &s| acc * n + self.env[s]);
                    match self.quants[*id].memo[cell] {
                        0 => Some(cell),
                        v => return Ok(v == 2),
                    }
                };
                // ∀: true unless some witness fails; ∃: false unless some witness holds.
                let mut result = *universal;
                for v in 0..n {
                    self.env[*slot] = v;
                    if self.eval(body, Some(*id))? != *universal {
                        result = !*universal;
                        break;
                    }
                }
                if let Some(cell) = cell {
                    self.quants[*id].memo[cell] = if result { 2 } else { 1 };
                }
                result
            }
        })
    }
}

/// Evaluates `f` under `env` with the default configuration.
pub fn eval_formula(a: &Algebra, f: &Formula, env: &HashMap<String, Element>) -> Result<bool, EvalError> {
    eval_formula_with(a, f, env, EvalConfig::default())
}

pub fn eval_formula_with(a: &Algebra, f: &Formula, env: &HashMap<String, Element>, config: EvalConfig) -> Result<bool, EvalError> {
    let free: Vec<String> = f.free_vars().into_iter().collect();
    let mut values = Vec::with_capacity(free.len());
    for v in &free {
        values.push(*env.get(v).ok_or_else(|| EvalError::Unbound(v.clone()))?);
    }
    Evaluator::new(a, f, &free, config)?.eval(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;
    use crate::fol::parse_formula;

    fn chain(n: usize) -> Algebra {
        let sig = Signature::from_pairs(&[("∨", 2), ("0", 0)]).unwrap();
        Algebra::from_fn(sig, n, |op, a| if op == 0 { a[0].max(a[1]) } else { 0 }).unwrap()
    }

    fn eval(a: &Algebra, text: &str, env: &[(&str, Element)]) -> Result<bool, EvalError> {
        let f = parse_formula(text, a.signature()).unwrap();
        let env = env.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        eval_formula(a, &f, &env)
    }

    #[test]
    fn basic_truths() {
        let a = chain(4);
        assert_eq!(eval(&a, "forall x (= x x)", &[]), Ok(true));
        assert_eq!(eval(&a, "exists x (not (= x x))", &[]), Ok(false));
        assert_eq!(eval(&a, "exists u (= ∨(x,u) y)", &[("x", 1), ("y", 3)]), Ok(true));
        assert_eq!(eval(&a, "forall u (= ∨(x,u) x)", &[("x", 3)]), Ok(true));
        assert_eq!(eval(&a, "forall u (= ∨(x,u) x)", &[("x", 2)]), Ok(false));
        assert_eq!(eval(&a, "(and)", &[]), Ok(true));
        assert_eq!(eval(&a, "(or)", &[]), Ok(false));
    }

    #[test]
    fn shadowing_uses_innermost_binder() {
        let a = chain(3);
        // Inner x ranges over everything, so ∃x (x = 0) holds whatever the outer x is.
        assert_eq!(eval(&a, "forall x (exists x (= x 0))", &[]), Ok(true));
        assert_eq!(eval(&a, "(and (= x y) (exists x (= x 0)))", &[("x", 2), ("y", 2)]), Ok(true));
    }

    #[test]
    fn unbound_and_budget_errors() {
        let a = chain(3);
        assert_eq!(eval(&a, "(= x y)", &[("x", 0)]), Err(EvalError::Unbound("y".into())));
        let f = parse_formula("forall u v w (= ∨(u,∨(v,w)) ∨(∨(u,v),w))", a.signature()).unwrap();
        let cfg = EvalConfig { budget: 10, memoize: false };
        match eval_formula_with(&a, &f, &HashMap::new(), cfg) {
            Err(EvalError::BudgetExceeded { subformula, .. }) => assert!(subformula.starts_with("(forall v"), "{subformula}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn memo_does_not_change_answers() {
        let a = chain(4);
        let f = parse_formula("forall u (exists v (and (= ∨(u,v) v) (not (= v x))))", a.signature()).unwrap();
        for memoize in [false, true] {
            let mut e = Evaluator::new(&a, &f, &["x"], EvalConfig { memoize, ..Default::default() }).unwrap();
            let got: Vec<bool> = (0..4).map(|x| e.eval(&[x]).unwrap()).collect();
            assert_eq!(got, vec![true, true, true, false]);
        }
    }
}
