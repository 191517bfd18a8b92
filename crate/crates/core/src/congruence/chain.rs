use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, Element, Term};

use super::closure::{Closure, Edge, Reason};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("({0},{1}) is not in the generated congruence")]
    NotInCongruence(Element, Element),
    #[error("element {0} outside the universe")]
    ElementOutOfRange(Element),
    #[error("chain has even length {0}")]
    EvenLength(usize),
    #[error("replay breaks at link {step}: expected {expected}, found {found}")]
    ReplayFailed { step: usize, expected: Element, found: Element },
    #[error("polynomial {0} does not evaluate: {1}")]
    BadTerm(usize, String),
}

/// Unary polynomials `p₁ … p_k` witnessing `(a,b) ∈ Cg(a⃗, b⃗)`.
///
/// Each `pᵢ` is a term in `x1..xn` (one per generating pair) and `u1..um`
/// (parameters, with values in `parameters`). The alternation is
///
/// ```text
/// a = p₁(a⃗), pᵢ(b⃗) = pᵢ₊₁(b⃗) for odd i, pᵢ(a⃗) = pᵢ₊₁(a⃗) for even i, p_k(b⃗) = b
/// ```
///
/// with `k` odd, or `k = 0` when `a = b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalcevChain {
    pub target: (Element, Element),
    pub generators: Vec<(Element, Element)>,
    pub polynomials: Vec<Term>,
    pub parameters: Vec<Element>,
}

impl MalcevChain {
    pub fn len(&self) -> usize {
        self.polynomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polynomials.is_empty()
    }

    /// Slot names: `x1..xn` then `u1..um`.
    pub fn variable_names(&self) -> Vec<String> {
        let xs = (1..=self.generators.len()).map(|i| format!("x{i}"));
        let us = (1..=self.parameters.len()).map(|i| format!("u{i}"));
        xs.chain(us).collect()
    }

    /// Checks the alternation in `a`.
    pub fn replay(&self, a: &Algebra) -> Result<(), ChainError> {
        let (start, end) = self.target;
        let k = self.len();
        if k == 0 {
            return if start == end { Ok(()) } else { Err(ChainError::ReplayFailed { step: 0, expected: end, found: start }) };
        }
        if k % 2 == 0 {
            return Err(ChainError::EvenLength(k));
        }
        let names = self.variable_names();
        let left: Vec<Element> = self.generators.iter().map(|g| g.0).chain(self.parameters.iter().copied()).collect();
        let right: Vec<Element> = self.generators.iter().map(|g| g.1).chain(self.parameters.iter().copied()).collect();
        let mut at_left = Vec::with_capacity(k);
        let mut at_right = Vec::with_capacity(k);
        for (i, p) in self.polynomials.iter().enumerate() {
            let c = p.compile(a.signature(), &names).map_err(|e| ChainError::BadTerm(i + 1, e.to_string()))?;
            at_left.push(c.eval(a, &left));
            at_right.push(c.eval(a, &right));
        }
        let fail = |step, expected, found| Err(ChainError::ReplayFailed { step, expected, found });
        if at_left[0] != start {
            return fail(1, start, at_left[0]);
        }
        for i in 1..k {
            // 1-based link i is compared with link i+1.
            let side = if i % 2 == 1 { &at_right } else { &at_left };
            if side[i - 1] != side[i] {
                return fail(i + 1, side[i - 1], side[i]);
            }
        }
        if at_right[k - 1] != end {
            return fail(k, end, at_right[k - 1]);
        }
        Ok(())
    }
}

/// Builds the term of a merge edge, allocating parameters for fixed arguments.
fn edge_term(a: &Algebra, edges: &[Edge], e: usize, params: &mut Vec<Element>) -> Term {
    match &edges[e].reason {
        Reason::Generator(i) => Term::var(format!("x{}", i + 1)),
        Reason::Translation { parent, op, position, fixed } => {
            let inner = edge_term(a, edges, *parent, params);
            let mut args = Vec::with_capacity(fixed.len() + 1);
            for (j, &value) in fixed.iter().enumerate() {
                if j == *position {
                    args.push(inner.clone());
                }
                params.push(value);
                args.push(Term::var(format!("u{}", params.len())));
            }
            if *position == fixed.len() {
                args.push(inner);
            }
            Term::app(a.signature().name(*op), args)
        }
    }
}

/// A replayable chain for `target ∈ Cg(generators)`, spliced from the
/// closure's proof forest. The chain is not minimal in general.
pub fn malcev_chain(
    a: &Algebra,
    target: (Element, Element),
    generators: &[(Element, Element)],
) -> Result<MalcevChain, ChainError> {
    for &x in generators.iter().flat_map(|(x, y)| [x, y]).chain([&target.0, &target.1]) {
        if x >= a.size() {
            return Err(ChainError::ElementOutOfRange(x));
        }
    }
    let closure = Closure::run(a, generators);
    if !closure.congruence.related(target.0, target.1) {
        return Err(ChainError::NotInCongruence(target.0, target.1));
    }
    let mut chain = MalcevChain {
        target,
        generators: generators.to_vec(),
        polynomials: Vec::new(),
        parameters: Vec::new(),
    };
    if target.0 == target.1 {
        return Ok(chain);
    }

    // Path in the forest: (edge, traversed from→to?).
    let mut adjacent = vec![Vec::new(); a.size()];
    for (i, e) in closure.edges.iter().enumerate() {
        adjacent[e.from].push((i, true, e.to));
        adjacent[e.to].push((i, false, e.from));
    }
    let mut came_from: Vec<Option<(usize, bool, Element)>> = vec![None; a.size()];
    let mut seen = vec![false; a.size()];
    let mut queue = VecDeque::from([target.0]);
    seen[target.0] = true;
    while let Some(x) = queue.pop_front() {
        for &(edge, forward, y) in &adjacent[x] {
            if !seen[y] {
                seen[y] = true;
                came_from[y] = Some((edge, forward, x));
                queue.push_back(y);
            }
        }
    }
    let mut path = Vec::new();
    let mut at = target.1;
    while at != target.0 {
        let (edge, forward, prev) = came_from[at].expect("forest connects related elements");
        path.push((edge, forward, at));
        at = prev;
    }
    path.reverse();

    let MalcevChain { polynomials, parameters, .. } = &mut chain;
    let mut current = target.0;
    for (edge, forward, next) in path {
        // Odd positions (1-based) must run a⃗ ↦ current, b⃗ ↦ next.
        let wants_forward = polynomials.len() % 2 == 0;
        if forward != wants_forward {
            parameters.push(current);
            polynomials.push(Term::var(format!("u{}", parameters.len())));
        }
        polynomials.push(edge_term(a, &closure.edges, edge, parameters));
        current = next;
    }
    if polynomials.len() % 2 == 0 {
        parameters.push(current);
        polynomials.push(Term::var(format!("u{}", parameters.len())));
    }
    debug_assert_eq!(chain.replay(a), Ok(()));
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;
    use crate::congruence::generated_congruence;

    fn cyclic(n: usize) -> Algebra {
        let sig = Signature::from_pairs(&[("+", 2), ("0", 0)]).unwrap();
        Algebra::from_fn(sig, n, |op, a| if op == 0 { (a[0] + a[1]) % n } else { 0 }).unwrap()
    }

    #[test]
    fn reflexive_target_gives_empty_chain() {
        let a = cyclic(4);
        let c = malcev_chain(&a, (2, 2), &[(0, 1)]).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.replay(&a), Ok(()));
    }

    #[test]
    fn every_related_pair_has_a_chain() {
        let a = cyclic(8);
        let gens = [(0, 4), (1, 3)];
        let cg = generated_congruence(&a, &gens);
        for x in 0..8 {
            for y in 0..8 {
                match malcev_chain(&a, (x, y), &gens) {
                    Ok(c) => {
                        assert!(cg.related(x, y));
                        assert_eq!(c.replay(&a), Ok(()));
                        assert_eq!(c.len() % 2, if x == y { 0 } else { 1 });
                    }
                    Err(e) => {
                        assert!(!cg.related(x, y));
                        assert_eq!(e, ChainError::NotInCongruence(x, y));
                    }
                }
            }
        }
    }

    #[test]
    fn replay_detects_tampering() {
        let a = cyclic(6);
        let mut c = malcev_chain(&a, (0, 3), &[(0, 3)]).unwrap();
        assert_eq!(c.replay(&a), Ok(()));
        c.target.1 = 1;
        assert!(matches!(c.replay(&a), Err(ChainError::ReplayFailed { .. })));
    }
}
