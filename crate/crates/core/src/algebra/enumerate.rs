use std::collections::HashMap;

use itertools::Itertools;

use super::{Algebra, AlgebraError, Element, Term, MAX_ARITY};

/// A representative term and its values at every evaluation point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedTerm {
    pub term: Term,
    pub depth: usize,
    pub fingerprint: Vec<Element>,
}

/// Enumerates terms by depth, keeping one term per distinct evaluation vector.
///
/// A point is an algebra together with an assignment to the variables; two
/// terms are identified only when they agree at every point, so nothing is
/// lost for questions that are decided by those points.
pub struct TermEnumerator<'a> {
    algebras: Vec<&'a Algebra>,
    vars: Vec<String>,
    points: Vec<(usize, Vec<Element>)>,
}

impl<'a> TermEnumerator<'a> {
    pub fn new(algebras: Vec<&'a Algebra>, vars: Vec<String>) -> Result<Self, AlgebraError> {
        if let Some(first) = algebras.first() {
            if algebras.iter().any(|a| !a.same_signature(first)) {
                return Err(AlgebraError::SignatureMismatch);
            }
        }
        Ok(TermEnumerator { algebras, vars, points: Vec::new() })
    }

    /// Adds an evaluation point: algebra number `algebra` with `assignment` to the variables.
    pub fn add_point(&mut self, algebra: usize, assignment: Vec<Element>) {
        assert_eq!(assignment.len(), self.vars.len());
        assert!(assignment.iter().all(|&v| v < self.algebras[algebra].size()));
        self.points.push((algebra, assignment));
    }

    pub fn points(&self) -> &[(usize, Vec<Element>)] {
        &self.points
    }

    /// Values of an arbitrary term at every point.
    pub fn fingerprint(&self, t: &Term) -> Result<Vec<Element>, super::TermError> {
        let Some(first) = self.algebras.first() else { return Ok(Vec::new()) };
        let c = t.compile(first.signature(), &self.vars)?;
        Ok(self.points.iter().map(|(i, env)| c.eval(self.algebras[*i], env)).collect())
    }

    /// All classes up to `max_depth`, in order of discovery; stops adding new
    /// classes once `max_classes` is reached.
    pub fn enumerate(&self, max_depth: usize, max_classes: usize) -> Vec<EnumeratedTerm> {
        let Some(first) = self.algebras.first() else { return Vec::new() };
        let sig = first.signature();
        let mut classes: Vec<EnumeratedTerm> = Vec::new();
        let mut seen: HashMap<Vec<Element>, usize> = HashMap::new();
        let mut push = |t: EnumeratedTerm, classes: &mut Vec<EnumeratedTerm>| {
            if classes.len() < max_classes && !seen.contains_key(&t.fingerprint) {
                seen.insert(t.fingerprint.clone(), classes.len());
                classes.push(t);
            }
        };
        for (slot, v) in self.vars.iter().enumerate() {
            let fingerprint = self.points.iter().map(|(_, env)| env[slot]).collect();
            push(EnumeratedTerm { term: Term::var(v.clone()), depth: 0, fingerprint }, &mut classes);
        }
        for op in sig.constants() {
            let fingerprint = self.points.iter().map(|(i, _)| self.algebras[*i].apply(op, &[])).collect();
            push(EnumeratedTerm { term: Term::constant(sig.name(op)), depth: 0, fingerprint }, &mut classes);
        }
        let mut args = [0; MAX_ARITY];
        for depth in 1..=max_depth {
            let known = classes.len();
            for op in 0..sig.len() {
                let arity = sig.arity(op);
                if arity == 0 {
                    continue;
                }
                for children in (0..arity).map(|_| 0..known).multi_cartesian_product() {
                    if children.iter().all(|&c| classes[c].depth + 1 < depth) {
                        continue;
                    }
                    let fingerprint = self
                        .points
                        .iter()
                        .enumerate()
                        .map(|(p, (i, _))| {
                            for (slot, &c) in args.iter_mut().zip(&children) {
                                *slot = classes[c].fingerprint[p];
                            }
                            self.algebras[*i].apply(op, &args[..arity])
                        })
                        .collect();
                    let term = Term::app(sig.name(op), children.iter().map(|&c| classes[c].term.clone()).collect());
                    push(EnumeratedTerm { term, depth, fingerprint }, &mut classes);
                }
            }
        }
        classes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;

    #[test]
    fn boolean_meet_terms_collapse() {
        let sig = Signature::from_pairs(&[("*", 2)]).unwrap();
        let a = Algebra::from_fn(sig, 2, |_, x| x[0].min(x[1])).unwrap();
        let mut e = TermEnumerator::new(vec![&a], vec!["x".into(), "y".into()]).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                e.add_point(0, vec![x, y]);
            }
        }
        // x, y, x*y are the only binary meet-terms.
        let classes = e.enumerate(3, usize::MAX);
        assert_eq!(classes.len(), 3);
        assert_eq!(classes[2].term.to_string(), "*(x,y)");
        assert_eq!(e.fingerprint(&classes[2].term).unwrap(), classes[2].fingerprint);
    }
}
