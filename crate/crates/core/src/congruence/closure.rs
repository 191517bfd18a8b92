use crate::algebra::{decode_tuple, tuple_count, Algebra, Element, MAX_ARITY};

use super::{Congruence, UnionFind};

/// Why two classes were merged.
#[derive(Debug, Clone)]
pub(crate) enum Reason {
    /// The `index`-th generating pair.
    Generator(usize),
    /// Applying `op` with the parent edge's endpoints at `position` and the
    /// remaining arguments fixed.
    Translation { parent: usize, op: usize, position: usize, fixed: Vec<Element> },
}

/// A merge recorded by the closure: `from` and `to` became equivalent.
#[derive(Debug, Clone)]
pub(crate) struct Edge {
    pub from: Element,
    pub to: Element,
    pub reason: Reason,
}

/// Translation closure with one-step provenance for every merge.
pub(crate) struct Closure {
    pub congruence: Congruence,
    pub edges: Vec<Edge>,
}

impl Closure {
    pub(crate) fn run(a: &Algebra, pairs: &[(Element, Element)]) -> Closure {
        let mut uf = UnionFind::new(a.size());
        let mut edges = Vec::new();
        for (i, &(x, y)) in pairs.iter().enumerate() {
            if uf.union(x, y) {
                edges.push(Edge { from: x, to: y, reason: Reason::Generator(i) });
            }
        }
        let mut next = 0;
        let mut args = [0; MAX_ARITY];
        while next < edges.len() {
            let (c, d) = (edges[next].from, edges[next].to);
            for op in 0..a.signature().len() {
                let arity = a.signature().arity(op);
                if arity == 0 {
                    continue;
                }
                let others = tuple_count(a.size(), arity - 1).unwrap_or(0);
                for position in 0..arity {
                    for t in 0..others {
                        decode_tuple(t, a.size(), &mut args[..arity - 1]);
                        let fixed = &args[..arity - 1];
                        let u = apply_at(a, op, fixed, position, c);
                        let v = apply_at(a, op, fixed, position, d);
                        if uf.union(u, v) {
                            let reason = Reason::Translation { parent: next, op, position, fixed: fixed.to_vec() };
                            edges.push(Edge { from: u, to: v, reason });
                        }
                    }
                }
            }
            next += 1;
        }
        Closure { congruence: uf.into_congruence(), edges }
    }
}

/// `op(fixed[..position], x, fixed[position..])`.
pub(crate) fn apply_at(a: &Algebra, op: usize, fixed: &[Element], position: usize, x: Element) -> Element {
    let mut full = [0; MAX_ARITY];
    full[..position].copy_from_slice(&fixed[..position]);
    full[position] = x;
    full[position + 1..=fixed.len()].copy_from_slice(&fixed[position..]);
    a.apply(op, &full[..=fixed.len()])
}

/// Least congruence containing every pair; `Cg(a⃗, b⃗)`.
///
/// Panics if a pair mentions an element outside the universe.
pub fn generated_congruence(a: &Algebra, pairs: &[(Element, Element)]) -> Congruence {
    let c = Closure::run(a, pairs).congruence;
    debug_assert!(c.is_compatible(a));
    c
}

pub fn principal_congruence(a: &Algebra, x: Element, y: Element) -> Congruence {
    generated_congruence(a, &[(x, y)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;

    fn cyclic(n: usize) -> Algebra {
        let sig = Signature::from_pairs(&[("+", 2), ("0", 0)]).unwrap();
        Algebra::from_fn(sig, n, |op, a| if op == 0 { (a[0] + a[1]) % n } else { 0 }).unwrap()
    }

    #[test]
    fn trivial_generators() {
        let a = cyclic(6);
        assert!(principal_congruence(&a, 3, 3).is_identity());
        assert!(generated_congruence(&a, &[]).is_identity());
    }

    #[test]
    fn cosets_of_subgroups() {
        let a = cyclic(6);
        assert_eq!(principal_congruence(&a, 0, 2).block_ids(), &[0, 1, 0, 1, 0, 1]);
        assert_eq!(principal_congruence(&a, 1, 4).block_ids(), &[0, 1, 2, 0, 1, 2]);
        assert!(principal_congruence(&a, 0, 1).is_total());
        assert!(principal_congruence(&a, 0, 3).is_compatible(&a));
    }

    #[test]
    fn two_elements_collapse() {
        let sig = Signature::from_pairs(&[("*", 2)]).unwrap();
        let a = Algebra::from_fn(sig, 2, |_, x| x[0] & x[1]).unwrap();
        assert!(principal_congruence(&a, 0, 1).is_total());
    }
}
