use std::collections::BTreeSet;

use super::{decode_tuple, tuple_count, Algebra, AlgebraError, Element, MAX_ARITY};

/// Least subuniverse containing `seed` (and hence every constant).
pub fn subuniverse_closure(a: &Algebra, seed: impl IntoIterator<Item = Element>) -> BTreeSet<Element> {
    let mut set: BTreeSet<Element> = seed.into_iter().filter(|&x| x < a.size()).collect();
    set.extend(a.constant_values());
    let mut idx = [0; MAX_ARITY];
    let mut args = [0; MAX_ARITY];
    loop {
        let members: Vec<Element> = set.iter().copied().collect();
        let before = set.len();
        for op in 0..a.signature().len() {
            let arity = a.signature().arity(op);
            for t in 0..tuple_count(members.len(), arity).unwrap_or(0) {
                decode_tuple(t, members.len(), &mut idx[..arity]);
                for k in 0..arity {
                    args[k] = members[idx[k]];
                }
                set.insert(a.apply(op, &args[..arity]));
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

/// Returns the first operation under which `set` is not closed, if any.
fn closure_violation(a: &Algebra, set: &BTreeSet<Element>) -> Option<usize> {
    let members: Vec<Element> = set.iter().copied().collect();
    let mut idx = [0; MAX_ARITY];
    let mut args = [0; MAX_ARITY];
    for op in 0..a.signature().len() {
        let arity = a.signature().arity(op);
        for t in 0..tuple_count(members.len(), arity).unwrap_or(0) {
            decode_tuple(t, members.len(), &mut idx[..arity]);
            for k in 0..arity {
                args[k] = members[idx[k]];
            }
            if !set.contains(&a.apply(op, &args[..arity])) {
                return Some(op);
            }
        }
    }
    None
}

pub fn is_subuniverse(a: &Algebra, set: &BTreeSet<Element>) -> bool {
    !set.is_empty() && closure_violation(a, set).is_none()
}

/// The subalgebra on `subset`, re-indexed in increasing order of the original
/// elements. Also returns the embedding (new index ↦ original element).
pub fn induced_subalgebra(a: &Algebra, subset: &BTreeSet<Element>) -> Result<(Algebra, Vec<Element>), AlgebraError> {
    if let Some(&bad) = subset.iter().find(|&&x| x >= a.size()) {
        return Err(AlgebraError::ElementOutOfRange(bad));
    }
    if subset.is_empty() {
        return Err(AlgebraError::EmptyUniverse);
    }
    if let Some(op) = closure_violation(a, subset) {
        return Err(AlgebraError::NotClosed { op: a.signature().name(op).to_string() });
    }
    let embedding: Vec<Element> = subset.iter().copied().collect();
    let mut back = vec![usize::MAX; a.size()];
    for (i, &x) in embedding.iter().enumerate() {
        back[x] = i;
    }
    let mut orig = [0; MAX_ARITY];
    let sub = Algebra::from_fn(a.signature().clone(), embedding.len(), |op, args| {
        for (slot, &x) in orig.iter_mut().zip(args) {
            *slot = embedding[x];
        }
        back[a.apply(op, &orig[..args.len()])]
    })?;
    Ok((sub, embedding))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;

    fn add_mod(n: usize) -> Algebra {
        let sig = Signature::from_pairs(&[("+", 2), ("0", 0)]).unwrap();
        Algebra::from_fn(sig, n, |op, a| if op == 0 { (a[0] + a[1]) % n } else { 0 }).unwrap()
    }

    #[test]
    fn closure_of_empty_seed_is_constants() {
        assert_eq!(subuniverse_closure(&add_mod(6), []), BTreeSet::from([0]));
    }

    #[test]
    fn closure_generates_subgroup() {
        let a = add_mod(12);
        assert_eq!(subuniverse_closure(&a, [8]), BTreeSet::from([0, 4, 8]));
        let (sub, emb) = induced_subalgebra(&a, &BTreeSet::from([0, 4, 8])).unwrap();
        assert_eq!(sub.size(), 3);
        assert_eq!(emb, vec![0, 4, 8]);
        assert_eq!(sub.apply(0, &[2, 2]), 1);
    }

    #[test]
    fn non_closed_subset_rejected() {
        let a = add_mod(6);
        assert!(matches!(induced_subalgebra(&a, &BTreeSet::from([0, 1])), Err(AlgebraError::NotClosed { .. })));
        assert!(!is_subuniverse(&a, &BTreeSet::from([0, 1])));
        assert!(is_subuniverse(&a, &BTreeSet::from([0, 2, 4])));
    }
}
