use std::collections::{HashSet, VecDeque};

use crate::algebra::Algebra;

use super::{principal_congruence, Congruence, CongruenceError};

/// Default refusal threshold for whole-lattice computations.
pub const DEFAULT_GUARD: usize = 14;

/// Distinct principal congruences `Cg(a,b)`, `a < b`.
pub fn principal_congruences(a: &Algebra) -> Vec<Congruence> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for x in a.elements() {
        for y in x + 1..a.size() {
            let c = principal_congruence(a, x, y);
            if seen.insert(c.clone()) {
                out.push(c);
            }
        }
    }
    out
}

pub fn all_congruences(a: &Algebra) -> Result<Vec<Congruence>, CongruenceError> {
    all_congruences_with_guard(a, DEFAULT_GUARD)
}

/// Every congruence, as the join-closure of Δ and the principal congruences.
///
/// Sorted by decreasing number of blocks (Δ first, ∇ last), then by block ids.
pub fn all_congruences_with_guard(a: &Algebra, guard: usize) -> Result<Vec<Congruence>, CongruenceError> {
    if a.size() > guard {
        return Err(CongruenceError::TooLarge { size: a.size(), guard });
    }
    let principals = principal_congruences(a);
    let bottom = Congruence::identity(a.size());
    let mut seen = HashSet::from([bottom.clone()]);
    let mut queue = VecDeque::from([bottom]);
    while let Some(c) = queue.pop_front() {
        for p in &principals {
            if p.leq(&c) {
                continue;
            }
            let j = c.join(p).expect("same universe");
            if seen.insert(j.clone()) {
                queue.push_back(j);
            }
        }
    }
    let mut out: Vec<Congruence> = seen.into_iter().collect();
    out.sort_by(|x, y| y.num_blocks().cmp(&x.num_blocks()).then_with(|| x.cmp(y)));
    Ok(out)
}
