use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{decode_tuple, tuple_count, Algebra, Element, MAX_ARITY};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("image {image} of {element} is outside 0..{codomain}")]
    OutOfRange { element: Element, image: Element, codomain: usize },
    #[error("element {0} outside the domain universe")]
    DomainOutOfRange(Element),
    #[error("{first} and {second} both map to {image}")]
    NotInjective { first: Element, second: Element, image: Element },
    #[error("element {0} given two different images")]
    Conflict(Element),
}

/// A partial map between the universes of two algebras.
///
/// Injectivity is not built in: projections are maps too. Constructors
/// ending in `_injective` enforce it for partial isomorphisms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElementMap {
    images: Vec<Option<Element>>,
    codomain: usize,
}

impl ElementMap {
    pub fn new(images: Vec<Option<Element>>, codomain: usize) -> Result<Self, MapError> {
        for (element, img) in images.iter().enumerate() {
            if let Some(image) = *img {
                if image >= codomain {
                    return Err(MapError::OutOfRange { element, image, codomain });
                }
            }
        }
        Ok(ElementMap { images, codomain })
    }

    pub fn new_injective(images: Vec<Option<Element>>, codomain: usize) -> Result<Self, MapError> {
        let m = Self::new(images, codomain)?;
        m.check_injective()?;
        Ok(m)
    }

    pub fn total(images: Vec<Element>, codomain: usize) -> Result<Self, MapError> {
        Self::new(images.into_iter().map(Some).collect(), codomain)
    }

    pub fn from_pairs(domain_size: usize, codomain: usize, pairs: &[(Element, Element)]) -> Result<Self, MapError> {
        let mut images = vec![None; domain_size];
        for &(a, b) in pairs {
            let slot = images.get_mut(a).ok_or(MapError::DomainOutOfRange(a))?;
            match *slot {
                Some(old) if old != b => return Err(MapError::Conflict(a)),
                _ => *slot = Some(b),
            }
        }
        Self::new(images, codomain)
    }

    pub fn identity(n: usize) -> Self {
        ElementMap { images: (0..n).map(Some).collect(), codomain: n }
    }

    pub fn get(&self, a: Element) -> Option<Element> {
        self.images.get(a).copied().flatten()
    }

    pub fn domain_size(&self) -> usize {
        self.images.len()
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain
    }

    pub fn images(&self) -> &[Option<Element>] {
        &self.images
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Element, Element)> + '_ {
        self.images.iter().enumerate().filter_map(|(a, b)| b.map(|b| (a, b)))
    }

    pub fn domain(&self) -> impl Iterator<Item = Element> + '_ {
        self.pairs().map(|(a, _)| a)
    }

    pub fn is_total(&self) -> bool {
        self.images.iter().all(Option::is_some)
    }

    fn check_injective(&self) -> Result<(), MapError> {
        let mut seen = vec![None; self.codomain];
        for (a, b) in self.pairs() {
            if let Some(first) = seen[b] {
                return Err(MapError::NotInjective { first, second: a, image: b });
            }
            seen[b] = Some(a);
        }
        Ok(())
    }

    pub fn is_injective(&self) -> bool {
        self.check_injective().is_ok()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_total() && self.is_injective() && self.images.len() == self.codomain
    }

    /// The inverse of an injective map.
    pub fn inverse(&self) -> Option<ElementMap> {
        if !self.is_injective() {
            return None;
        }
        let mut images = vec![None; self.codomain];
        for (a, b) in self.pairs() {
            images[b] = Some(a);
        }
        Some(ElementMap { images, codomain: self.images.len() })
    }
}

/// True iff `m` commutes with every operation on its domain.
///
/// For a partial map this also requires the domain to be closed under the
/// operations (otherwise "commutes" is not defined). `total` additionally
/// requires the domain to be all of `a`.
pub fn check_homomorphism(a: &Algebra, b: &Algebra, m: &ElementMap, total: bool) -> bool {
    if !a.same_signature(b) || m.domain_size() != a.size() || m.codomain_size() != b.size() {
        return false;
    }
    if total && !m.is_total() {
        return false;
    }
    let domain: Vec<Element> = m.domain().collect();
    let mut idx = [0; MAX_ARITY];
    let mut args = [0; MAX_ARITY];
    let mut images = [0; MAX_ARITY];
    for op in 0..a.signature().len() {
        let arity = a.signature().arity(op);
        let Some(count) = tuple_count(domain.len(), arity) else { return false };
        for t in 0..count {
            decode_tuple(t, domain.len(), &mut idx[..arity]);
            for k in 0..arity {
                args[k] = domain[idx[k]];
                images[k] = m.get(args[k]).expect("in domain");
            }
            match m.get(a.apply(op, &args[..arity])) {
                Some(img) if img == b.apply(op, &images[..arity]) => {}
                _ => return false,
            }
        }
    }
    true
}

/// Per-element data preserved by isomorphisms, used to prune the search.
fn invariants(a: &Algebra) -> Vec<Vec<usize>> {
    let sig = a.signature();
    let mut inv = vec![Vec::new(); a.size()];
    for op in 0..sig.len() {
        let arity = sig.arity(op);
        let mut indegree = vec![0usize; a.size()];
        for &v in a.table(op) {
            indegree[v] += 1;
        }
        for x in a.elements() {
            inv[x].push(indegree[x]);
            if arity > 0 {
                let diag = [x; MAX_ARITY];
                inv[x].push((a.apply(op, &diag[..arity]) == x) as usize);
            }
        }
    }
    inv
}

/// Backtracking isomorphism search; intended for algebras up to roughly 30 elements.
pub fn find_isomorphism(a: &Algebra, b: &Algebra) -> Option<ElementMap> {
    if a.size() != b.size() || !a.same_signature(b) {
        return None;
    }
    let (ia, ib) = (invariants(a), invariants(b));
    let mut sorted_a = ia.clone();
    let mut sorted_b = ib.clone();
    sorted_a.sort();
    sorted_b.sort();
    if sorted_a != sorted_b {
        return None;
    }
    // Rarest invariant classes first.
    let mut order: Vec<Element> = a.elements().collect();
    order.sort_by_key(|&x| (ia.iter().filter(|v| **v == ia[x]).count(), x));
    let mut images = vec![None; a.size()];
    let mut used = vec![false; b.size()];
    if search(a, b, &ia, &ib, &order, 0, &mut images, &mut used) {
        let m = ElementMap::new(images, b.size()).expect("images in range");
        debug_assert!(check_homomorphism(a, b, &m, true));
        Some(m)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    a: &Algebra,
    b: &Algebra,
    ia: &[Vec<usize>],
    ib: &[Vec<usize>],
    order: &[Element],
    depth: usize,
    images: &mut Vec<Option<Element>>,
    used: &mut Vec<bool>,
) -> bool {
    let Some(&x) = order.get(depth) else { return true };
    for y in b.elements() {
        if used[y] || ia[x] != ib[y] {
            continue;
        }
        images[x] = Some(y);
        used[y] = true;
        if consistent(a, b, images, used) && search(a, b, ia, ib, order, depth + 1, images, used) {
            return true;
        }
        images[x] = None;
        used[y] = false;
    }
    false
}

/// Operation-graph consistency of a partial injective assignment.
fn consistent(a: &Algebra, b: &Algebra, images: &[Option<Element>], used: &[bool]) -> bool {
    let domain: Vec<Element> = (0..images.len()).filter(|&x| images[x].is_some()).collect();
    let mut idx = [0; MAX_ARITY];
    let mut args = [0; MAX_ARITY];
    let mut imgs = [0; MAX_ARITY];
    for op in 0..a.signature().len() {
        let arity = a.signature().arity(op);
        let count = tuple_count(domain.len(), arity).unwrap_or(0);
        for t in 0..count {
            decode_tuple(t, domain.len(), &mut idx[..arity]);
            for k in 0..arity {
                args[k] = domain[idx[k]];
                imgs[k] = images[args[k]].expect("in domain");
            }
            let out_b = b.apply(op, &imgs[..arity]);
            match images[a.apply(op, &args[..arity])] {
                Some(img) if img != out_b => return false,
                None if used[out_b] => return false,
                _ => {}
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;

    fn cyclic(n: usize) -> Algebra {
        let sig = Signature::from_pairs(&[("s", 1), ("0", 0)]).unwrap();
        Algebra::from_fn(sig, n, |op, a| if op == 0 { (a[0] + 1) % n } else { 0 }).unwrap()
    }

    #[test]
    fn identity_is_homomorphism() {
        let a = cyclic(5);
        assert!(check_homomorphism(&a, &a, &ElementMap::identity(5), true));
    }

    #[test]
    fn finds_relabelled_copy() {
        let a = cyclic(6);
        let perm = [3, 0, 5, 1, 4, 2];
        let sig = a.signature().clone();
        let inv: Vec<usize> = (0..6).map(|y| perm.iter().position(|&p| p == y).unwrap()).collect();
        let b = Algebra::from_fn(sig, 6, |op, args| {
            let pre: Vec<usize> = args.iter().map(|&y| inv[y]).collect();
            perm[a.apply(op, &pre)]
        })
        .unwrap();
        let m = find_isomorphism(&a, &b).unwrap();
        assert!(check_homomorphism(&a, &b, &m, true));
        assert!(find_isomorphism(&a, &cyclic(5)).is_none());
    }

    #[test]
    fn map_constructors() {
        assert!(matches!(
            ElementMap::new_injective(vec![Some(0), Some(0)], 2),
            Err(MapError::NotInjective { .. })
        ));
        assert!(matches!(ElementMap::new(vec![Some(3)], 2), Err(MapError::OutOfRange { .. })));
        assert!(matches!(ElementMap::from_pairs(2, 2, &[(0, 1), (0, 0)]), Err(MapError::Conflict(0))));
        let m = ElementMap::from_pairs(3, 3, &[(0, 2), (2, 1)]).unwrap();
        assert_eq!(m.inverse().unwrap().get(2), Some(0));
        assert!(!m.is_total());
    }

    #[test]
    fn partial_map_needs_closed_domain() {
        let a = cyclic(3);
        let m = ElementMap::from_pairs(3, 3, &[(0, 0)]).unwrap();
        assert!(!check_homomorphism(&a, &a, &m, false));
    }
}
