//! Partitions, congruence generation, lattice operations and relational products.

mod chain;
mod closure;
mod lattice;

pub use chain::{malcev_chain, ChainError, MalcevChain};
pub use closure::{generated_congruence, principal_congruence};
pub use lattice::{all_congruences, all_congruences_with_guard, principal_congruences, DEFAULT_GUARD};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{decode_tuple, tuple_count, Algebra, Element, MAX_ARITY};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CongruenceError {
    #[error("congruences live on universes of different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("algebra has {size} elements, above the guard of {guard}")]
    TooLarge { size: usize, guard: usize },
    #[error("element {0} outside the universe")]
    ElementOutOfRange(Element),
}

/// A hand-rolled disjoint-set forest; normalisation picks least members.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Returns false if `a` and `b` were already together.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // Keep the smaller index as root; this makes normalisation trivial.
        if ra < rb {
            self.parent[rb] = ra;
        } else {
            self.parent[ra] = rb;
        }
        true
    }

    pub(crate) fn into_congruence(mut self) -> Congruence {
        let n = self.parent.len();
        let blocks = (0..n).map(|x| self.find(x)).collect();
        Congruence { blocks }
    }
}

/// An equivalence relation on `0..n`, stored as block ids where each block's
/// id is its least member. Equality of values is equality of partitions.
///
/// Compatibility with an algebra is not part of the type; see
/// [`Congruence::is_compatible`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<Element>", into = "Vec<Element>")]
pub struct Congruence {
    blocks: Vec<Element>,
}

impl From<Vec<Element>> for Congruence {
    fn from(labels: Vec<Element>) -> Self {
        Congruence::from_labels(&labels)
    }
}

impl From<Congruence> for Vec<Element> {
    fn from(c: Congruence) -> Self {
        c.blocks
    }
}

impl Congruence {
    /// Δ on `n` elements.
    pub fn identity(n: usize) -> Self {
        Congruence { blocks: (0..n).collect() }
    }

    /// ∇ on `n` elements.
    pub fn total(n: usize) -> Self {
        Congruence { blocks: vec![0; n] }
    }

    /// The partition whose blocks are the sets of equal labels.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut first = std::collections::HashMap::new();
        let blocks = labels.iter().enumerate().map(|(i, l)| *first.entry(*l).or_insert(i)).collect();
        Congruence { blocks }
    }

    /// Partition of `0..n` with the given blocks; unlisted elements are singletons.
    pub fn from_blocks(n: usize, blocks: &[Vec<Element>]) -> Result<Self, CongruenceError> {
        let mut uf = UnionFind::new(n);
        for block in blocks {
            for &x in block {
                if x >= n {
                    return Err(CongruenceError::ElementOutOfRange(x));
                }
                uf.union(block[0], x);
            }
        }
        Ok(uf.into_congruence())
    }

    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    /// Block id (least member) per element.
    pub fn block_ids(&self) -> &[Element] {
        &self.blocks
    }

    pub fn block_of(&self, a: Element) -> Element {
        self.blocks[a]
    }

    pub fn related(&self, a: Element, b: Element) -> bool {
        self.blocks[a] == self.blocks[b]
    }

    /// Least members of the blocks, ascending.
    pub fn representatives(&self) -> Vec<Element> {
        (0..self.size()).filter(|&x| self.blocks[x] == x).collect()
    }

    pub fn num_blocks(&self) -> usize {
        (0..self.size()).filter(|&x| self.blocks[x] == x).count()
    }

    /// Blocks as sorted member lists, ordered by least member.
    pub fn blocks(&self) -> Vec<Vec<Element>> {
        let reps = self.representatives();
        let mut out = vec![Vec::new(); reps.len()];
        let index = self.class_index();
        for x in 0..self.size() {
            out[index[x]].push(x);
        }
        out
    }

    /// Position of each element's block among [`Congruence::representatives`].
    pub fn class_index(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.size()];
        let mut next = 0;
        let mut out = vec![0; self.size()];
        for x in 0..self.size() {
            let b = self.blocks[x];
            if pos[b] == usize::MAX {
                pos[b] = next;
                next += 1;
            }
            out[x] = pos[b];
        }
        out
    }

    /// Block size when all blocks have the same size.
    pub fn uniform_block_size(&self) -> Option<usize> {
        let mut counts = vec![0usize; self.size()];
        for &b in &self.blocks {
            counts[b] += 1;
        }
        let mut sizes = counts.into_iter().filter(|&c| c > 0);
        let first = sizes.next()?;
        sizes.all(|s| s == first).then_some(first)
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.iter().enumerate().all(|(i, &b)| i == b)
    }

    pub fn is_total(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    /// `self ⊆ other` as relations.
    pub fn leq(&self, other: &Congruence) -> bool {
        self.size() == other.size() && (0..self.size()).all(|x| other.related(x, self.blocks[x]))
    }

    /// True iff every operation of `a` respects the partition.
    pub fn is_compatible(&self, a: &Algebra) -> bool {
        if a.size() != self.size() {
            return false;
        }
        // It suffices to check one-coordinate moves to block representatives.
        let mut args = [0; MAX_ARITY];
        for op in 0..a.signature().len() {
            let arity = a.signature().arity(op);
            for t in 0..tuple_count(a.size(), arity).unwrap_or(0) {
                decode_tuple(t, a.size(), &mut args[..arity]);
                let value = a.apply(op, &args[..arity]);
                for j in 0..arity {
                    let keep = args[j];
                    args[j] = self.blocks[keep];
                    let moved = a.apply(op, &args[..arity]);
                    args[j] = keep;
                    if !self.related(value, moved) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn check_size(&self, other: &Congruence) -> Result<(), CongruenceError> {
        if self.size() != other.size() {
            return Err(CongruenceError::SizeMismatch { left: self.size(), right: other.size() });
        }
        Ok(())
    }

    pub fn join(&self, other: &Congruence) -> Result<Congruence, CongruenceError> {
        self.check_size(other)?;
        let mut uf = UnionFind::new(self.size());
        for x in 0..self.size() {
            uf.union(x, self.blocks[x]);
            uf.union(x, other.blocks[x]);
        }
        Ok(uf.into_congruence())
    }

    pub fn meet(&self, other: &Congruence) -> Result<Congruence, CongruenceError> {
        self.check_size(other)?;
        let labels: Vec<usize> = (0..self.size()).map(|x| self.blocks[x] * self.size() + other.blocks[x]).collect();
        Ok(Congruence::from_labels(&labels))
    }
}

pub fn join(theta: &Congruence, psi: &Congruence) -> Result<Congruence, CongruenceError> {
    theta.join(psi)
}

pub fn meet(theta: &Congruence, psi: &Congruence) -> Result<Congruence, CongruenceError> {
    theta.meet(psi)
}

/// A binary relation on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation { n, bits: vec![false; n * n] }
    }

    pub fn from_congruence(c: &Congruence) -> Self {
        let n = c.size();
        let mut r = Relation::empty(n);
        for a in 0..n {
            for b in 0..n {
                r.bits[a * n + b] = c.related(a, b);
            }
        }
        r
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(Element, Element) -> bool) -> Self {
        let mut r = Relation::empty(n);
        for a in 0..n {
            for b in 0..n {
                r.bits[a * n + b] = f(a, b);
            }
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, a: Element, b: Element) -> bool {
        self.bits[a * self.n + b]
    }

    pub fn insert(&mut self, a: Element, b: Element) {
        self.bits[a * self.n + b] = true;
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Element, Element)> + '_ {
        (0..self.n * self.n).filter(|&i| self.bits[i]).map(|i| (i / self.n, i % self.n))
    }

    /// `self ∘ other`: pairs (a,c) with a self b other c for some b.
    pub fn compose(&self, other: &Relation) -> Relation {
        let n = self.n;
        let mut out = Relation::empty(n);
        for a in 0..n {
            for b in (0..n).filter(|&b| self.contains(a, b)) {
                for c in 0..n {
                    if other.contains(b, c) {
                        out.bits[a * n + c] = true;
                    }
                }
            }
        }
        out
    }

    pub fn is_total(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn is_equivalence(&self) -> bool {
        let n = self.n;
        (0..n).all(|a| self.contains(a, a))
            && self.pairs().all(|(a, b)| self.contains(b, a))
            && self.compose(self).is_subset(self)
    }

    /// The partition, if this relation is an equivalence.
    pub fn to_congruence(&self) -> Option<Congruence> {
        if !self.is_equivalence() {
            return None;
        }
        let blocks = (0..self.n).map(|a| (0..self.n).find(|&b| self.contains(a, b)).unwrap()).collect();
        Some(Congruence { blocks })
    }
}

/// `θ ∘ ψ ∘ θ ∘ …` with `fold` composition symbols (`fold + 1` factors).
pub fn rel_product(theta: &Congruence, psi: &Congruence, fold: usize) -> Result<Relation, CongruenceError> {
    theta.check_size(psi)?;
    let (t, p) = (Relation::from_congruence(theta), Relation::from_congruence(psi));
    let mut out = t.clone();
    for i in 0..fold {
        out = out.compose(if i % 2 == 0 { &p } else { &t });
    }
    Ok(out)
}
