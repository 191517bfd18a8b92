//! Factor-congruence pairs, direct decompositions, central elements, BFC and
//! the Determining Property on single finite algebras.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{check_homomorphism, direct_product, Algebra, AlgebraError, Element, ElementMap, TermError, ZeroOneSpec};
use crate::congruence::{all_congruences_with_guard, rel_product, Congruence, CongruenceError, DEFAULT_GUARD};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorizationError {
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error("cannot evaluate 0⃗/1⃗: {0}")]
    ZeroOne(#[from] TermError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("congruence is not compatible with the algebra")]
    NotCongruence,
}

/// Complementary factor congruences: `θ ∧ θ* = Δ` and `θ ∘ θ* = ∇`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FactorPair {
    pub theta: Congruence,
    pub theta_star: Congruence,
}

impl FactorPair {
    pub fn is_trivial(&self) -> bool {
        self.theta.is_identity() || self.theta.is_total()
    }

    pub fn swapped(&self) -> FactorPair {
        FactorPair { theta: self.theta_star.clone(), theta_star: self.theta.clone() }
    }
}

/// The literal test: meet is Δ and the one-fold product is total.
pub fn is_factor_pair(theta: &Congruence, theta_star: &Congruence) -> Result<bool, CongruenceError> {
    Ok(theta.meet(theta_star)?.is_identity() && rel_product(theta, theta_star, 1)?.is_total())
}

/// True iff `x ↦ (x/θ, x/θ*)` is a bijection onto all pairs of blocks.
fn pairs_cover(theta: &Congruence, theta_star: &Congruence) -> bool {
    let (ti, si) = (theta.class_index(), theta_star.class_index());
    let s = theta_star.num_blocks();
    if theta.num_blocks() * s != theta.size() {
        return false;
    }
    let mut hit = vec![false; theta.size()];
    for x in 0..theta.size() {
        let cell = ti[x] * s + si[x];
        if hit[cell] {
            return false;
        }
        hit[cell] = true;
    }
    true
}

pub fn factor_pairs(a: &Algebra) -> Result<Vec<FactorPair>, FactorizationError> {
    factor_pairs_with_guard(a, DEFAULT_GUARD)
}

/// All ordered factor pairs; always contains `(Δ,∇)` and `(∇,Δ)`.
pub fn factor_pairs_with_guard(a: &Algebra, guard: usize) -> Result<Vec<FactorPair>, FactorizationError> {
    let cons = all_congruences_with_guard(a, guard)?;
    Ok(factor_pairs_among(&cons))
}

/// Factor pairs drawn from a precomputed congruence list.
pub fn factor_pairs_among(cons: &[Congruence]) -> Vec<FactorPair> {
    let n = cons.first().map_or(0, Congruence::size);
    // A factor congruence has equal-sized blocks, as many per block as its partner has blocks.
    let mut by_blocks: BTreeMap<usize, Vec<&Congruence>> = BTreeMap::new();
    for c in cons {
        if c.uniform_block_size().is_some() {
            by_blocks.entry(c.num_blocks()).or_default().push(c);
        }
    }
    let mut out = Vec::new();
    for c in cons {
        let Some(s) = c.uniform_block_size() else { continue };
        for d in by_blocks.get(&s).into_iter().flatten() {
            if d.uniform_block_size() == Some(n / s) && pairs_cover(c, d) {
                debug_assert!(is_factor_pair(c, d).unwrap());
                out.push(FactorPair { theta: c.clone(), theta_star: (*d).clone() });
            }
        }
    }
    out
}

/// The quotient `A/θ` on least block representatives, with those representatives.
pub fn quotient(a: &Algebra, theta: &Congruence) -> Result<(Algebra, Vec<Element>), FactorizationError> {
    if !theta.is_compatible(a) {
        return Err(FactorizationError::NotCongruence);
    }
    let reps = theta.representatives();
    let index = theta.class_index();
    let mut args = [0; crate::algebra::MAX_ARITY];
    let q = Algebra::from_fn(a.signature().clone(), reps.len(), |op, xs| {
        for (slot, &x) in args.iter_mut().zip(xs) {
            *slot = reps[x];
        }
        index[a.apply(op, &args[..xs.len()])]
    })?;
    Ok((q, reps))
}

/// A direct decomposition `A ≅ A/θ × A/θ*` for one factor pair.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub pair: FactorPair,
    pub quotient_sizes: (usize, usize),
    pub representatives: (Vec<Element>, Vec<Element>),
    /// `a ↦ (a/θ, a/θ*)` as indices into the product of the quotients.
    pub reconstruction: ElementMap,
    #[serde(skip)]
    pub quotients: (Algebra, Algebra),
    #[serde(skip)]
    pub product: Algebra,
}

impl DecompositionReport {
    fn build(a: &Algebra, pair: FactorPair) -> Result<Self, FactorizationError> {
        let (q1, r1) = quotient(a, &pair.theta)?;
        let (q2, r2) = quotient(a, &pair.theta_star)?;
        let product = direct_product(&[&q1, &q2])?;
        let (i1, i2) = (pair.theta.class_index(), pair.theta_star.class_index());
        let images = a.elements().map(|x| product.encode(&[i1[x], i2[x]])).collect();
        let reconstruction = ElementMap::total(images, product.algebra().size()).expect("indices in range");
        Ok(DecompositionReport {
            pair,
            quotient_sizes: (q1.size(), q2.size()),
            representatives: (r1, r2),
            reconstruction,
            quotients: (q1, q2),
            product: product.into_algebra(),
        })
    }

    /// The reconstruction is a total, bijective homomorphism.
    pub fn verify(&self, a: &Algebra) -> bool {
        self.reconstruction.is_bijective() && check_homomorphism(a, &self.product, &self.reconstruction, true)
    }
}

/// One report per nontrivial factor pair, up to swapping θ and θ*.
pub fn decompose(a: &Algebra) -> Result<Vec<DecompositionReport>, FactorizationError> {
    decompose_with_guard(a, DEFAULT_GUARD)
}

pub fn decompose_with_guard(a: &Algebra, guard: usize) -> Result<Vec<DecompositionReport>, FactorizationError> {
    factor_pairs_with_guard(a, guard)?
        .into_iter()
        .filter(|p| !p.is_trivial() && p.theta < p.theta_star)
        .map(|p| DecompositionReport::build(a, p))
        .collect()
}

pub fn is_directly_indecomposable(a: &Algebra) -> Result<bool, FactorizationError> {
    Ok(a.size() >= 2 && factor_pairs(a)?.iter().all(FactorPair::is_trivial))
}

/// All tuples `x⃗` with `from⃗ θ x⃗ θ* to⃗` componentwise (at most one for a factor pair).
fn sandwich_solutions(pair: &FactorPair, from: &[Element], to: &[Element]) -> Vec<Vec<Element>> {
    let n = pair.theta.size();
    let per_coord: Vec<Vec<Element>> = from
        .iter()
        .zip(to)
        .map(|(&f, &t)| (0..n).filter(|&x| pair.theta.related(f, x) && pair.theta_star.related(x, t)).collect())
        .collect();
    use itertools::Itertools;
    per_coord.into_iter().multi_cartesian_product().collect()
}

/// A tuple `e⃗` with `0⃗ θ e⃗ θ* 1⃗` for its witness pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentralElement {
    pub value: Vec<Element>,
    pub witness: FactorPair,
}

#[derive(Debug, Clone, Serialize)]
pub struct CentralReport {
    pub elements: Vec<CentralElement>,
    /// Factor pairs for which no `e⃗` exists.
    pub unsolved: Vec<FactorPair>,
}

impl CentralReport {
    pub fn distinct_values(&self) -> BTreeSet<Vec<Element>> {
        self.elements.iter().map(|c| c.value.clone()).collect()
    }
}

pub fn central_elements(a: &Algebra, z: &ZeroOneSpec) -> Result<CentralReport, FactorizationError> {
    let pairs = factor_pairs(a)?;
    central_elements_for(a, z, &pairs)
}

pub fn central_elements_for(a: &Algebra, z: &ZeroOneSpec, pairs: &[FactorPair]) -> Result<CentralReport, FactorizationError> {
    let (zeros, ones) = z.values(a)?;
    let mut report = CentralReport { elements: Vec::new(), unsolved: Vec::new() };
    for p in pairs {
        match sandwich_solutions(p, &zeros, &ones).into_iter().next() {
            Some(value) => report.elements.push(CentralElement { value, witness: p.clone() }),
            None => report.unsolved.push(p.clone()),
        }
    }
    Ok(report)
}

/// `e⃗ ↦ [0⃗,1⃗]` and `f⃗ ↦ [1⃗,0⃗]` for the same decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplementaryPair {
    pub e: Vec<Element>,
    pub f: Vec<Element>,
    pub witness: FactorPair,
}

pub fn complementary_pairs(a: &Algebra, z: &ZeroOneSpec) -> Result<Vec<ComplementaryPair>, FactorizationError> {
    let pairs = factor_pairs(a)?;
    complementary_pairs_for(a, z, &pairs)
}

pub fn complementary_pairs_for(a: &Algebra, z: &ZeroOneSpec, pairs: &[FactorPair]) -> Result<Vec<ComplementaryPair>, FactorizationError> {
    let (zeros, ones) = z.values(a)?;
    let mut out = Vec::new();
    for p in pairs {
        let e = sandwich_solutions(p, &zeros, &ones).into_iter().next();
        let f = sandwich_solutions(p, &ones, &zeros).into_iter().next();
        if let (Some(e), Some(f)) = (e, f) {
            out.push(ComplementaryPair { e, f, witness: p.clone() });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BfcViolation {
    MeetNotFactor { left: Congruence, right: Congruence, meet: Congruence },
    JoinNotFactor { left: Congruence, right: Congruence, join: Congruence },
    NotDistributive { x: Congruence, y: Congruence, z: Congruence },
}

#[derive(Debug, Clone, Serialize)]
pub struct BfcReport {
    pub holds: bool,
    pub factor_congruences: Vec<Congruence>,
    pub witness: Option<BfcViolation>,
}

/// Boolean factor congruences: the factor congruences form a distributive sublattice.
pub fn check_bfc(a: &Algebra) -> Result<BfcReport, FactorizationError> {
    let pairs = factor_pairs(a)?;
    let fc: Vec<Congruence> = pairs.iter().map(|p| p.theta.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let set: BTreeSet<&Congruence> = fc.iter().collect();
    let witness = bfc_witness(&fc, &set)?;
    Ok(BfcReport { holds: witness.is_none(), factor_congruences: fc, witness })
}

fn bfc_witness(fc: &[Congruence], set: &BTreeSet<&Congruence>) -> Result<Option<BfcViolation>, CongruenceError> {
    for x in fc {
        for y in fc {
            let meet = x.meet(y)?;
            if !set.contains(&meet) {
                return Ok(Some(BfcViolation::MeetNotFactor { left: x.clone(), right: y.clone(), meet }));
            }
            let join = x.join(y)?;
            if !set.contains(&join) {
                return Ok(Some(BfcViolation::JoinNotFactor { left: x.clone(), right: y.clone(), join }));
            }
        }
    }
    for x in fc {
        for y in fc {
            for z in fc {
                if x.meet(&y.join(z)?)? != x.meet(y)?.join(&x.meet(z)?)? {
                    return Ok(Some(BfcViolation::NotDistributive { x: x.clone(), y: y.clone(), z: z.clone() }));
                }
            }
        }
    }
    Ok(None)
}

/// Two factor pairs sharing one central value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeterminingViolation {
    pub first: FactorPair,
    pub second: FactorPair,
    pub value: Vec<Element>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeterminingReport {
    pub factor_pairs: usize,
    pub central_elements: usize,
    /// Every pair has exactly one `e⃗` with `0⃗ θ e⃗ θ* 1⃗`.
    pub well_defined: bool,
    pub injective: bool,
    pub violation: Option<DeterminingViolation>,
    pub complementary_pairs: usize,
    pub weak_injective: bool,
    pub weak_violation: Option<DeterminingViolation>,
}

impl DeterminingReport {
    pub fn holds(&self) -> bool {
        self.well_defined && self.injective
    }

    pub fn weak_holds(&self) -> bool {
        self.well_defined && self.weak_injective
    }
}

pub fn check_determining_property(a: &Algebra, z: &ZeroOneSpec) -> Result<DeterminingReport, FactorizationError> {
    let pairs = factor_pairs(a)?;
    let (zeros, ones) = z.values(a)?;
    let mut well_defined = true;
    let mut by_e: BTreeMap<Vec<Element>, &FactorPair> = BTreeMap::new();
    let mut by_ef: BTreeMap<(Vec<Element>, Vec<Element>), &FactorPair> = BTreeMap::new();
    let mut violation = None;
    let mut weak_violation = None;
    let mut complementary = 0;
    for p in &pairs {
        let es = sandwich_solutions(p, &zeros, &ones);
        let fs = sandwich_solutions(p, &ones, &zeros);
        if es.len() != 1 || fs.len() != 1 {
            well_defined = false;
            continue;
        }
        let (e, f) = (es[0].clone(), fs[0].clone());
        complementary += 1;
        if let Some(first) = by_e.insert(e.clone(), p) {
            violation.get_or_insert(DeterminingViolation { first: first.clone(), second: p.clone(), value: e.clone() });
        }
        if let Some(first) = by_ef.insert((e.clone(), f.clone()), p) {
            let mut value = e;
            value.extend(f);
            weak_violation.get_or_insert(DeterminingViolation { first: first.clone(), second: p.clone(), value });
        }
    }
    Ok(DeterminingReport {
        factor_pairs: pairs.len(),
        central_elements: by_e.len(),
        well_defined,
        injective: violation.is_none(),
        violation,
        complementary_pairs: complementary,
        weak_injective: weak_violation.is_none(),
        weak_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::GallerySpec;

    fn build(name: &str) -> crate::gallery::LabeledAlgebra {
        name.parse::<GallerySpec>().unwrap().build().unwrap()
    }

    #[test]
    fn trivial_algebra() {
        let t = build("T");
        let pairs = factor_pairs(&t.algebra).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].theta, pairs[0].theta_star);
        assert!(!is_directly_indecomposable(&t.algebra).unwrap());
        assert!(check_bfc(&t.algebra).unwrap().holds);
        assert!(check_determining_property(&t.algebra, &ZeroOneSpec::standard()).unwrap().holds());
    }

    #[test]
    fn d5_is_indecomposable() {
        let d = build("D5");
        let pairs = factor_pairs(&d.algebra).unwrap();
        assert_eq!(pairs.len(), 2);
        assert!(pairs.iter().all(FactorPair::is_trivial));
        assert!(is_directly_indecomposable(&d.algebra).unwrap());
        let central = central_elements(&d.algebra, &ZeroOneSpec::standard()).unwrap();
        assert_eq!(central.distinct_values(), BTreeSet::from([vec![0], vec![d.at(&[1, 1])]]));
        assert!(check_determining_property(&d.algebra, &ZeroOneSpec::standard()).unwrap().holds());
        assert!(check_bfc(&d.algebra).unwrap().holds);
    }

    #[test]
    fn l2_times_l5() {
        let p = build("L2xL5");
        let a = &p.algebra;
        let pairs = factor_pairs(a).unwrap();
        let k1 = Congruence::from_labels(&p.labels.iter().map(|l| l[0]).collect::<Vec<_>>());
        let k2 = Congruence::from_labels(&p.labels.iter().map(|l| l[1]).collect::<Vec<_>>());
        assert!(pairs.contains(&FactorPair { theta: k1.clone(), theta_star: k2.clone() }));
        for q in &pairs {
            assert!(pairs.contains(&q.swapped()));
            assert!(is_factor_pair(&q.theta, &q.theta_star).unwrap());
        }
        // Frozen from an independent brute-force enumeration.
        assert_eq!(pairs.len(), 6);
        let reports = decompose(a).unwrap();
        assert!(reports.iter().all(|r| r.verify(a)));
        assert!(reports.iter().any(|r| [r.quotient_sizes.0, r.quotient_sizes.1] == [2, 5] || [r.quotient_sizes.0, r.quotient_sizes.1] == [5, 2]));

        let z = ZeroOneSpec::standard();
        let central = central_elements(a, &z).unwrap();
        assert!(central.unsolved.is_empty());
        let expected: BTreeSet<Vec<Element>> =
            [[0, 0], [0, 1], [1, 0], [1, 1]].iter().map(|l| vec![p.at(l)]).collect();
        assert_eq!(central.distinct_values(), expected);
        let e = central.elements.iter().find(|c| c.witness.theta == k1).unwrap();
        assert_eq!(e.value, vec![p.at(&[0, 1])]);

        let dp = check_determining_property(a, &z).unwrap();
        assert!(dp.well_defined);
        assert!(!dp.injective);
        assert_eq!((dp.factor_pairs, dp.central_elements), (6, 4));
        let bfc = check_bfc(a).unwrap();
        assert!(!bfc.holds);
        assert_eq!(bfc.factor_congruences.len(), 5);
    }

    #[test]
    fn l2v_times_l5v_has_the_determining_property() {
        let p = build("L2vxL5v");
        let z = ZeroOneSpec::standard();
        let dp = check_determining_property(&p.algebra, &z).unwrap();
        assert!(dp.holds() && dp.weak_holds());
        assert_eq!((dp.factor_pairs, dp.central_elements), (4, 4));
        let bfc = check_bfc(&p.algebra).unwrap();
        assert!(bfc.holds);
        assert_eq!(bfc.factor_congruences.len(), 4);
        let comp = complementary_pairs(&p.algebra, &z).unwrap();
        assert!(comp.iter().any(|c| c.e == vec![p.at(&[0, 1])] && c.f == vec![p.at(&[1, 0])]));
    }

    #[test]
    fn reconstruction_sends_central_element_to_zero_one() {
        let p = build("L2vxL3v");
        let a = &p.algebra;
        let z = ZeroOneSpec::standard();
        let (zeros, ones) = z.values(a).unwrap();
        for c in central_elements(a, &z).unwrap().elements {
            let r = DecompositionReport::build(a, c.witness.clone()).unwrap();
            let (i1, i2) = (c.witness.theta.class_index(), c.witness.theta_star.class_index());
            let img = r.reconstruction.get(c.value[0]).unwrap();
            let s = r.quotient_sizes.1;
            assert_eq!((img / s, img % s), (i1[zeros[0]], i2[ones[0]]));
        }
    }
}
