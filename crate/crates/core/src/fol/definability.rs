use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::{indexed_names, Algebra, Element, ZeroOneSpec};
use crate::congruence::{Congruence, Relation};
use crate::factorization::{central_elements, factor_pairs, FactorPair, FactorizationError};

use super::{EvalConfig, EvalError, Evaluator, Formula};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum DefinabilityError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Factorization(#[from] FactorizationError),
}

/// `{(p, q) : A ⊨ φ(p, q, z⃗)}` with `φ` in the free variables `x, y, z⃗`.
pub fn formula_relation(a: &Algebra, phi: &Formula, z: &[Element], config: EvalConfig) -> Result<Relation, EvalError> {
    let mut order = vec!["x".to_string(), "y".to_string()];
    order.extend(indexed_names("z", z.len()));
    let mut ev = Evaluator::new(a, phi, &order, config)?;
    let mut values = vec![0; 2 + z.len()];
    values[2..].copy_from_slice(z);
    let mut rel = Relation::empty(a.size());
    for p in a.elements() {
        for q in a.elements() {
            values[0] = p;
            values[1] = q;
            if ev.eval(&values)? {
                rel.insert(p, q);
            }
        }
    }
    Ok(rel)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelEntry {
    pub central: Vec<Element>,
    pub witness: FactorPair,
    pub relation_is_congruence: bool,
    pub defined: Option<Congruence>,
    /// The defined relation is the witness's `θ`, the congruence with `0⃗ θ e⃗`.
    pub matches_witness: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelDefinabilityReport {
    pub entries: Vec<KernelEntry>,
    pub central_elements: usize,
    pub factor_congruences: Vec<Congruence>,
    /// Distinct central elements define distinct factor congruences.
    pub injective: bool,
    /// Every factor congruence is defined by some central element.
    pub surjective: bool,
}

/// Checks that `e⃗ ↦ φ(·,·,e⃗)` maps the central elements of `A` onto its factor congruences.
pub fn check_definable_kernels(a: &Algebra, phi: &Formula, z: &ZeroOneSpec, config: EvalConfig) -> Result<KernelDefinabilityReport, DefinabilityError> {
    let pairs = factor_pairs(a)?;
    let factor_congruences: Vec<Congruence> =
        pairs.iter().map(|p| p.theta.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let central = central_elements(a, z)?;
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    for c in &central.elements {
        if !seen.insert(c.value.clone()) {
            continue;
        }
        let rel = formula_relation(a, phi, &c.value, config)?;
        let defined = rel.to_congruence().filter(|t| t.is_compatible(a));
        entries.push(KernelEntry {
            central: c.value.clone(),
            witness: c.witness.clone(),
            relation_is_congruence: defined.is_some(),
            matches_witness: defined.as_ref() == Some(&c.witness.theta),
            defined,
        });
    }
    let images: Vec<&Congruence> = entries.iter().filter_map(|e| e.defined.as_ref()).collect();
    let distinct: BTreeSet<&Congruence> = images.iter().copied().collect();
    let injective = images.len() == entries.len()
        && distinct.len() == images.len()
        && images.iter().all(|t| factor_congruences.contains(t));
    let surjective = factor_congruences.iter().all(|t| distinct.contains(t));
    Ok(KernelDefinabilityReport { central_elements: entries.len(), entries, factor_congruences, injective, surjective })
}
