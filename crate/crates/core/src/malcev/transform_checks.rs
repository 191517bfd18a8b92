use std::collections::HashSet;

use serde::Serialize;

use crate::algebra::{Algebra, Element, Term, TermEnumerator};
use crate::congruence::{generated_congruence, Congruence, Relation};
use crate::factorization::is_factor_pair;

use super::{CompiledFamily, MalcevError, MalcevFamily, Transform};

/// One of the four congruence identities for a transform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformEntry {
    pub transform: String,
    /// `Cg(tup, transform(tup))`.
    pub rhs: Congruence,
    /// The left side with every `∘` read as `∨`.
    pub join_lhs: Congruence,
    pub join_equal: bool,
    /// The left side as a literal relational composition.
    pub composition_equal: bool,
    pub composition_is_congruence: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformReport {
    pub tuple: Vec<Element>,
    pub entries: Vec<TransformEntry>,
}

impl TransformReport {
    pub fn join_reading_holds(&self) -> bool {
        self.entries.iter().all(|e| e.join_equal)
    }

    pub fn composition_reading_holds(&self) -> bool {
        self.entries.iter().all(|e| e.composition_equal)
    }
}

fn check_tuple(a: &Algebra, fam: &MalcevFamily, tup: &[Element]) -> Result<(), MalcevError> {
    if tup.len() != fam.tuple_len() {
        return Err(MalcevError::LengthMismatch { expected: fam.tuple_len(), found: tup.len() });
    }
    match tup.iter().find(|&&v| v >= a.size()) {
        Some(&v) => Err(MalcevError::ElementOutOfRange(v)),
        None => Ok(()),
    }
}

/// Compares both readings of the four identities at one tuple
/// `(c, d, e⃗, a₁, b₁, …, aₙ, bₙ)`.
pub fn check_transform_congruences(a: &Algebra, fam: &MalcevFamily, tup: &[Element]) -> Result<TransformReport, MalcevError> {
    check_tuple(a, fam, tup)?;
    let cf = CompiledFamily::new(a, fam)?;
    let l = fam.l();
    let (c, d) = (tup[0], tup[1]);
    let e = &tup[2..2 + l];
    let n = fam.n();
    let xs = |j: usize| 2 + l + 2 * (j - 1);

    let mut entries = Vec::new();
    for kind in Transform::ALL {
        let image = cf.transform(kind, tup)?;
        let rhs = generated_congruence(a, &tup.iter().copied().zip(image.iter().copied()).collect::<Vec<_>>());

        let ends = if kind.starred() { cf.ones() } else { cf.zeros() };
        let mut factors: Vec<Vec<(Element, Element)>> = Vec::new();
        if kind == Transform::Sigma {
            factors.push(vec![(c, d)]);
        }
        factors.push(e.iter().copied().zip(ends.iter().copied()).collect());
        // The last factor is a join over i of Cg(aᵢ or bᵢ, sᵢ or tᵢ at the original prefix).
        let last: Vec<(Element, Element)> = (1..=n)
            .map(|j| {
                let own = if kind.rebuilds_x() { tup[xs(j)] } else { tup[xs(j) + 1] };
                (own, cf.eval_st(kind.starred(), j, &tup[..xs(j)]))
            })
            .collect();
        factors.push(last);

        let congruences: Vec<Congruence> = factors.iter().map(|pairs| generated_congruence(a, pairs)).collect();
        let join_lhs = generated_congruence(a, &factors.concat());
        let composed = congruences
            .iter()
            .map(Relation::from_congruence)
            .reduce(|acc, r| acc.compose(&r))
            .expect("at least two factors");
        let rhs_rel = Relation::from_congruence(&rhs);
        entries.push(TransformEntry {
            transform: kind.to_string(),
            join_equal: join_lhs == rhs,
            composition_equal: composed == rhs_rel,
            composition_is_congruence: composed.is_equivalence() && composed.to_congruence().is_some_and(|k| k.is_compatible(a)),
            rhs,
            join_lhs,
        });
    }
    Ok(TransformReport { tuple: tup.to_vec(), entries })
}

/// Optional choices for the `aᵢ` and `bᵢ`; missing ones are solved for.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SandwichInputs {
    pub a: Option<Vec<Element>>,
    pub b: Option<Vec<Element>>,
    /// Depth of the generated part of the term test set.
    pub depth: usize,
    /// Cap on the number of generated test terms.
    pub max_terms: usize,
}

impl SandwichInputs {
    pub fn solved(depth: usize) -> Self {
        SandwichInputs { a: None, b: None, depth, max_terms: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermCheck {
    pub terms_checked: usize,
    pub failures: Vec<String>,
}

impl TermCheck {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub a: Vec<Element>,
    pub b: Vec<Element>,
    /// `t(σ(…)) θ t(…) θ* t(σ*(…))`; absent when `c θ d` fails.
    pub sigma_terms: Option<TermCheck>,
    /// `t(ρ(…)) θ t(…) θ* t(ρ*(…))`.
    pub rho_terms: TermCheck,
    pub test_set: String,
}

/// The unique `x` with `from θ x θ* to`.
fn sandwich(theta: &Congruence, theta_star: &Congruence, from: Element, to: Element) -> Element {
    (0..theta.size())
        .find(|&x| theta.related(from, x) && theta_star.related(x, to))
        .expect("a complementary pair solves every sandwich")
}

/// Checks the two sandwich congruences for every term in a finite test
/// set: all `L_α`, `R_α` plus generated terms up to `inputs.depth`.
///
/// The same complementary pair plays both roles. Supplied `aᵢ` must satisfy
/// `sᵢ θ aᵢ θ* tᵢ` at their prefix, supplied `bᵢ` likewise; missing values
/// are solved for, which is always possible for a complementary pair.
#[allow(clippy::too_many_arguments)]
pub fn check_term_sandwiches(
    a: &Algebra,
    fam: &MalcevFamily,
    theta: &Congruence,
    theta_star: &Congruence,
    c: Element,
    d: Element,
    e: &[Element],
    inputs: &SandwichInputs,
) -> Result<SandwichReport, MalcevError> {
    if !is_factor_pair(theta, theta_star)? || theta.size() != a.size() {
        return Err(MalcevError::NotFactorPair);
    }
    let l = fam.l();
    let n = fam.n();
    if e.len() != l {
        return Err(MalcevError::LengthMismatch { expected: l, found: e.len() });
    }
    if let Some(&v) = [c, d].iter().chain(e).find(|&&v| v >= a.size()) {
        return Err(MalcevError::ElementOutOfRange(v));
    }
    let cf = CompiledFamily::new(a, fam)?;
    let sandwiched = |i: usize| theta.related(cf.zeros()[i], e[i]) && theta_star.related(e[i], cf.ones()[i]);
    if !(0..l).all(sandwiched) {
        return Err(MalcevError::Precondition("0⃗ θ e⃗ θ* 1⃗".into()));
    }
    for given in [&inputs.a, &inputs.b].into_iter().flatten() {
        if given.len() != n {
            return Err(MalcevError::LengthMismatch { expected: n, found: given.len() });
        }
    }

    let mut tup = vec![c, d];
    tup.extend_from_slice(e);
    for j in 1..=n {
        let s = cf.eval_st(false, j, &tup);
        let t = cf.eval_st(true, j, &tup);
        let solved = sandwich(theta, theta_star, s, t);
        let pick = |which: char, given: &Option<Vec<Element>>| -> Result<Element, MalcevError> {
            match given {
                Some(v) if v[j - 1] >= a.size() => Err(MalcevError::ElementOutOfRange(v[j - 1])),
                Some(v) if v[j - 1] != solved => Err(MalcevError::SandwichViolated { which, index: j }),
                _ => Ok(solved),
            }
        };
        let aj = pick('a', &inputs.a)?;
        let bj = pick('b', &inputs.b)?;
        tup.push(aj);
        tup.push(bj);
    }

    let names = fam.slot_names();
    let points: Vec<Vec<Element>> = std::iter::once(Ok(tup.clone()))
        .chain(Transform::ALL.iter().map(|&k| cf.transform(k, &tup)))
        .collect::<Result<_, _>>()?;

    // Terms agreeing at these five points give identical checks, so dedup by them is exact.
    let mut enumerator = TermEnumerator::new(vec![a], names.clone()).expect("one algebra");
    for p in &points {
        enumerator.add_point(0, p.clone());
    }
    let mut tests: Vec<(Term, Vec<Element>)> = Vec::new();
    let mut seen = HashSet::new();
    for w in fam.words() {
        for t in [fam.left(&w), fam.right(&w)] {
            let fp = enumerator.fingerprint(t)?;
            if seen.insert(fp.clone()) {
                tests.push((t.clone(), fp));
            }
        }
    }
    for et in enumerator.enumerate(inputs.depth, inputs.max_terms) {
        if seen.insert(et.fingerprint.clone()) {
            tests.push((et.term, et.fingerprint));
        }
    }

    let run = |left: usize, right: usize| {
        let failures = tests
            .iter()
            .filter(|(_, fp)| !(theta.related(fp[left], fp[0]) && theta_star.related(fp[0], fp[right])))
            .map(|(t, _)| t.to_string())
            .collect();
        TermCheck { terms_checked: tests.len(), failures }
    };
    // Point order: plain, σ, σ*, ρ, ρ*.
    let sigma_terms = theta.related(c, d).then(|| run(1, 2));
    let rho_terms = run(3, 4);
    let half = n;
    Ok(SandwichReport {
        a: (0..half).map(|j| tup[2 + l + 2 * j]).collect(),
        b: (0..half).map(|j| tup[3 + l + 2 * j]).collect(),
        sigma_terms,
        rho_terms,
        test_set: format!("all L_α, R_α and every term of depth ≤ {} (up to {} classes)", inputs.depth, inputs.max_terms),
    })
}
