use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::algebra::{decode_tuple, tuple_count, Algebra, Element};

use super::{CompiledFamily, MalcevError, MalcevFamily, Transform, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MalcevConfig {
    /// Maximum number of term evaluations.
    pub budget: u64,
}

impl Default for MalcevConfig {
    fn default() -> Self {
        MalcevConfig { budget: 1_000_000_000 }
    }
}

/// Where both sides of an identity are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Point {
    Plain,
    At(Transform),
}

impl Point {
    fn index(self) -> usize {
        match self {
            Point::Plain => 0,
            Point::At(t) => 1 + Transform::ALL.iter().position(|&u| u == t).unwrap(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    /// A slot variable of X⃗, by position.
    Slot(usize),
    Left(Word),
    Right(Word),
}

#[derive(Debug, Clone)]
struct Identity {
    block: &'static str,
    lhs: Operand,
    rhs: Operand,
    at: Point,
}

struct Shown<'a>(&'a Operand, Point, &'a [String]);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let point = match self.1 {
            Point::Plain => "X⃗".to_string(),
            Point::At(t) => format!("{t}(X⃗)"),
        };
        match self.0 {
            Operand::Slot(i) => f.write_str(&self.2[*i]),
            Operand::Left(w) => write!(f, "L_{w}({point})"),
            Operand::Right(w) => write!(f, "R_{w}({point})"),
        }
    }
}

fn identities(fam: &MalcevFamily) -> Vec<Identity> {
    use Operand::{Left as L, Right as R};
    let big_n = fam.big_n() as u8;
    let k = fam.k() as u8;
    let mut out = Vec::new();
    let mut push = |block, lhs, rhs, at| out.push(Identity { block, lhs, rhs, at });
    let eps = Word::empty();
    let rho = Point::At(Transform::Rho);
    let rho_star = Point::At(Transform::RhoStar);

    for a in Word::of_length(big_n, big_n as usize) {
        push("|α|=N", L(a.clone()), R(a.clone()), rho);
        push("|α|=N", L(a.clone()), R(a), rho_star);
    }

    push("|α|=0", Operand::Slot(0), L(eps.clone()), Point::Plain);
    push("|α|=0", R(eps.clone()), Operand::Slot(1), Point::Plain);
    push("|α|=0", L(eps.clone()), L(eps.push(1)), rho);
    for j in 1..big_n {
        push("|α|=0", R(eps.push(j)), L(eps.push(j + 1)), rho);
    }
    push("|α|=0", R(eps.push(big_n)), R(eps.clone()), rho);

    for len in 1..big_n as usize {
        let (block, first, second) = if len % 2 == 0 {
            ("0<|α|<N, |α| even", Transform::Rho, Transform::RhoStar)
        } else {
            ("0<|α|<N, |α| odd", Transform::Sigma, Transform::SigmaStar)
        };
        let (p, q) = (Point::At(first), Point::At(second));
        for a in Word::of_length(big_n, len) {
            push(block, L(a.clone()), L(a.push(1)), p);
            for j in 1..k {
                push(block, R(a.push(j)), L(a.push(j + 1)), p);
            }
            push(block, R(a.push(k)), R(a.clone()), p);
            push(block, L(a.clone()), L(a.push(k + 1)), q);
            for j in k + 1..big_n {
                push(block, R(a.push(j)), L(a.push(j + 1)), q);
            }
            push(block, R(a.push(big_n)), R(a), q);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityResult {
    pub block: String,
    pub identity: String,
    pub holds: bool,
    /// First assignment to X⃗ (in enumeration order) where the sides differ.
    pub counter_assignment: Option<BTreeMap<String, Element>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalcevReport {
    pub algebra_size: usize,
    pub assignments: u64,
    pub identities: Vec<IdentityResult>,
    pub holds: bool,
    pub scope: String,
}

impl MalcevReport {
    pub fn failures(&self) -> impl Iterator<Item = &IdentityResult> {
        self.identities.iter().filter(|r| !r.holds)
    }
}

/// Checks every identity of the family's system in `a`, under all
/// assignments to `x, y, z⃗, x₁, y₁, …, xₙ, yₙ`.
pub fn check_malcev_identities(a: &Algebra, fam: &MalcevFamily, config: MalcevConfig) -> Result<MalcevReport, MalcevError> {
    let cf = CompiledFamily::new(a, fam)?;
    let names = fam.slot_names();
    let ids = identities(fam);
    let word_index: HashMap<&Word, usize> = cf.words().iter().enumerate().map(|(i, w)| (w, i)).collect();
    let width = cf.words().len();
    let len = fam.tuple_len();
    let count = tuple_count(a.size(), len).ok_or(MalcevError::BudgetExceeded { budget: config.budget })?;

    let mut results: Vec<IdentityResult> = ids
        .iter()
        .map(|id| IdentityResult {
            block: id.block.into(),
            identity: format!("{} ≈ {}", Shown(&id.lhs, id.at, &names), Shown(&id.rhs, id.at, &names)),
            holds: true,
            counter_assignment: None,
        })
        .collect();

    let mut tup = vec![0; len];
    let mut points: Vec<Vec<Element>> = (0..5).map(|_| Vec::with_capacity(len)).collect();
    // Lazily filled values: [point][side][word].
    let mut cache: Vec<Option<Element>> = vec![None; 5 * 2 * width];
    let mut spent: u64 = 0;
    for index in 0..count {
        decode_tuple(index, a.size(), &mut tup);
        points[0].clone_from(&tup);
        for (p, kind) in Transform::ALL.iter().enumerate() {
            cf.transform_into(*kind, &tup, &mut points[p + 1]);
        }
        cache.iter_mut().for_each(|c| *c = None);
        for (id, result) in ids.iter().zip(results.iter_mut()) {
            if !result.holds {
                continue;
            }
            let p = id.at.index();
            let mut value = |op: &Operand| -> Element {
                match op {
                    Operand::Slot(i) => points[p][*i],
                    Operand::Left(w) | Operand::Right(w) => {
                        let left = matches!(op, Operand::Left(_));
                        let wi = word_index[w];
                        let slot = (p * 2 + usize::from(!left)) * width + wi;
                        *cache[slot].get_or_insert_with(|| {
                            spent += 1;
                            if left {
                                cf.eval_left(wi, &points[p])
                            } else {
                                cf.eval_right(wi, &points[p])
                            }
                        })
                    }
                }
            };
            if value(&id.lhs) != value(&id.rhs) {
                result.holds = false;
                result.counter_assignment = Some(names.iter().cloned().zip(tup.iter().copied()).collect());
            }
        }
        if spent > config.budget {
            return Err(MalcevError::BudgetExceeded { budget: config.budget });
        }
    }
    let holds = results.iter().all(|r| r.holds);
    Ok(MalcevReport {
        algebra_size: a.size(),
        assignments: count as u64,
        identities: results,
        holds,
        scope: "checked in this one algebra only; passing is a necessary condition, not a proof for the variety".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Term, ZeroOneSpec};
    use crate::gallery::{base_signature, build_l};

    fn collapsing_family() -> MalcevFamily {
        MalcevFamily::from_fn(2, ZeroOneSpec::standard(), vec![], vec![], |_, _| Term::var("x")).unwrap()
    }

    #[test]
    fn identity_counts_for_n_two() {
        let fam = collapsing_family();
        let ids = identities(&fam);
        // |α|=N: 4 words × 2; |α|=0: 2 + 1 + 1 + 1; |α|=1: 2 words × (2 + 2).
        assert_eq!(ids.len(), 8 + 5 + 8);
    }

    #[test]
    fn one_element_algebra_passes_anything() {
        let one = Algebra::trivial(base_signature());
        let report = check_malcev_identities(&one, &collapsing_family(), MalcevConfig::default()).unwrap();
        assert!(report.holds);
        assert_eq!(report.assignments, 1);
    }

    #[test]
    fn collapsing_family_fails_on_two_elements() {
        let l2 = build_l(2, false).unwrap();
        let report = check_malcev_identities(&l2, &collapsing_family(), MalcevConfig::default()).unwrap();
        assert!(!report.holds);
        let fail = report.failures().find(|r| r.identity == "R_2(ρ(X⃗)) ≈ R_ε(ρ(X⃗))").unwrap();
        let counter = fail.counter_assignment.as_ref().unwrap();
        assert_ne!(counter["x"], counter["y"]);
        assert!(report.failures().all(|r| r.counter_assignment.is_some()));
    }

    #[test]
    fn budget_is_enforced() {
        let l2 = build_l(2, false).unwrap();
        let r = check_malcev_identities(&l2, &collapsing_family(), MalcevConfig { budget: 3 });
        assert_eq!(r, Err(MalcevError::BudgetExceeded { budget: 3 }));
    }
}
