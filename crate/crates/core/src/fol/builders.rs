use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::algebra::{Term, ZeroOneSpec};
use crate::malcev::{MalcevFamily, ValidatedUChain, Word};

use super::Formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("N must be even and at least 2, got {0}")]
    BadN(usize),
    #[error("no formula given for word {0}")]
    MissingTau(Word),
}

/// `∀u ⋀ᵢ (uᵢ(x,y,0⃗) ∨ u = uᵢ(x,y,z⃗) ∨ u) → x ∨ u = y ∨ u`.
pub fn build_semilattice_phi(chain: &ValidatedUChain, join_symbol: &str) -> Formula {
    let chain = chain.chain();
    let z = chain.zero_one();
    let zero_map: HashMap<String, Term> = chain.variables()[2..].iter().cloned().zip(z.zeros().iter().cloned()).collect();
    let u = Term::var("u");
    let join = |t: Term| Term::binary(join_symbol, t, u.clone());
    let antecedent = chain
        .terms()
        .iter()
        .map(|t| Formula::eq(join(t.substitute(&zero_map)), join(t.clone())))
        .collect();
    let consequent = Formula::eq(join(Term::var("x")), join(Term::var("y")));
    Formula::forall("u", Formula::implies(Formula::And(antecedent), consequent))
}

/// Φ₁, Φ₂ and the Ψₘ (`psi[m-1]` is Ψₘ) built from a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phi12 {
    pub phi1: Formula,
    pub phi2: Formula,
    pub psi: Vec<Formula>,
}

impl Phi12 {
    /// Φ = Φ₁ ∧ Φ₂, with free variables `x, y, z⃗`.
    pub fn phi(&self) -> Formula {
        Formula::And(vec![self.phi1.clone(), self.phi2.clone()])
    }
}

/// `∃v₁∀w₁ … ∃vₙ∀wₙ body` with `vᵢ = {first}i`, `wᵢ = {second}i`.
fn alternating_prefix(first: &str, second: &str, n: usize, body: Formula) -> Formula {
    (1..=n).rev().fold(body, |acc, i| Formula::exists(format!("{first}{i}"), Formula::forall(format!("{second}{i}"), acc)))
}

/// `⋀_{γ≠ε, |αγ|≤N} τ_{αγ} → τ_α`, or just `τ_α` when no proper extension exists.
fn guarded(alpha: &Word, big_n: usize, tau: &dyn Fn(&Word) -> Result<Formula, BuildError>) -> Result<Formula, BuildError> {
    let extensions: Vec<Word> = Word::all(big_n as u8, big_n)
        .into_iter()
        .filter(|w| w.len() > alpha.len() && w.has_prefix(alpha))
        .collect();
    if extensions.is_empty() {
        return tau(alpha);
    }
    let antecedent = extensions.iter().map(tau).collect::<Result<Vec<_>, _>>()?;
    Ok(Formula::implies(Formula::And(antecedent), tau(alpha)?))
}

pub fn build_phi12(fam: &MalcevFamily) -> Phi12 {
    let big_n = fam.big_n();
    let tau = |w: &Word| Ok(Formula::eq(fam.left(w).clone(), fam.right(w).clone()));
    let psi: Vec<Formula> = (1..=big_n)
        .map(|m| {
            let parts = Word::of_length(big_n as u8, m).iter().map(|a| guarded(a, big_n, &tau)).collect::<Result<Vec<_>, _>>();
            Formula::And(parts.expect("every word has terms"))
        })
        .collect();
    let k = fam.k();
    let n = fam.n();
    let even = Formula::And((1..=k).map(|m| psi[2 * m - 1].clone()).collect());
    let odd = Formula::And((1..=k).map(|m| psi[2 * m - 2].clone()).collect());
    Phi12 { phi1: alternating_prefix("y", "x", n, even), phi2: alternating_prefix("x", "y", n, odd), psi }
}

fn lookup(taus: &BTreeMap<Word, Formula>) -> impl Fn(&Word) -> Result<Formula, BuildError> + '_ {
    move |w| taus.get(w).cloned().ok_or_else(|| BuildError::MissingTau(w.clone()))
}

fn parity_block(taus: &BTreeMap<Word, Formula>, big_n: usize, m: usize, even: bool) -> Result<Formula, BuildError> {
    if big_n < 2 || big_n % 2 == 1 {
        return Err(BuildError::BadN(big_n));
    }
    let tau = lookup(taus);
    let mut parts = Vec::new();
    for len in m..=big_n {
        if (len % 2 == 0) != even {
            continue;
        }
        for alpha in Word::of_length(big_n as u8, len) {
            parts.push(guarded(&alpha, big_n, &tau)?);
        }
    }
    Ok(if parts.is_empty() { Formula::True } else { Formula::And(parts) })
}

/// `Eₘ`: the guarded conjunction over even-length words of length `m..=N`.
pub fn build_e(taus: &BTreeMap<Word, Formula>, big_n: usize, m: usize) -> Result<Formula, BuildError> {
    parity_block(taus, big_n, m, true)
}

/// `Oₘ`: the same over odd lengths.
pub fn build_o(taus: &BTreeMap<Word, Formula>, big_n: usize, m: usize) -> Result<Formula, BuildError> {
    parity_block(taus, big_n, m, false)
}

/// `(∃y₁∀x₁…∃yₙ∀xₙ E₂) ∧ (∃x₁∀y₁…∃xₙ∀yₙ O₁)`.
pub fn build_eo(taus: &BTreeMap<Word, Formula>, big_n: usize, n: usize) -> Result<Formula, BuildError> {
    let e2 = build_e(taus, big_n, 2)?;
    let o1 = build_o(taus, big_n, 1)?;
    Ok(Formula::And(vec![alternating_prefix("y", "x", n, e2), alternating_prefix("x", "y", n, o1)]))
}

/// `τ_α := L_α = R_α` for every word of `fam`.
pub fn family_taus(fam: &MalcevFamily) -> BTreeMap<Word, Formula> {
    fam.words().into_iter().map(|w| {
        let f = Formula::eq(fam.left(&w).clone(), fam.right(&w).clone());
        (w, f)
    }).collect()
}

/// Instantiates `Φ(x, y, z⃗)` at the given terms, avoiding capture.
pub fn instantiate(phi: &Formula, z: &ZeroOneSpec, x: Term, y: Term, zs: &[Term]) -> Formula {
    let mut map = HashMap::from([("x".to_string(), x), ("y".to_string(), y)]);
    for (name, t) in crate::algebra::indexed_names("z", z.l()).into_iter().zip(zs.iter().cloned()) {
        map.insert(name, t);
    }
    phi.substitute(&map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ZeroOneSpec;
    use crate::malcev::MalcevFamily;

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    #[test]
    fn psi_n_has_no_antecedent() {
        let fam = MalcevFamily::from_fn(2, ZeroOneSpec::standard(), vec![v("x")], vec![v("y")], |left, _| {
            if left { Term::binary("+", v("x"), v("x1")) } else { v("y") }
        })
        .unwrap();
        let p = build_phi12(&fam);
        assert_eq!(p.psi.len(), 2);
        match &p.psi[1] {
            Formula::And(parts) => {
                assert_eq!(parts.len(), 4);
                assert!(parts.iter().all(|f| matches!(f, Formula::Eq(..))));
            }
            other => panic!("{other}"),
        }
        match &p.psi[0] {
            Formula::And(parts) => assert!(parts.iter().all(|f| matches!(f, Formula::Implies(..)))),
            other => panic!("{other}"),
        }
        assert!(p.phi1.to_string().starts_with("(exists y1 (forall x1"));
        assert!(p.phi2.to_string().starts_with("(exists x1 (forall y1"));
        let free: Vec<String> = p.phi().free_vars().into_iter().collect();
        assert_eq!(free, ["x", "y"]);
    }

    #[test]
    fn e_and_o_blocks() {
        let taus: BTreeMap<Word, Formula> = Word::all(2, 2).into_iter().map(|w| (w, Formula::eq(v("x"), v("x")))).collect();
        assert_eq!(build_o(&taus, 2, 3).unwrap(), Formula::True);
        assert_eq!(build_o(&taus, 2, 2).unwrap(), Formula::True);
        match build_e(&taus, 2, 2).unwrap() {
            Formula::And(parts) => assert_eq!(parts.len(), 4),
            other => panic!("{other}"),
        }
        let mut missing = taus.clone();
        missing.remove(&Word::new(vec![2, 1]));
        assert_eq!(build_eo(&missing, 2, 1), Err(BuildError::MissingTau(Word::new(vec![2, 1]))));
        assert_eq!(build_eo(&taus, 3, 1), Err(BuildError::BadN(3)));
    }
}
