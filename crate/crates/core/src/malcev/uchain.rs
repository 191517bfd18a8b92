use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::algebra::{indexed_names, parse_term, Algebra, Element, Signature, Term, TermEnumerator, ZeroOneSpec};

use super::MalcevError;

/// Terms `u₁ … u_k` in `x, y, z⃗` with `k` odd, meant to satisfy
///
/// ```text
/// x ≈ u₁(x,y,0⃗)
/// uᵢ(x,y,1⃗) ≈ uᵢ₊₁(x,y,1⃗)   i odd
/// uᵢ(x,y,0⃗) ≈ uᵢ₊₁(x,y,0⃗)   i even
/// u_k(x,y,1⃗) ≈ y
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UChain {
    zero_one: ZeroOneSpec,
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainFile {
    zeros: Vec<String>,
    ones: Vec<String>,
    u: Vec<String>,
}

impl UChain {
    pub fn new(zero_one: ZeroOneSpec, terms: Vec<Term>) -> Result<Self, MalcevError> {
        if terms.len() % 2 == 0 {
            return Err(MalcevError::Precondition(format!("a u-chain needs odd length, got {}", terms.len())));
        }
        let allowed = UChain::variables_for(zero_one.l());
        for t in &terms {
            if !t.vars().iter().all(|v| allowed.contains(v)) {
                return Err(MalcevError::VariableOutsideArity { term: t.to_string(), allowed: allowed.join(",") });
            }
        }
        Ok(UChain { zero_one, terms })
    }

    /// `x, y` followed by the z-names for `l`.
    pub fn variables_for(l: usize) -> Vec<String> {
        let mut v = vec!["x".to_string(), "y".to_string()];
        v.extend(indexed_names("z", l));
        v
    }

    pub fn variables(&self) -> Vec<String> {
        UChain::variables_for(self.zero_one.l())
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn k(&self) -> usize {
        self.terms.len()
    }

    pub fn zero_one(&self) -> &ZeroOneSpec {
        &self.zero_one
    }

    pub fn to_json(&self) -> String {
        let strings = |ts: &[Term]| ts.iter().map(Term::to_string).collect();
        let file = ChainFile { zeros: strings(self.zero_one.zeros()), ones: strings(self.zero_one.ones()), u: strings(&self.terms) };
        serde_json::to_string_pretty(&file).expect("chain serializes")
    }

    pub fn from_json(text: &str, sig: &Signature) -> Result<Self, MalcevError> {
        let file: ChainFile = serde_json::from_str(text).map_err(|e| MalcevError::Json(e.to_string()))?;
        let terms = |v: &[String]| v.iter().map(|s| parse_term(s, sig)).collect::<Result<Vec<_>, _>>();
        let chain = UChain::new(ZeroOneSpec::new(terms(&file.zeros)?, terms(&file.ones)?)?, terms(&file.u)?)?;
        chain.zero_one.check(sig)?;
        for t in &chain.terms {
            t.check(sig)?;
        }
        Ok(chain)
    }

    /// Replays the chain on every algebra; returns the certificate on success.
    pub fn validate(self, algebras: &[(&str, &Algebra)]) -> Result<ValidatedUChain, UChainReport> {
        let report = validate_u_chain(algebras, &self);
        if report.valid {
            Ok(ValidatedUChain { chain: self, algebras: report.algebras })
        } else {
            Err(report)
        }
    }

    /// Text of identity number `i` (1-based, up to `k + 1`).
    fn identity_text(&self, i: usize) -> String {
        let k = self.k();
        let u = |j: usize, z: &str| format!("u{j}(x,y,{z})");
        match i {
            1 => format!("x ≈ {}", u(1, "0⃗")),
            _ if i == k + 1 => format!("{} ≈ y", u(k, "1⃗")),
            _ => {
                let j = i - 1;
                let z = if j % 2 == 1 { "1⃗" } else { "0⃗" };
                format!("{} ≈ {}", u(j, z), u(j + 1, z))
            }
        }
    }
}

/// A chain that passed replay on the listed algebras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedUChain {
    chain: UChain,
    algebras: Vec<String>,
}

impl ValidatedUChain {
    pub fn chain(&self) -> &UChain {
        &self.chain
    }

    /// The algebras the chain was checked on.
    pub fn algebras(&self) -> &[String] {
        &self.algebras
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UChainViolation {
    pub identity: usize,
    pub text: String,
    pub algebra: String,
    pub x: Element,
    pub y: Element,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UChainReport {
    pub k: usize,
    pub algebras: Vec<String>,
    pub valid: bool,
    /// First failing `(x, y)` per identity and algebra.
    pub violations: Vec<UChainViolation>,
}

/// Checks all `k + 1` identities for every `x, y` in every algebra.
pub fn validate_u_chain(algebras: &[(&str, &Algebra)], chain: &UChain) -> UChainReport {
    let vars = chain.variables();
    let k = chain.k();
    let mut violations = Vec::new();
    for (name, a) in algebras {
        let compiled: Result<Vec<_>, _> = chain.terms.iter().map(|t| t.compile(a.signature(), &vars)).collect();
        let (Ok(compiled), Ok((zeros, ones))) = (compiled, chain.zero_one.values(a)) else {
            violations.push(UChainViolation { identity: 0, text: "terms do not fit the signature".into(), algebra: name.to_string(), x: 0, y: 0 });
            continue;
        };
        let mut first_failure: Vec<Option<(Element, Element)>> = vec![None; k + 2];
        let mut env0 = vec![0; vars.len()];
        let mut env1 = vec![0; vars.len()];
        env0[2..].copy_from_slice(&zeros);
        env1[2..].copy_from_slice(&ones);
        for x in a.elements() {
            for y in a.elements() {
                env0[..2].copy_from_slice(&[x, y]);
                env1[..2].copy_from_slice(&[x, y]);
                let at0: Vec<Element> = compiled.iter().map(|c| c.eval(a, &env0)).collect();
                let at1: Vec<Element> = compiled.iter().map(|c| c.eval(a, &env1)).collect();
                let mut holds = vec![at0[0] == x];
                for j in 1..k {
                    holds.push(if j % 2 == 1 { at1[j - 1] == at1[j] } else { at0[j - 1] == at0[j] });
                }
                holds.push(at1[k - 1] == y);
                for (i, ok) in holds.into_iter().enumerate() {
                    if !ok && first_failure[i + 1].is_none() {
                        first_failure[i + 1] = Some((x, y));
                    }
                }
            }
        }
        for (i, f) in first_failure.into_iter().enumerate() {
            if let Some((x, y)) = f {
                violations.push(UChainViolation { identity: i, text: chain.identity_text(i), algebra: name.to_string(), x, y });
            }
        }
    }
    UChainReport {
        k,
        algebras: algebras.iter().map(|(n, _)| n.to_string()).collect(),
        valid: violations.is_empty(),
        violations,
    }
}

/// Shortest chain built from terms of depth ≤ `max_depth` that works on every
/// supplied algebra. Terms are identified by their values at all `(x, y, 0⃗)`
/// and `(x, y, 1⃗)` points, which is exactly what the identities see.
pub fn find_u_chain(algebras: &[(&str, &Algebra)], zero_one: &ZeroOneSpec, max_depth: usize, max_classes: usize) -> Option<UChain> {
    let vars = UChain::variables_for(zero_one.l());
    let algs: Vec<&Algebra> = algebras.iter().map(|(_, a)| *a).collect();
    let mut en = TermEnumerator::new(algs.clone(), vars).ok()?;
    // Point layout: for each algebra and (x, y), the 0⃗ point then the 1⃗ point.
    let mut x_at0 = Vec::new();
    let mut y_at1 = Vec::new();
    for (i, a) in algs.iter().enumerate() {
        let (zeros, ones) = zero_one.values(a).ok()?;
        for x in a.elements() {
            for y in a.elements() {
                en.add_point(i, [vec![x, y], zeros.clone()].concat());
                en.add_point(i, [vec![x, y], ones.clone()].concat());
                x_at0.push(x);
                y_at1.push(y);
            }
        }
    }
    let classes = en.enumerate(max_depth, max_classes);
    let split = |fp: &[Element]| -> (Vec<Element>, Vec<Element>) {
        (fp.iter().step_by(2).copied().collect(), fp.iter().skip(1).step_by(2).copied().collect())
    };
    let halves: Vec<(Vec<Element>, Vec<Element>)> = classes.iter().map(|c| split(&c.fingerprint)).collect();
    let mut by0: HashMap<&[Element], Vec<usize>> = HashMap::new();
    let mut by1: HashMap<&[Element], Vec<usize>> = HashMap::new();
    for (i, (f0, f1)) in halves.iter().enumerate() {
        by0.entry(f0.as_slice()).or_default().push(i);
        by1.entry(f1.as_slice()).or_default().push(i);
    }

    // States are (class, position parity); position 1 is odd.
    let state = |c: usize, odd: bool| 2 * c + usize::from(odd);
    let mut prev: Vec<Option<usize>> = vec![None; 2 * classes.len()];
    let mut seen = vec![false; 2 * classes.len()];
    let mut expanded0: std::collections::HashSet<&[Element]> = Default::default();
    let mut expanded1: std::collections::HashSet<&[Element]> = Default::default();
    let mut queue = VecDeque::new();
    for &c in by0.get(x_at0.as_slice()).map(Vec::as_slice).unwrap_or(&[]) {
        seen[state(c, true)] = true;
        queue.push_back(state(c, true));
    }
    while let Some(s) = queue.pop_front() {
        let (c, odd) = (s / 2, s % 2 == 1);
        if odd && halves[c].1 == y_at1 {
            let mut path = vec![c];
            let mut at = s;
            while let Some(p) = prev[at] {
                path.push(p / 2);
                at = p;
            }
            path.reverse();
            let terms = path.into_iter().map(|c| classes[c].term.clone()).collect();
            return UChain::new(zero_one.clone(), terms).ok();
        }
        // Odd positions continue through a shared 1⃗-value, even ones through 0⃗.
        let (key, groups, expanded) = if odd {
            (halves[c].1.as_slice(), &by1, &mut expanded1)
        } else {
            (halves[c].0.as_slice(), &by0, &mut expanded0)
        };
        if !expanded.insert(key) {
            continue;
        }
        for &next in &groups[key] {
            let t = state(next, !odd);
            if !seen[t] {
                seen[t] = true;
                prev[t] = Some(s);
                queue.push_back(t);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_l, join_signature};

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    fn standard_chain() -> UChain {
        let z = v("z");
        UChain::new(
            ZeroOneSpec::standard(),
            vec![
                Term::binary("+", v("x"), z.clone()),
                Term::binary("*", v("x"), z.clone()),
                Term::binary("*", v("y"), z.clone()),
                Term::binary("+", v("y"), z),
                v("y"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn standard_chain_validates_on_l_algebras() {
        let algs: Vec<Algebra> = (2..=6).map(|n| build_l(n, true).unwrap()).collect();
        let named: Vec<(&str, &Algebra)> = algs.iter().map(|a| ("L", a)).collect();
        let report = validate_u_chain(&named, &standard_chain());
        assert!(report.valid, "{report:?}");
        assert_eq!(report.k, 5);
    }

    #[test]
    fn broken_first_identity_is_named() {
        let a = build_l(3, false).unwrap();
        let mut terms = standard_chain().terms;
        terms[0] = Term::binary("*", v("x"), v("z"));
        let chain = UChain::new(ZeroOneSpec::standard(), terms).unwrap();
        let report = validate_u_chain(&[("L3", &a)], &chain);
        assert!(!report.valid);
        assert_eq!(report.violations[0].identity, 1);
        assert_eq!(report.violations[0].text, "x ≈ u1(x,y,0⃗)");
        assert!(UChain::new(ZeroOneSpec::standard(), vec![v("x"), v("y")]).is_err());
    }

    #[test]
    fn search_finds_an_odd_chain() {
        let algs: Vec<Algebra> = (2..=4).map(|n| build_l(n, false).unwrap()).collect();
        let named: Vec<(&str, &Algebra)> = algs.iter().map(|a| ("L", a)).collect();
        let chain = find_u_chain(&named, &ZeroOneSpec::standard(), 1, 100_000).unwrap();
        assert_eq!(chain.k() % 2, 1);
        assert!(validate_u_chain(&named, &chain).valid);
    }

    #[test]
    fn json_round_trip() {
        let c = standard_chain();
        assert_eq!(UChain::from_json(&c.to_json(), &join_signature()).unwrap(), c);
    }
}
