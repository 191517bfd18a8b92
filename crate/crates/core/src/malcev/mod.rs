//! The transformers σ, σ*, ρ, ρ* over a family of terms, checkers for the
//! identities they are meant to satisfy, and the search for u-chains.
//!
//! Slot tuples are `(x, y, z⃗, x₁, y₁, …, xₙ, yₙ)`, of length `2 + l + 2n`.
//! `sᵢ` and `tᵢ` read the prefix `(x, y, z⃗, x₁, y₁, …, x_{i−1}, y_{i−1})`,
//! so their arity is `2 + l + 2(i−1)`.

mod identities;
mod transform_checks;
mod uchain;
mod word;

pub use identities::{check_malcev_identities, IdentityResult, MalcevConfig, MalcevReport, Operand, Point};
pub use transform_checks::{
    check_term_sandwiches, check_transform_congruences, SandwichInputs, SandwichReport, TransformEntry, TransformReport, TermCheck,
};
pub use uchain::{find_u_chain, validate_u_chain, UChain, UChainReport, UChainViolation, ValidatedUChain};
pub use word::{BadWord, Word};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{indexed_names, parse_term, Algebra, CompiledTerm, Element, ParseError, Signature, Term, TermError, ZeroOneSpec};
use crate::congruence::CongruenceError;

/// Largest supported N; the number of words grows like Nᴺ.
pub const MAX_N: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MalcevError {
    #[error("N must be even and between 2 and {MAX_N}, got {0}")]
    BadN(usize),
    #[error("{0} sᵢ terms but {1} tᵢ terms")]
    UnevenSt(usize, usize),
    #[error("{term} may only use the variables {allowed}")]
    VariableOutsideArity { term: String, allowed: String },
    #[error("no {side} term for word {word}")]
    MissingWord { side: char, word: Word },
    #[error("{side} term given for word {word}, which is longer than N")]
    ExtraWord { side: char, word: Word },
    #[error("L_ε must be x and R_ε must be y")]
    Endpoints,
    #[error("tuple has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Json(String),
    #[error("bad word: {0}")]
    Word(#[from] BadWord),
    #[error("more than {budget} evaluations needed")]
    BudgetExceeded { budget: u64 },
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error("the congruences are not a complementary factor pair")]
    NotFactorPair,
    #[error("precondition fails: {0}")]
    Precondition(String),
    #[error("supplied {which}{index} breaks its defining condition")]
    SandwichViolated { which: char, index: usize },
    #[error("element {0} outside the universe")]
    ElementOutOfRange(Element),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Transform {
    Sigma,
    SigmaStar,
    Rho,
    RhoStar,
}

impl Transform {
    pub const ALL: [Transform; 4] = [Transform::Sigma, Transform::SigmaStar, Transform::Rho, Transform::RhoStar];

    /// σ and σ* rebuild the x-slots; ρ and ρ* the y-slots.
    fn rebuilds_x(self) -> bool {
        matches!(self, Transform::Sigma | Transform::SigmaStar)
    }

    /// Starred transforms use 1⃗ and the tᵢ.
    fn starred(self) -> bool {
        matches!(self, Transform::SigmaStar | Transform::RhoStar)
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transform::Sigma => "σ",
            Transform::SigmaStar => "σ*",
            Transform::Rho => "ρ",
            Transform::RhoStar => "ρ*",
        })
    }
}

/// Slot names `x, y, z⃗, x1, y1, …, xn, yn`.
pub fn slot_names(l: usize, n: usize) -> Vec<String> {
    let mut names = vec!["x".to_string(), "y".to_string()];
    names.extend(indexed_names("z", l));
    for i in 1..=n {
        names.push(format!("x{i}"));
        names.push(format!("y{i}"));
    }
    names
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalcevFamily {
    big_n: usize,
    zero_one: ZeroOneSpec,
    s: Vec<Term>,
    t: Vec<Term>,
    left: BTreeMap<Word, Term>,
    right: BTreeMap<Word, Term>,
}

fn check_vars(t: &Term, allowed: &[String]) -> Result<(), MalcevError> {
    if t.vars().iter().all(|v| allowed.contains(v)) {
        Ok(())
    } else {
        Err(MalcevError::VariableOutsideArity { term: t.to_string(), allowed: allowed.join(",") })
    }
}

impl MalcevFamily {
    pub fn new(
        big_n: usize,
        zero_one: ZeroOneSpec,
        s: Vec<Term>,
        t: Vec<Term>,
        left: BTreeMap<Word, Term>,
        right: BTreeMap<Word, Term>,
    ) -> Result<Self, MalcevError> {
        if big_n < 2 || big_n % 2 == 1 || big_n > MAX_N {
            return Err(MalcevError::BadN(big_n));
        }
        if s.len() != t.len() {
            return Err(MalcevError::UnevenSt(s.len(), t.len()));
        }
        let n = s.len();
        let l = zero_one.l();
        let names = slot_names(l, n);
        for (i, (si, ti)) in s.iter().zip(&t).enumerate() {
            let allowed = &names[..2 + l + 2 * i];
            check_vars(si, allowed)?;
            check_vars(ti, allowed)?;
        }
        let words = Word::all(big_n as u8, big_n);
        for (side, map) in [('L', &left), ('R', &right)] {
            for w in &words {
                let term = map.get(w).ok_or_else(|| MalcevError::MissingWord { side, word: w.clone() })?;
                check_vars(term, &names)?;
            }
            if let Some(w) = map.keys().find(|w| w.len() > big_n || w.letters().iter().any(|&j| j as usize > big_n)) {
                return Err(MalcevError::ExtraWord { side, word: w.clone() });
            }
        }
        if left[&Word::empty()] != Term::var("x") || right[&Word::empty()] != Term::var("y") {
            return Err(MalcevError::Endpoints);
        }
        Ok(MalcevFamily { big_n, zero_one, s, t, left, right })
    }

    /// A family whose L_α and R_α (α ≠ ε) are given by `side(is_left, α)`.
    pub fn from_fn(
        big_n: usize,
        zero_one: ZeroOneSpec,
        s: Vec<Term>,
        t: Vec<Term>,
        mut side: impl FnMut(bool, &Word) -> Term,
    ) -> Result<Self, MalcevError> {
        let mut left = BTreeMap::new();
        let mut right = BTreeMap::new();
        for w in Word::all(big_n.min(MAX_N) as u8, big_n.min(MAX_N)) {
            let (l, r) = if w.is_empty() { (Term::var("x"), Term::var("y")) } else { (side(true, &w), side(false, &w)) };
            left.insert(w.clone(), l);
            right.insert(w, r);
        }
        MalcevFamily::new(big_n, zero_one, s, t, left, right)
    }

    pub fn big_n(&self) -> usize {
        self.big_n
    }

    pub fn k(&self) -> usize {
        self.big_n / 2
    }

    pub fn n(&self) -> usize {
        self.s.len()
    }

    pub fn l(&self) -> usize {
        self.zero_one.l()
    }

    pub fn zero_one(&self) -> &ZeroOneSpec {
        &self.zero_one
    }

    pub fn s(&self) -> &[Term] {
        &self.s
    }

    pub fn t(&self) -> &[Term] {
        &self.t
    }

    pub fn left(&self, w: &Word) -> &Term {
        &self.left[w]
    }

    pub fn right(&self, w: &Word) -> &Term {
        &self.right[w]
    }

    /// Every word of length at most N, shortest first.
    pub fn words(&self) -> Vec<Word> {
        Word::all(self.big_n as u8, self.big_n)
    }

    pub fn tuple_len(&self) -> usize {
        2 + self.l() + 2 * self.n()
    }

    pub fn slot_names(&self) -> Vec<String> {
        slot_names(self.l(), self.n())
    }

    /// Index of slot `xⱼ` (1-based `j`); `yⱼ` follows it.
    fn x_slot(&self, j: usize) -> usize {
        2 + self.l() + 2 * (j - 1)
    }

    pub fn check(&self, sig: &Signature) -> Result<(), MalcevError> {
        self.zero_one.check(sig)?;
        for t in self.s.iter().chain(&self.t).chain(self.left.values()).chain(self.right.values()) {
            t.check(sig)?;
        }
        Ok(())
    }

    /// The transform applied to a tuple of terms, by substitution.
    pub fn transform_terms(&self, kind: Transform, tup: &[Term]) -> Result<Vec<Term>, MalcevError> {
        if tup.len() != self.tuple_len() {
            return Err(MalcevError::LengthMismatch { expected: self.tuple_len(), found: tup.len() });
        }
        let l = self.l();
        let names = self.slot_names();
        let mut out = Vec::with_capacity(tup.len());
        out.push(tup[0].clone());
        out.push(if kind == Transform::Sigma { tup[0].clone() } else { tup[1].clone() });
        out.extend_from_slice(if kind.starred() { self.zero_one.ones() } else { self.zero_one.zeros() });
        debug_assert_eq!(out.len(), 2 + l);
        for j in 1..=self.n() {
            let xs = self.x_slot(j);
            let map: HashMap<String, Term> = names[..xs].iter().cloned().zip(out.iter().cloned()).collect();
            let term = if kind.starred() { &self.t[j - 1] } else { &self.s[j - 1] };
            let v = term.substitute(&map);
            if kind.rebuilds_x() {
                out.push(v);
                out.push(tup[xs + 1].clone());
            } else {
                out.push(tup[xs].clone());
                out.push(v);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let strings = |ts: &[Term]| ts.iter().map(Term::to_string).collect();
        let side = |m: &BTreeMap<Word, Term>| m.iter().map(|(w, t)| (w.to_string(), t.to_string())).collect();
        let file = FamilyFile {
            big_n: self.big_n,
            zeros: strings(self.zero_one.zeros()),
            ones: strings(self.zero_one.ones()),
            s: strings(&self.s),
            t: strings(&self.t),
            left: side(&self.left),
            right: side(&self.right),
        };
        serde_json::to_string_pretty(&file).expect("family serializes")
    }

    /// Reads the JSON family format; terms are parsed against `sig`.
    pub fn from_json(text: &str, sig: &Signature) -> Result<Self, MalcevError> {
        let file: FamilyFile = serde_json::from_str(text).map_err(|e| MalcevError::Json(e.to_string()))?;
        let terms = |v: &[String]| v.iter().map(|s| parse_term(s, sig)).collect::<Result<Vec<_>, _>>();
        let side = |m: &BTreeMap<String, String>| -> Result<BTreeMap<Word, Term>, MalcevError> {
            m.iter().map(|(w, t)| Ok((w.parse()?, parse_term(t, sig)?))).collect()
        };
        let zero_one = ZeroOneSpec::new(terms(&file.zeros)?, terms(&file.ones)?)?;
        let fam = MalcevFamily::new(file.big_n, zero_one, terms(&file.s)?, terms(&file.t)?, side(&file.left)?, side(&file.right)?)?;
        fam.check(sig)?;
        Ok(fam)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    #[serde(rename = "N")]
    big_n: usize,
    zeros: Vec<String>,
    ones: Vec<String>,
    s: Vec<String>,
    t: Vec<String>,
    #[serde(rename = "L")]
    left: BTreeMap<String, String>,
    #[serde(rename = "R")]
    right: BTreeMap<String, String>,
}

/// A family with every term resolved against one algebra.
pub struct CompiledFamily<'a> {
    algebra: &'a Algebra,
    fam: &'a MalcevFamily,
    s: Vec<CompiledTerm>,
    t: Vec<CompiledTerm>,
    zeros: Vec<Element>,
    ones: Vec<Element>,
    words: Vec<Word>,
    left: Vec<CompiledTerm>,
    right: Vec<CompiledTerm>,
}

impl<'a> CompiledFamily<'a> {
    pub fn new(algebra: &'a Algebra, fam: &'a MalcevFamily) -> Result<Self, MalcevError> {
        let sig = algebra.signature();
        fam.check(sig)?;
        let names = fam.slot_names();
        let compile = |t: &Term| t.compile(sig, &names);
        let (zeros, ones) = fam.zero_one.values(algebra)?;
        let words = fam.words();
        Ok(CompiledFamily {
            algebra,
            fam,
            s: fam.s.iter().map(compile).collect::<Result<_, _>>()?,
            t: fam.t.iter().map(compile).collect::<Result<_, _>>()?,
            zeros,
            ones,
            left: words.iter().map(|w| compile(&fam.left[w])).collect::<Result<_, _>>()?,
            right: words.iter().map(|w| compile(&fam.right[w])).collect::<Result<_, _>>()?,
            words,
        })
    }

    pub fn family(&self) -> &MalcevFamily {
        self.fam
    }

    pub fn zeros(&self) -> &[Element] {
        &self.zeros
    }

    pub fn ones(&self) -> &[Element] {
        &self.ones
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// `sⱼ` (or `tⱼ` when `starred`) at the first `2 + l + 2(j−1)` entries of `prefix`.
    pub fn eval_st(&self, starred: bool, j: usize, prefix: &[Element]) -> Element {
        let c = if starred { &self.t[j - 1] } else { &self.s[j - 1] };
        c.eval(self.algebra, prefix)
    }

    pub fn eval_left(&self, word_index: usize, tup: &[Element]) -> Element {
        self.left[word_index].eval(self.algebra, tup)
    }

    pub fn eval_right(&self, word_index: usize, tup: &[Element]) -> Element {
        self.right[word_index].eval(self.algebra, tup)
    }

    /// The transform applied to a tuple of elements.
    pub fn transform(&self, kind: Transform, tup: &[Element]) -> Result<Vec<Element>, MalcevError> {
        let fam = self.fam;
        if tup.len() != fam.tuple_len() {
            return Err(MalcevError::LengthMismatch { expected: fam.tuple_len(), found: tup.len() });
        }
        if let Some(&v) = tup.iter().find(|&&v| v >= self.algebra.size()) {
            return Err(MalcevError::ElementOutOfRange(v));
        }
        let mut out = Vec::with_capacity(tup.len());
        self.transform_into(kind, tup, &mut out);
        Ok(out)
    }

    pub(crate) fn transform_into(&self, kind: Transform, tup: &[Element], out: &mut Vec<Element>) {
        out.clear();
        out.push(tup[0]);
        out.push(if kind == Transform::Sigma { tup[0] } else { tup[1] });
        out.extend_from_slice(if kind.starred() { &self.ones } else { &self.zeros });
        for j in 1..=self.fam.n() {
            let xs = self.fam.x_slot(j);
            let v = self.eval_st(kind.starred(), j, &out[..xs]);
            if kind.rebuilds_x() {
                out.push(v);
                out.push(tup[xs + 1]);
            } else {
                out.push(tup[xs]);
                out.push(v);
            }
        }
    }
}
