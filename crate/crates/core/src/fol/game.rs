use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{decode_tuple, tuple_count, Algebra, Element};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Player {
    Exists,
    Forall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameConfig {
    /// Maximum number of positions the solver may expand.
    pub budget: u64,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig { budget: 100_000_000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("game search exceeded the budget of {0} positions")]
    BudgetExceeded(u64),
    #[error("the algebras have different signatures")]
    SignatureMismatch,
}

type Pairs = Vec<(Element, Element)>;

/// One entry of ∃'s strategy: in `position`, ∀ plays `challenge`, ∃ answers `response`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Move {
    pub position: Pairs,
    pub challenge: (Side, Element),
    pub response: Element,
}

/// A winning strategy for ∃, restricted to positions reachable under it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub rounds: usize,
    pub moves: Vec<Move>,
}

impl Certificate {
    /// Replays every ∀ line of play against the recorded answers.
    pub fn verify(&self, a: &Algebra, b: &Algebra) -> bool {
        let table: HashMap<(&[(Element, Element)], Side, Element), Element> =
            self.moves.iter().map(|m| ((m.position.as_slice(), m.challenge.0, m.challenge.1), m.response)).collect();
        let strategy = |pos: &[(Element, Element)], side: Side, x: Element| table.get(&(pos, side, x)).copied();
        validate_strategy(a, b, self.rounds, &strategy).wins
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameResult {
    pub winner: Player,
    pub rounds: usize,
    pub certificate: Option<Certificate>,
    /// A first move for ∀ that ∃ cannot answer, when ∀ wins.
    pub forall_opening: Option<(Side, Element)>,
    pub positions_explored: u64,
}

/// Whether `pairs` is an injective partial map preserving the operation graphs:
/// for every `f` and `a⃗, b` in the domain, `f(a⃗) = b ⟺ f(h a⃗) = h(b)`.
pub fn is_partial_isomorphism(a: &Algebra, b: &Algebra, pairs: &[(Element, Element)]) -> bool {
    let mut fwd = vec![None; a.size()];
    let mut back = vec![None; b.size()];
    for &(x, y) in pairs {
        if x >= a.size() || y >= b.size() {
            return false;
        }
        match (fwd[x], back[y]) {
            (None, None) => {
                fwd[x] = Some(y);
                back[y] = Some(x);
            }
            (Some(y0), Some(x0)) if y0 == y && x0 == x => {}
            _ => return false,
        }
    }
    let dom: Vec<(Element, Element)> = {
        let mut d: Vec<_> = fwd.iter().enumerate().filter_map(|(x, y)| y.map(|y| (x, y))).collect();
        d.sort_unstable();
        d
    };
    graphs_agree(a, b, &dom, &fwd, &back, None)
}

/// The operation-graph condition. With `fresh = Some(i)`, only tuples that
/// involve pair `i` (as an argument or as the value) are examined.
fn graphs_agree(
    a: &Algebra,
    b: &Algebra,
    dom: &[(Element, Element)],
    fwd: &[Option<Element>],
    back: &[Option<Element>],
    fresh: Option<usize>,
) -> bool {
    let d = dom.len();
    let mut idx = [0usize; crate::algebra::MAX_ARITY];
    let mut xa = [0; crate::algebra::MAX_ARITY];
    let mut xb = [0; crate::algebra::MAX_ARITY];
    for op in 0..a.signature().len() {
        let m = a.signature().arity(op);
        let Some(count) = tuple_count(d, m) else { return false };
        for t in 0..count {
            decode_tuple(t, d, &mut idx[..m]);
            for j in 0..m {
                xa[j] = dom[idx[j]].0;
                xb[j] = dom[idx[j]].1;
            }
            let r = a.apply(op, &xa[..m]);
            let s = b.apply(op, &xb[..m]);
            if let Some(i) = fresh {
                let (fx, fy) = dom[i];
                if !idx[..m].contains(&i) && r != fx && s != fy {
                    continue;
                }
            }
            let ok = match fwd[r] {
                Some(img) => img == s,
                None => back[s].is_none(),
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// The constant interpretations, paired by symbol.
fn constant_pairs(a: &Algebra, b: &Algebra) -> Pairs {
    let mut pairs: Pairs = a.signature().constants().map(|op| (a.apply(op, &[]), b.apply(op, &[]))).collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn extend(pos: &[(Element, Element)], x: Element, y: Element) -> Pairs {
    let mut next = pos.to_vec();
    let at = next.partition_point(|p| *p < (x, y));
    next.insert(at, (x, y));
    next
}

struct Solver<'a> {
    a: &'a Algebra,
    b: &'a Algebra,
    memo: HashMap<(Pairs, usize), bool>,
    explored: u64,
    budget: u64,
    fwd: Vec<Option<Element>>,
    back: Vec<Option<Element>>,
}

impl<'a> Solver<'a> {
    /// Whether `pos` plus `(x, y)` is still a partial isomorphism; `pos` already is one.
    fn legal(&mut self, pos: &[(Element, Element)], x: Element, y: Element) -> bool {
        if pos.iter().any(|&(p, q)| p == x || q == y) {
            return false;
        }
        let next = extend(pos, x, y);
        for &(p, q) in &next {
            self.fwd[p] = Some(q);
            self.back[q] = Some(p);
        }
        let fresh = next.iter().position(|&p| p == (x, y));
        let ok = graphs_agree(self.a, self.b, &next, &self.fwd, &self.back, fresh);
        for &(p, q) in &next {
            self.fwd[p] = None;
            self.back[q] = None;
        }
        ok
    }

    fn challenges(&self, pos: &[(Element, Element)]) -> Vec<(Side, Element)> {
        let a = self.a.elements().filter(|&x| !pos.iter().any(|p| p.0 == x)).map(|x| (Side::A, x));
        let b = self.b.elements().filter(|&y| !pos.iter().any(|p| p.1 == y)).map(|y| (Side::B, y));
        a.chain(b).collect()
    }

    fn responses(&self, side: Side) -> std::ops::Range<Element> {
        match side {
            Side::A => self.b.elements(),
            Side::B => self.a.elements(),
        }
    }

    /// ∃'s winning answer to `challenge`, if any.
    fn answer(&mut self, pos: &[(Element, Element)], challenge: (Side, Element), rounds: usize) -> Result<Option<Element>, GameError> {
        let (side, c) = challenge;
        for r in self.responses(side) {
            let (x, y) = match side {
                Side::A => (c, r),
                Side::B => (r, c),
            };
            if self.legal(pos, x, y) && self.wins(&extend(pos, x, y), rounds - 1)? {
                return Ok(Some(r));
            }
        }
        Ok(None)
    }

    /// Whether ∃ wins from `pos` (a partial isomorphism) with `rounds` left.
    fn wins(&mut self, pos: &[(Element, Element)], rounds: usize) -> Result<bool, GameError> {
        if rounds == 0 {
            return Ok(true);
        }
        if let Some(&w) = self.memo.get(&(pos.to_vec(), rounds)) {
            return Ok(w);
        }
        self.explored += 1;
        if self.explored > self.budget {
            return Err(GameError::BudgetExceeded(self.budget));
        }
        let mut result = true;
        for ch in self.challenges(pos) {
            if self.answer(pos, ch, rounds)?.is_none() {
                result = false;
                break;
            }
        }
        self.memo.insert((pos.to_vec(), rounds), result);
        Ok(result)
    }

    fn certificate(&mut self, pos: &[(Element, Element)], rounds: usize, out: &mut Vec<Move>, seen: &mut HashSet<(Pairs, usize)>) -> Result<(), GameError> {
        if rounds == 0 || !seen.insert((pos.to_vec(), rounds)) {
            return Ok(());
        }
        for ch in self.challenges(pos) {
            let r = self.answer(pos, ch, rounds)?.expect("position is winning for ∃");
            out.push(Move { position: pos.to_vec(), challenge: ch, response: r });
            let next = match ch.0 {
                Side::A => extend(pos, ch.1, r),
                Side::B => extend(pos, r, ch.1),
            };
            self.certificate(&next, rounds - 1, out, seen)?;
        }
        Ok(())
    }
}

/// Solves the `rounds`-round Ehrenfeucht–Fraïssé game on `(A, B)`.
///
/// Constants are paired before play starts. ∀ never repeats an element
/// already in play (doing so cannot help him), and ∃ must keep the map injective.
pub fn ef_game(a: &Algebra, b: &Algebra, rounds: usize, config: GameConfig) -> Result<GameResult, GameError> {
    if !a.same_signature(b) {
        return Err(GameError::SignatureMismatch);
    }
    let start = constant_pairs(a, b);
    if !is_partial_isomorphism(a, b, &start) {
        return Ok(GameResult { winner: Player::Forall, rounds, certificate: None, forall_opening: None, positions_explored: 0 });
    }
    let mut solver = Solver {
        a,
        b,
        memo: HashMap::new(),
        explored: 0,
        budget: config.budget,
        fwd: vec![None; a.size()],
        back: vec![None; b.size()],
    };
    if solver.wins(&start, rounds)? {
        let mut moves = Vec::new();
        solver.certificate(&start, rounds, &mut moves, &mut HashSet::new())?;
        Ok(GameResult {
            winner: Player::Exists,
            rounds,
            certificate: Some(Certificate { rounds, moves }),
            forall_opening: None,
            positions_explored: solver.explored,
        })
    } else {
        let mut opening = None;
        for ch in solver.challenges(&start) {
            if solver.answer(&start, ch, rounds)?.is_none() {
                opening = Some(ch);
                break;
            }
        }
        Ok(GameResult { winner: Player::Forall, rounds, certificate: None, forall_opening: opening, positions_explored: solver.explored })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyFailure {
    pub position: Pairs,
    pub challenge: (Side, Element),
    pub response: Option<Element>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyReport {
    pub wins: bool,
    pub positions_checked: u64,
    pub failure: Option<StrategyFailure>,
}

/// Plays `strategy` for ∃ against every line of ∀ play of length `rounds`.
///
/// The strategy sees the current position (sorted pairs, constants
/// included), the side ∀ played on and his element, and returns its answer
/// on the other side.
pub fn validate_strategy(
    a: &Algebra,
    b: &Algebra,
    rounds: usize,
    strategy: &dyn Fn(&[(Element, Element)], Side, Element) -> Option<Element>,
) -> StrategyReport {
    let start = constant_pairs(a, b);
    let mut report = StrategyReport { wins: true, positions_checked: 0, failure: None };
    if !a.same_signature(b) || !is_partial_isomorphism(a, b, &start) {
        report.wins = false;
        report.failure = Some(StrategyFailure {
            position: start,
            challenge: (Side::A, 0),
            response: None,
            reason: "the constants do not form a partial isomorphism".into(),
        });
        return report;
    }
    let mut solver = Solver {
        a,
        b,
        memo: HashMap::new(),
        explored: 0,
        budget: u64::MAX,
        fwd: vec![None; a.size()],
        back: vec![None; b.size()],
    };
    let mut seen = HashSet::new();
    let mut stack = vec![(start, rounds)];
    while let Some((pos, left)) = stack.pop() {
        if left == 0 || !seen.insert((pos.clone(), left)) {
            continue;
        }
        report.positions_checked += 1;
        for ch in solver.challenges(&pos) {
            let response = strategy(&pos, ch.0, ch.1);
            let fail = |reason: &str| StrategyFailure { position: pos.clone(), challenge: ch, response, reason: reason.into() };
            let Some(r) = response else {
                report.wins = false;
                report.failure = Some(fail("no answer"));
                return report;
            };
            let (x, y) = match ch.0 {
                Side::A => (ch.1, r),
                Side::B => (r, ch.1),
            };
            if x >= a.size() || y >= b.size() {
                report.wins = false;
                report.failure = Some(fail("answer is not an element"));
                return report;
            }
            if !solver.legal(&pos, x, y) {
                report.wins = false;
                report.failure = Some(fail("the extended map is not a partial isomorphism"));
                return report;
            }
            stack.push((extend(&pos, x, y), left - 1));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{build_d, build_l, labeled_l, labeled_product};

    #[test]
    fn partial_isomorphism_basics() {
        let l3 = build_l(3, false).unwrap();
        assert!(is_partial_isomorphism(&l3, &l3, &[(0, 0), (1, 1), (2, 2)]));
        assert!(!is_partial_isomorphism(&l3, &l3, &[(0, 1)]));
        assert!(!is_partial_isomorphism(&l3, &l3, &[(2, 2), (2, 1)]));
        assert!(is_partial_isomorphism(&l3, &l3, &[]));
    }

    #[test]
    fn mirror_wins() {
        let l4 = build_l(4, false).unwrap();
        let r = ef_game(&l4, &l4, 2, GameConfig::default()).unwrap();
        assert_eq!(r.winner, Player::Exists);
        assert!(r.certificate.unwrap().verify(&l4, &l4));
        let mirror = |_: &[(Element, Element)], _: Side, x: Element| Some(x);
        assert!(validate_strategy(&l4, &l4, 3, &mirror).wins);
    }

    #[test]
    fn forall_separates_l2_from_l3() {
        let (l2, l3) = (build_l(2, false).unwrap(), build_l(3, false).unwrap());
        for k in 1..=3 {
            let r = ef_game(&l2, &l3, k, GameConfig::default()).unwrap();
            assert_eq!(r.winner, Player::Forall);
            assert!(r.forall_opening.is_some());
        }
    }

    #[test]
    fn d4_two_rounds_short() {
        let d4 = build_d(4, false).unwrap();
        let l2 = labeled_l(2, false).unwrap();
        let l4 = labeled_l(4, false).unwrap();
        let p = labeled_product("L2xL4".into(), &[&l2, &l4]).unwrap();
        let r = ef_game(&d4.algebra, &p.algebra, 1, GameConfig::default()).unwrap();
        assert_eq!(r.winner, Player::Exists);
        assert!(r.certificate.unwrap().verify(&d4.algebra, &p.algebra));
        assert!(matches!(ef_game(&d4.algebra, &p.algebra, 3, GameConfig { budget: 1 }), Err(GameError::BudgetExceeded(1))));
    }

    #[test]
    fn bad_strategy_is_reported() {
        let l4 = build_l(4, false).unwrap();
        let constant = |_: &[(Element, Element)], _: Side, _: Element| Some(2);
        let r = validate_strategy(&l4, &l4, 1, &constant);
        assert!(!r.wins);
        assert!(r.failure.is_some());
    }
}
