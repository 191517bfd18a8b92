use itertools::Itertools;
use serde::Serialize;

use crate::algebra::Element;
use crate::congruence::DEFAULT_GUARD;
use crate::factorization::{decompose_with_guard, factor_pairs_with_guard, FactorPair};
use crate::fol::{ef_game, is_partial_isomorphism, validate_strategy, GameConfig, Player, Side, StrategyReport};

use super::{build_d, labeled_l, labeled_product, GalleryError, LabeledAlgebra};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub game: GameConfig,
    /// Largest algebra handed to the congruence-lattice routines.
    pub guard: usize,
    /// Also enumerate every partial map of the fixing kind and check it is a partial isomorphism.
    pub enumerate_maps: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { game: GameConfig::default(), guard: DEFAULT_GUARD, enumerate_maps: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameSummary {
    pub rounds: usize,
    pub winner: Player,
    pub positions_explored: u64,
    pub certificate_moves: usize,
    pub certificate_verified: bool,
}

/// Partial maps `Dₙ → L₂×Lₙ` fixing a subset of `(2×3) ∪ P₀` and sending part
/// of `P₁` injectively into `P₁`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapEnumeration {
    pub maps_checked: u64,
    pub failures: u64,
    pub first_failure: Option<Vec<(String, String)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub n: usize,
    pub d_name: String,
    pub d_size: usize,
    pub product_name: String,
    pub product_size: usize,
    /// `|Dₙ|` is prime, so `Dₙ` cannot be a nontrivial product.
    pub d_size_prime: bool,
    /// From the factor-pair search, when `|Dₙ|` is within the guard.
    pub d_indecomposable_by_search: Option<bool>,
    pub d_indecomposable: bool,
    pub shortcut_agrees: bool,
    pub product_decompositions: Vec<(usize, usize)>,
    pub product_decomposable: bool,
    pub game: GameSummary,
    pub strategy: StrategyReport,
    pub maps: Option<MapEnumeration>,
    pub holds: bool,
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// ∃'s strategy: answer an element of `(2×3) ∪ P₀` with the element carrying
/// the same label; answer a `P₁` element with the least unused `P₁` element
/// on the other side.
pub fn label_strategy<'a>(
    d: &'a LabeledAlgebra,
    p: &'a LabeledAlgebra,
) -> impl Fn(&[(Element, Element)], Side, Element) -> Option<Element> + 'a {
    let (d_p1, p_p1) = (d.p1(), p.p1());
    move |pos, side, x| {
        let (from, to, to_p1) = match side {
            Side::A => (d, p, &p_p1),
            Side::B => (p, d, &d_p1),
        };
        let label = from.label(x);
        if label.len() == 2 && label[0] == 1 && label[1] >= 3 {
            let used = |y: &Element| pos.iter().any(|&(a, b)| if side == Side::A { b == *y } else { a == *y });
            to_p1.iter().copied().find(|y| !used(y))
        } else {
            to.index_of(label)
        }
    }
}

fn enumerate_maps(d: &LabeledAlgebra, p: &LabeledAlgebra) -> MapEnumeration {
    let fixed: Vec<Element> = d.core().into_iter().chain(d.p0()).collect();
    let (d_p1, p_p1) = (d.p1(), p.p1());
    // Injective partial maps P₁(Dₙ) ⇀ P₁(L₂×Lₙ).
    let mut tails: Vec<Vec<(Element, Element)>> = Vec::new();
    for k in 0..=d_p1.len().min(p_p1.len()) {
        for dom in d_p1.iter().copied().combinations(k) {
            for img in p_p1.iter().copied().permutations(k) {
                tails.push(dom.iter().copied().zip(img).collect());
            }
        }
    }
    let mut report = MapEnumeration { maps_checked: 0, failures: 0, first_failure: None };
    for subset in fixed.iter().copied().powerset() {
        let head: Vec<(Element, Element)> = subset.iter().map(|&e| (e, p.at(d.label(e)))).collect();
        for tail in &tails {
            let pairs: Vec<(Element, Element)> = head.iter().chain(tail).copied().collect();
            report.maps_checked += 1;
            if !is_partial_isomorphism(&d.algebra, &p.algebra, &pairs) {
                report.failures += 1;
                if report.first_failure.is_none() {
                    report.first_failure = Some(pairs.iter().map(|&(a, b)| (d.label_str(a), p.label_str(b))).collect());
                }
            }
        }
    }
    report
}

/// `Dₙ` against `L₂ × Lₙ`: the first is directly indecomposable, the second
/// is not, yet ∃ wins the `(n−3)`-round game between them.
pub fn counterexample_pipeline(n: usize, config: PipelineConfig) -> Result<PipelineReport, GalleryError> {
    if n < 4 {
        return Err(GalleryError::InvalidParameter(format!("the pipeline needs n ≥ 4, got {n}")));
    }
    let check = |e: &dyn std::fmt::Display| GalleryError::InvalidParameter(e.to_string());
    let d = build_d(n, false)?;
    let p = labeled_product(format!("L2xL{n}"), &[&labeled_l(2, false)?, &labeled_l(n, false)?])?;

    let d_size_prime = is_prime(d.algebra.size());
    let d_indecomposable_by_search = if d.algebra.size() <= config.guard {
        let pairs = factor_pairs_with_guard(&d.algebra, config.guard).map_err(|e| check(&e))?;
        Some(pairs.iter().all(FactorPair::is_trivial))
    } else {
        None
    };
    let shortcut_agrees = !d_size_prime || d_indecomposable_by_search != Some(false);
    let d_indecomposable = d_indecomposable_by_search.unwrap_or(d_size_prime);

    let product_decompositions: Vec<(usize, usize)> = decompose_with_guard(&p.algebra, config.guard)
        .map_err(|e| check(&e))?
        .iter()
        .filter(|r| r.verify(&p.algebra))
        .map(|r| r.quotient_sizes)
        .collect();

    let rounds = n - 3;
    let result = ef_game(&d.algebra, &p.algebra, rounds, config.game).map_err(|e| check(&e))?;
    let game = GameSummary {
        rounds,
        winner: result.winner,
        positions_explored: result.positions_explored,
        certificate_moves: result.certificate.as_ref().map_or(0, |c| c.moves.len()),
        certificate_verified: result.certificate.as_ref().is_some_and(|c| c.verify(&d.algebra, &p.algebra)),
    };
    let strategy = validate_strategy(&d.algebra, &p.algebra, rounds, &label_strategy(&d, &p));
    let maps = config.enumerate_maps.then(|| enumerate_maps(&d, &p));

    let product_decomposable = !product_decompositions.is_empty();
    let holds = d_indecomposable
        && shortcut_agrees
        && product_decomposable
        && game.winner == Player::Exists
        && game.certificate_verified
        && strategy.wins
        && maps.as_ref().is_none_or(|m| m.failures == 0);
    Ok(PipelineReport {
        n,
        d_name: d.name.clone(),
        d_size: d.algebra.size(),
        product_name: p.name.clone(),
        product_size: p.algebra.size(),
        d_size_prime,
        d_indecomposable_by_search,
        d_indecomposable,
        shortcut_agrees,
        product_decompositions,
        product_decomposable,
        game,
        strategy,
        maps,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let p: Vec<usize> = (0..20).filter(|&n| is_prime(n)).collect();
        assert_eq!(p, [2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn n4_one_round() {
        let r = counterexample_pipeline(4, PipelineConfig::default()).unwrap();
        assert_eq!(r.d_size, 9);
        assert!(!r.d_size_prime);
        assert_eq!(r.d_indecomposable_by_search, Some(true));
        assert_eq!(r.game.rounds, 1);
        assert_eq!(r.game.winner, Player::Exists);
        assert!(r.product_decompositions.contains(&(2, 4)) || r.product_decompositions.contains(&(4, 2)));
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn n5_enumerates_all_fixing_maps() {
        let r = counterexample_pipeline(5, PipelineConfig::default()).unwrap();
        let m = r.maps.unwrap();
        assert_eq!(m.maps_checked, 256 * 13);
        assert_eq!(m.failures, 0);
        assert!(r.d_size_prime && r.shortcut_agrees);
        assert!(r.strategy.wins);
    }

    #[test]
    fn rejects_small_n() {
        assert!(counterexample_pipeline(3, PipelineConfig::default()).is_err());
    }
}
