use serde::Serialize;

use crate::algebra::{check_homomorphism, ElementMap, Term, ZeroOneSpec};
use crate::congruence::{generated_congruence, Congruence};
use crate::fol::{build_semilattice_phi, EvalConfig, Evaluator};
use crate::malcev::{UChain, UChainReport, ValidatedUChain};

use super::{catalog, figure_l, labeled_l, labeled_product, GalleryError, LabeledAlgebra, JOIN};

/// The chain `x+z, x*z, y*z, y+z, y`, validated on every ∨-gallery algebra of at most 6 elements.
pub fn standard_u_chain() -> Result<ValidatedUChain, UChainReport> {
    let v = Term::var;
    let terms = vec![
        Term::binary("+", v("x"), v("z")),
        Term::binary("*", v("x"), v("z")),
        Term::binary("*", v("y"), v("z")),
        Term::binary("+", v("y"), v("z")),
        v("y"),
    ];
    let chain = UChain::new(ZeroOneSpec::standard(), terms).expect("five terms over x, y, z");
    let built: Vec<LabeledAlgebra> = catalog(6, true).iter().map(|s| s.build().expect("catalog members build")).collect();
    let named: Vec<(&str, &crate::algebra::Algebra)> = built.iter().map(|b| (b.name.as_str(), &b.algebra)).collect();
    chain.validate(&named)
}

/// `F : L₄^∨ × L₂^∨ → L`, the identity on labels except `(3,1) ↦ (4,1)`.
pub fn figure_iso_map() -> Result<(LabeledAlgebra, LabeledAlgebra, ElementMap), GalleryError> {
    let src = labeled_product("L4vxL2v".into(), &[&labeled_l(4, true)?, &labeled_l(2, true)?])?;
    let dst = figure_l()?;
    let images = src
        .labels
        .iter()
        .map(|l| if l == &[3, 1] { dst.index_of(&[4, 1]) } else { dst.index_of(l) })
        .collect();
    let map = ElementMap::new(images, dst.algebra.size()).map_err(|e| GalleryError::InvalidParameter(e.to_string()))?;
    Ok((src, dst, map))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransportStep {
    pub algebra: String,
    pub x: String,
    pub y: String,
    pub z: String,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FigureReport {
    pub f_is_isomorphism: bool,
    pub theta_blocks: Vec<Vec<String>>,
    pub theta_below_kernel: bool,
    pub theta_differs_from_kernel: bool,
    /// `Φ` built from the standard u-chain, evaluated at `(x, y, z)` along the transport.
    pub transport: Vec<TransportStep>,
    pub transport_as_expected: bool,
    pub holds: bool,
}

fn phi_at(alg: &LabeledAlgebra, phi: &crate::fol::Formula, x: &[usize], y: &[usize], z: &[usize]) -> Result<TransportStep, GalleryError> {
    let check = |e: crate::fol::EvalError| GalleryError::InvalidParameter(e.to_string());
    let mut ev = Evaluator::new(&alg.algebra, phi, &["x", "y", "z"], EvalConfig::default()).map_err(check)?;
    let value = ev.eval(&[alg.at(x), alg.at(y), alg.at(z)]).map_err(check)?;
    let show = |l: &[usize]| format!("({},{})", l[0], l[1]);
    Ok(TransportStep { algebra: alg.name.clone(), x: show(x), y: show(y), z: show(z), value })
}

/// The checks around the semilattice picture of `L₅ × L₂`: the isomorphism
/// `F`, the congruence `θ = Cg((0,0),(0,1)) ∨ Cg((1,0),(1,1))` against `ker π₁`,
/// and the transport of one `Φ` instance from `L₄×L₂` through `L` to `L₅×L₂`.
pub fn figure_checks() -> Result<FigureReport, GalleryError> {
    let (src, dst, f) = figure_iso_map()?;
    let f_is_isomorphism = f.is_bijective() && check_homomorphism(&src.algebra, &dst.algebra, &f, true);

    let big = labeled_product("L5vxL2v".into(), &[&labeled_l(5, true)?, &labeled_l(2, true)?])?;
    let theta = generated_congruence(&big.algebra, &[(big.at(&[0, 0]), big.at(&[0, 1])), (big.at(&[1, 0]), big.at(&[1, 1]))]);
    let kernel = Congruence::from_labels(&big.labels.iter().map(|l| l[0]).collect::<Vec<_>>());
    let theta_blocks = theta.blocks().iter().map(|b| b.iter().map(|&e| big.label_str(e)).collect()).collect();

    let chain = standard_u_chain().map_err(|r| GalleryError::InvalidParameter(format!("u-chain fails: {:?}", r.violations.first())))?;
    let phi = build_semilattice_phi(&chain, JOIN);
    let transport = vec![
        phi_at(&src, &phi, &[3, 0], &[3, 1], &[0, 1])?,
        phi_at(&dst, &phi, &[3, 0], &[4, 1], &[0, 1])?,
        phi_at(&big, &phi, &[3, 0], &[4, 1], &[0, 1])?,
    ];
    let transport_as_expected = transport.iter().map(|s| s.value).eq([true, true, false]);
    let theta_below_kernel = theta.leq(&kernel);
    let theta_differs_from_kernel = theta != kernel;
    Ok(FigureReport {
        f_is_isomorphism,
        theta_blocks,
        theta_below_kernel,
        theta_differs_from_kernel,
        holds: f_is_isomorphism && theta_below_kernel && theta_differs_from_kernel && transport_as_expected,
        transport,
        transport_as_expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_report() {
        let r = figure_checks().unwrap();
        assert!(r.f_is_isomorphism);
        assert!(r.theta_below_kernel && r.theta_differs_from_kernel);
        assert_eq!(r.transport.iter().map(|s| s.value).collect::<Vec<_>>(), [true, true, false]);
        assert!(r.holds);
        let blocks: Vec<Vec<&str>> = r.theta_blocks.iter().map(|b| b.iter().map(String::as_str).collect()).collect();
        assert_eq!(
            blocks,
            [vec!["(0,0)", "(0,1)"], vec!["(1,0)", "(1,1)"], vec!["(2,0)", "(2,1)"], vec!["(3,0)"], vec!["(3,1)"], vec!["(4,0)"], vec!["(4,1)"]]
        );
    }

    #[test]
    fn standard_chain_covers_catalog() {
        let c = standard_u_chain().unwrap();
        assert_eq!(c.chain().k(), 5);
        assert_eq!(c.algebras().len(), 8);
    }
}
