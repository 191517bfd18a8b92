//! The example algebras: the chains `Lₙ`, the subalgebras `Dₙ` of `L₂ × Lₙ₊₁`,
//! their products, the ∨-expansions, and the eight-element subalgebra `L` of
//! `L₅^∨ × L₂^∨`.
//!
//! Signature of the base variety: `+`, `*` (binary), `0`, `1` (constants).
//! The expansion adds a binary `∨`, the join for the order `0 > 1 > 2 > …`.

mod figures;
mod pipeline;

pub use figures::{figure_checks, figure_iso_map, standard_u_chain, FigureReport, TransportStep};
pub use pipeline::{counterexample_pipeline, label_strategy, GameSummary, MapEnumeration, PipelineConfig, PipelineReport};

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use thiserror::Error;

use crate::algebra::{direct_product, induced_subalgebra, Algebra, AlgebraError, Element, Signature};

pub const JOIN: &str = "∨";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GalleryError {
    #[error("{0}")]
    InvalidParameter(String),
    #[error("cannot read gallery name `{0}`")]
    BadName(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub fn base_signature() -> Signature {
    Signature::from_pairs(&[("+", 2), ("*", 2), ("0", 0), ("1", 0)]).expect("valid")
}

pub fn join_signature() -> Signature {
    Signature::from_pairs(&[("+", 2), ("*", 2), ("0", 0), ("1", 0), (JOIN, 2)]).expect("valid")
}

fn plus(x: usize, y: usize) -> usize {
    match (x, y) {
        (x, 0) => x,
        (0, 1) => 0,
        (1, 1) => 1,
        _ => 2,
    }
}

fn times(x: usize, y: usize) -> usize {
    match (x, y) {
        (_, 0) => 0,
        (0, 1) => 0,
        (1, 1) => 1,
        _ => 2,
    }
}

/// `Lₙ` on `{0,…,n−1}`, optionally with `∨` = min of indices (0 is the top).
pub fn build_l(n: usize, with_join: bool) -> Result<Algebra, GalleryError> {
    if n < 2 {
        return Err(GalleryError::InvalidParameter(format!("L_n needs n ≥ 2, got {n}")));
    }
    let sig = if with_join { join_signature() } else { base_signature() };
    Ok(Algebra::from_fn(sig, n, |op, a| match op {
        0 => plus(a[0], a[1]),
        1 => times(a[0], a[1]),
        2 => 0,
        3 => 1,
        _ => a[0].min(a[1]),
    })?)
}

/// An algebra whose elements carry coordinate labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledAlgebra {
    pub name: String,
    pub algebra: Algebra,
    pub labels: Vec<Vec<usize>>,
}

impl LabeledAlgebra {
    pub fn index_of(&self, label: &[usize]) -> Option<Element> {
        self.labels.iter().position(|l| l == label)
    }

    /// Index of a labelled element; panics on an unknown label.
    pub fn at(&self, label: &[usize]) -> Element {
        self.index_of(label).unwrap_or_else(|| panic!("{} has no element {label:?}", self.name))
    }

    pub fn label(&self, e: Element) -> &[usize] {
        &self.labels[e]
    }

    pub fn label_str(&self, e: Element) -> String {
        let l = &self.labels[e];
        if l.len() == 1 {
            l[0].to_string()
        } else {
            format!("({})", l.iter().join(","))
        }
    }

    /// Elements labelled `(i, j)` with `j ≥ 3`.
    fn tail(&self, i: usize) -> Vec<Element> {
        (0..self.labels.len()).filter(|&e| self.labels[e].len() == 2 && self.labels[e][0] == i && self.labels[e][1] >= 3).collect()
    }

    /// `P₀ = {(0,j) : j ≥ 3}`.
    pub fn p0(&self) -> Vec<Element> {
        self.tail(0)
    }

    /// `P₁ = {(1,j) : j ≥ 3}`.
    pub fn p1(&self) -> Vec<Element> {
        self.tail(1)
    }

    /// `2 × 3 = {(i,j) : i < 2, j < 3}`.
    pub fn core(&self) -> Vec<Element> {
        (0..self.labels.len()).filter(|&e| self.labels[e].len() == 2 && self.labels[e][0] < 2 && self.labels[e][1] < 3).collect()
    }
}

pub fn labeled_l(n: usize, with_join: bool) -> Result<LabeledAlgebra, GalleryError> {
    Ok(LabeledAlgebra {
        name: GallerySpec::L { n, join: with_join }.to_string(),
        algebra: build_l(n, with_join)?,
        labels: (0..n).map(|j| vec![j]).collect(),
    })
}

/// Product with concatenated labels.
pub fn labeled_product(name: String, factors: &[&LabeledAlgebra]) -> Result<LabeledAlgebra, GalleryError> {
    let algebras: Vec<&Algebra> = factors.iter().map(|f| &f.algebra).collect();
    let p = direct_product(&algebras)?;
    let labels = p
        .algebra()
        .elements()
        .map(|e| p.decode(e).iter().enumerate().flat_map(|(i, &c)| factors[i].labels[c].clone()).collect())
        .collect();
    Ok(LabeledAlgebra { name, algebra: p.into_algebra(), labels })
}

/// Removes `drop` (given by labels) and returns the induced subalgebra.
fn labeled_subalgebra(name: String, parent: &LabeledAlgebra, keep: impl Fn(&[usize]) -> bool) -> Result<LabeledAlgebra, GalleryError> {
    let subset = parent.algebra.elements().filter(|&e| keep(&parent.labels[e])).collect();
    let (algebra, embedding) = induced_subalgebra(&parent.algebra, &subset)?;
    let labels = embedding.iter().map(|&e| parent.labels[e].clone()).collect();
    Ok(LabeledAlgebra { name, algebra, labels })
}

/// `Dₙ`: the subalgebra of `L₂ × Lₙ₊₁` on `(2 × n) ∪ {(1,n)}`, 2n+1 elements.
pub fn build_d(n: usize, with_join: bool) -> Result<LabeledAlgebra, GalleryError> {
    if n < 3 {
        return Err(GalleryError::InvalidParameter(format!("D_n needs n ≥ 3, got {n}")));
    }
    let l2 = labeled_l(2, with_join)?;
    let big = labeled_l(n + 1, with_join)?;
    let ambient = labeled_product(String::new(), &[&l2, &big])?;
    let name = GallerySpec::D { n, join: with_join }.to_string();
    let d = labeled_subalgebra(name, &ambient, |l| l[1] < n || (l[0] == 1 && l[1] == n))
        .map_err(|e| GalleryError::InvalidParameter(format!("D_{n} is not closed: {e}")))?;
    debug_assert_eq!(d.algebra.size(), 2 * n + 1);
    Ok(d)
}

/// The subalgebra `L = (L₅^∨ × L₂^∨) ∖ {(3,1),(4,0)}`.
pub fn figure_l() -> Result<LabeledAlgebra, GalleryError> {
    let ambient = labeled_product("L5vxL2v".into(), &[&labeled_l(5, true)?, &labeled_l(2, true)?])?;
    labeled_subalgebra(GallerySpec::FigureL.to_string(), &ambient, |l| l != [3, 1] && l != [4, 0])
}

/// A gallery member, named as on the command line: `L5`, `L5v`, `D4`,
/// `L2xL5`, `L2vxL5v`, `Lfig`, `T`, `Tv`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GallerySpec {
    L { n: usize, join: bool },
    D { n: usize, join: bool },
    Product(Vec<GallerySpec>),
    FigureL,
    Trivial { join: bool },
}

impl GallerySpec {
    pub fn has_join(&self) -> bool {
        match self {
            GallerySpec::L { join, .. } | GallerySpec::D { join, .. } | GallerySpec::Trivial { join } => *join,
            GallerySpec::Product(fs) => fs.first().is_some_and(GallerySpec::has_join),
            GallerySpec::FigureL => true,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            GallerySpec::L { n, .. } => *n,
            GallerySpec::D { n, .. } => 2 * n + 1,
            GallerySpec::Product(fs) => fs.iter().map(GallerySpec::size).product(),
            GallerySpec::FigureL => 8,
            GallerySpec::Trivial { .. } => 1,
        }
    }

    pub fn build(&self) -> Result<LabeledAlgebra, GalleryError> {
        match self {
            GallerySpec::L { n, join } => labeled_l(*n, *join),
            GallerySpec::D { n, join } => build_d(*n, *join),
            GallerySpec::FigureL => figure_l(),
            GallerySpec::Trivial { join } => Ok(LabeledAlgebra {
                name: self.to_string(),
                algebra: Algebra::trivial(if *join { join_signature() } else { base_signature() }),
                labels: vec![vec![0]],
            }),
            GallerySpec::Product(fs) => {
                if fs.is_empty() {
                    return Err(GalleryError::InvalidParameter("empty product".into()));
                }
                let built = fs.iter().map(GallerySpec::build).collect::<Result<Vec<_>, _>>()?;
                let refs: Vec<&LabeledAlgebra> = built.iter().collect();
                labeled_product(self.to_string(), &refs)
            }
        }
    }
}

impl fmt::Display for GallerySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |join: bool| if join { "v" } else { "" };
        match self {
            GallerySpec::L { n, join } => write!(f, "L{n}{}", v(*join)),
            GallerySpec::D { n, join } => write!(f, "D{n}{}", v(*join)),
            GallerySpec::FigureL => f.write_str("Lfig"),
            GallerySpec::Trivial { join } => write!(f, "T{}", v(*join)),
            GallerySpec::Product(fs) => write!(f, "{}", fs.iter().join("x")),
        }
    }
}

impl FromStr for GallerySpec {
    type Err = GalleryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GalleryError::BadName(s.to_string());
        let parts: Vec<&str> = s.split('x').collect();
        if parts.len() > 1 {
            let fs = parts.iter().map(|p| p.parse()).collect::<Result<Vec<GallerySpec>, _>>()?;
            if fs.iter().any(|f| f.has_join() != fs[0].has_join()) {
                return Err(GalleryError::InvalidParameter(format!("`{s}` mixes signatures")));
            }
            return Ok(GallerySpec::Product(fs));
        }
        match s {
            "Lfig" => return Ok(GallerySpec::FigureL),
            "T" => return Ok(GallerySpec::Trivial { join: false }),
            "Tv" => return Ok(GallerySpec::Trivial { join: true }),
            _ => {}
        }
        let (body, join) = match s.strip_suffix('v') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let mut chars = body.chars();
        let family = chars.next().ok_or_else(bad)?;
        let n: usize = chars.as_str().parse().map_err(|_| bad())?;
        match family {
            'L' if n >= 2 => Ok(GallerySpec::L { n, join }),
            'D' if n >= 3 => Ok(GallerySpec::D { n, join }),
            'L' | 'D' => Err(GalleryError::InvalidParameter(format!("`{s}`: parameter too small"))),
            _ => Err(bad()),
        }
    }
}

/// Gallery members of at most `max_size` elements over one signature.
pub fn catalog(max_size: usize, join: bool) -> Vec<GallerySpec> {
    let l = |n| GallerySpec::L { n, join };
    let mut out = vec![GallerySpec::Trivial { join }];
    out.extend((2..=max_size).map(l));
    out.extend((3..).map(|n| GallerySpec::D { n, join }).take_while(|d| d.size() <= max_size));
    for a in 2..=max_size {
        for b in a..=max_size / a {
            out.push(GallerySpec::Product(vec![l(a), l(b)]));
        }
    }
    if max_size >= 8 {
        out.push(GallerySpec::Product(vec![l(2), l(2), l(2)]));
        if join {
            out.push(GallerySpec::FigureL);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{is_subuniverse, parse_term};

    fn eval(a: &Algebra, t: &str, x: usize, y: usize) -> usize {
        let t = parse_term(t, a.signature()).unwrap();
        let env = [("x".to_string(), x), ("y".to_string(), y)].into();
        crate::algebra::eval_term(a, &t, &env).unwrap()
    }

    #[test]
    fn l_tables() {
        let l2 = build_l(2, false).unwrap();
        assert_eq!(l2.table(0), &[0, 0, 1, 1]);
        let l5 = build_l(5, false).unwrap();
        assert_eq!(eval(&l5, "+(x,y)", 3, 1), 2);
        assert_eq!(eval(&l5, "+(x,y)", 4, 0), 4);
        assert_eq!(eval(&l5, "*(x,y)", 3, 4), 2);
        let l5v = build_l(5, true).unwrap();
        assert_eq!(eval(&l5v, "∨(x,y)", 3, 4), 3);
        assert_eq!(eval(&l5v, "∨(0,1)", 0, 0), 0);
        assert!(build_l(1, false).is_err());
    }

    #[test]
    fn l_m_is_a_subalgebra_of_l_n() {
        for n in 2..=7 {
            let big = build_l(n, true).unwrap();
            for m in 2..=n {
                let set = (0..m).collect();
                let (sub, _) = induced_subalgebra(&big, &set).unwrap();
                assert_eq!(sub, build_l(m, true).unwrap());
            }
        }
    }

    #[test]
    fn d_n_shape() {
        let d5 = build_d(5, false).unwrap();
        assert_eq!(d5.algebra.size(), 11);
        let sum = d5.algebra.apply(0, &[d5.at(&[1, 5]), d5.at(&[1, 1])]);
        assert_eq!(d5.label(sum), &[1, 2]);
        assert_eq!(d5.algebra.constant("0"), Some(d5.at(&[0, 0])));
        assert_eq!(d5.algebra.constant("1"), Some(d5.at(&[1, 1])));
        assert_eq!(d5.p0().len(), 2);
        assert_eq!(d5.p1().len(), 3);
        assert_eq!(d5.core().len(), 6);
    }

    #[test]
    fn d_n_inside_product_is_closed() {
        let p = GallerySpec::Product(vec![GallerySpec::L { n: 2, join: false }, GallerySpec::L { n: 5, join: false }])
            .build()
            .unwrap();
        let set = p.algebra.elements().filter(|&e| p.labels[e][1] < 4 || p.labels[e] == [1, 4]).collect();
        assert!(is_subuniverse(&p.algebra, &set));
    }

    #[test]
    fn figure_subalgebra() {
        assert_eq!(figure_l().unwrap().algebra.size(), 8);
    }

    #[test]
    fn names_round_trip() {
        for name in ["L5", "L5v", "D4", "D3v", "L2xL5", "L2vxL5v", "Lfig", "T", "Tv", "L2xL2xL2"] {
            let spec: GallerySpec = name.parse().unwrap();
            assert_eq!(spec.to_string(), name);
            assert_eq!(spec.build().unwrap().algebra.size(), spec.size());
        }
        assert!("L1".parse::<GallerySpec>().is_err());
        assert!("L2xL3v".parse::<GallerySpec>().is_err());
        assert!("Q4".parse::<GallerySpec>().is_err());
    }

    #[test]
    fn catalog_respects_size() {
        let c = catalog(12, false);
        assert!(c.iter().all(|s| s.size() <= 12));
        assert!(c.contains(&"D5".parse().unwrap()));
        assert!(c.contains(&"L3xL4".parse().unwrap()));
        assert!(catalog(8, true).contains(&GallerySpec::FigureL));
    }
}
