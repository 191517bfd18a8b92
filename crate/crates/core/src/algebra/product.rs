use super::{Algebra, AlgebraError, Element, ElementMap, MAX_ARITY};

/// A direct product together with its coordinate encoding.
///
/// Element `(a_0, …, a_{r-1})` is stored at index `((a_0·|A_1| + a_1)·|A_2| + …)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectProduct {
    algebra: Algebra,
    factor_sizes: Vec<usize>,
}

impl DirectProduct {
    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn into_algebra(self) -> Algebra {
        self.algebra
    }

    pub fn factor_sizes(&self) -> &[usize] {
        &self.factor_sizes
    }

    pub fn encode(&self, coords: &[Element]) -> Element {
        debug_assert_eq!(coords.len(), self.factor_sizes.len());
        coords.iter().zip(&self.factor_sizes).fold(0, |acc, (&c, &s)| acc * s + c)
    }

    pub fn decode(&self, e: Element) -> Vec<Element> {
        decode_coords(e, &self.factor_sizes)
    }

    /// The canonical projection onto factor `i`, as a total map.
    pub fn projection(&self, i: usize) -> ElementMap {
        let images = self.algebra.elements().map(|e| Some(self.decode(e)[i])).collect();
        ElementMap::new(images, self.factor_sizes[i]).expect("projection images are in range")
    }
}

fn decode_coords(mut e: Element, sizes: &[usize]) -> Vec<Element> {
    let mut out = vec![0; sizes.len()];
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = e % s;
        e /= s;
    }
    out
}

pub fn direct_product(factors: &[&Algebra]) -> Result<DirectProduct, AlgebraError> {
    let first = factors.first().ok_or(AlgebraError::NoFactors)?;
    if factors.iter().any(|f| !f.same_signature(first)) {
        return Err(AlgebraError::SignatureMismatch);
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.size()).collect();
    let size = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).ok_or(AlgebraError::TableTooLarge {
        op: "universe".into(),
    })?;
    let coords: Vec<Vec<Element>> = (0..size).map(|e| decode_coords(e, &sizes)).collect();
    let algebra = Algebra::from_fn(first.signature().clone(), size, |op, args| {
        let mut component = [0; MAX_ARITY];
        let mut out = 0;
        for (i, f) in factors.iter().enumerate() {
            for (slot, &a) in component.iter_mut().zip(args) {
                *slot = coords[a][i];
            }
            out = out * sizes[i] + f.apply(op, &component[..args.len()]);
        }
        out
    })?;
    Ok(DirectProduct { algebra, factor_sizes: sizes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{find_isomorphism, Signature};

    fn chain(n: usize) -> Algebra {
        let sig = Signature::from_pairs(&[("m", 2), ("0", 0)]).unwrap();
        Algebra::from_fn(sig, n, |op, a| if op == 0 { a[0].min(a[1]) } else { 0 }).unwrap()
    }

    #[test]
    fn sizes_and_encoding() {
        let (a, b) = (chain(2), chain(5));
        let p = direct_product(&[&a, &b]).unwrap();
        assert_eq!(p.algebra().size(), 10);
        assert_eq!(p.encode(&[1, 3]), 8);
        assert_eq!(p.decode(8), vec![1, 3]);
        let x = p.encode(&[1, 4]);
        let y = p.encode(&[0, 2]);
        assert_eq!(p.decode(p.algebra().apply(0, &[x, y])), vec![0, 2]);
    }

    #[test]
    fn projection_recovers_factor_tables() {
        let (a, b) = (chain(3), chain(4));
        let p = direct_product(&[&a, &b]).unwrap();
        let pi = p.projection(1);
        for x in p.algebra().elements() {
            for y in p.algebra().elements() {
                let xy = p.algebra().apply(0, &[x, y]);
                assert_eq!(pi.get(xy), Some(b.apply(0, &[pi.get(x).unwrap(), pi.get(y).unwrap()])));
            }
        }
    }

    #[test]
    fn trivial_factor_is_neutral() {
        let a = chain(4);
        let one = Algebra::trivial(a.signature().clone());
        let p = direct_product(&[&a, &one]).unwrap();
        assert!(find_isomorphism(&a, p.algebra()).is_some());
    }

    #[test]
    fn signature_mismatch() {
        let other = Algebra::trivial(Signature::from_pairs(&[("m", 2)]).unwrap());
        assert_eq!(direct_product(&[&chain(2), &other]), Err(AlgebraError::SignatureMismatch));
        assert_eq!(direct_product(&[]), Err(AlgebraError::NoFactors));
    }
}
