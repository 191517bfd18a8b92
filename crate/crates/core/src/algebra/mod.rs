//! Finite algebras over a signature, terms, products, subalgebras and maps.
//!
//! Elements are dense indices `0..size`. Every operation table is fully
//! materialized in row-major order with the first argument most significant.

mod enumerate;
mod io;
mod morphism;
mod product;
mod signature;
mod subalgebra;
mod term;

pub use enumerate::{EnumeratedTerm, TermEnumerator};
pub use io::{algebra_to_json, parse_algebra, parse_term, ParseError};
pub use morphism::{check_homomorphism, find_isomorphism, ElementMap, MapError};
pub use product::{direct_product, DirectProduct};
pub use signature::{OpSymbol, Signature, MAX_ARITY};
pub use subalgebra::{induced_subalgebra, is_subuniverse, subuniverse_closure};
pub use term::{eval_term, indexed_names, CompiledTerm, Term, TermError, ZeroOneSpec};
pub(crate) use io::{is_identifier, parse_term_at, read_symbol, skip_ws};

use thiserror::Error;

pub type Element = usize;

/// Upper bound on the number of entries in a single table.
const MAX_TABLE_LEN: usize = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("`{0}` is not a valid operation name")]
    BadSymbolName(String),
    #[error("operation `{op}` has arity {arity}, above the limit of {MAX_ARITY}")]
    ArityTooLarge { op: String, arity: usize },
    #[error("universe must be nonempty")]
    EmptyUniverse,
    #[error("no table for `{0}`")]
    MissingTable(String),
    #[error("table for `{op}` has {found} entries, expected {expected}")]
    TableLength { op: String, expected: usize, found: usize },
    #[error("table for `{op}` has entry {value} at position {position}, outside 0..{size}")]
    OutOfRange { op: String, position: usize, value: usize, size: usize },
    #[error("table for `{op}` would need more than {MAX_TABLE_LEN} entries")]
    TableTooLarge { op: String },
    #[error("factors do not share one signature")]
    SignatureMismatch,
    #[error("a product needs at least one factor")]
    NoFactors,
    #[error("subset is not closed under `{op}`")]
    NotClosed { op: String },
    #[error("element {0} outside the universe")]
    ElementOutOfRange(Element),
}

/// Number of `arity`-tuples over a universe of `size` elements, if it fits a table.
pub fn tuple_count(size: usize, arity: usize) -> Option<usize> {
    let mut n: usize = 1;
    for _ in 0..arity {
        n = n.checked_mul(size)?;
    }
    (n <= MAX_TABLE_LEN).then_some(n)
}

/// Writes the tuple with row-major index `index` into `out`.
pub fn decode_tuple(mut index: usize, size: usize, out: &mut [Element]) {
    for slot in out.iter_mut().rev() {
        *slot = index % size;
        index /= size;
    }
}

pub fn encode_tuple(args: &[Element], size: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Algebra {
    signature: Signature,
    size: usize,
    tables: Vec<Vec<Element>>,
}

impl Algebra {
    /// Builds an algebra from row-major tables given in signature order.
    pub fn new(signature: Signature, size: usize, tables: Vec<Vec<Element>>) -> Result<Self, AlgebraError> {
        if size == 0 {
            return Err(AlgebraError::EmptyUniverse);
        }
        if tables.len() != signature.len() {
            let missing = signature.ops().get(tables.len()).map(|o| o.name.clone()).unwrap_or_default();
            return Err(AlgebraError::MissingTable(missing));
        }
        for (op, table) in signature.ops().iter().zip(&tables) {
            let expected = tuple_count(size, op.arity).ok_or_else(|| AlgebraError::TableTooLarge { op: op.name.clone() })?;
            if table.len() != expected {
                return Err(AlgebraError::TableLength { op: op.name.clone(), expected, found: table.len() });
            }
            if let Some((position, &value)) = table.iter().enumerate().find(|(_, &v)| v >= size) {
                return Err(AlgebraError::OutOfRange { op: op.name.clone(), position, value, size });
            }
        }
        Ok(Algebra { signature, size, tables })
    }

    /// Builds every table by calling `f(op_index, args)`.
    pub fn from_fn<F>(signature: Signature, size: usize, mut f: F) -> Result<Self, AlgebraError>
    where
        F: FnMut(usize, &[Element]) -> Element,
    {
        if size == 0 {
            return Err(AlgebraError::EmptyUniverse);
        }
        let mut tables = Vec::with_capacity(signature.len());
        for (i, op) in signature.ops().iter().enumerate() {
            let len = tuple_count(size, op.arity).ok_or_else(|| AlgebraError::TableTooLarge { op: op.name.clone() })?;
            let mut args = vec![0; op.arity];
            let mut table = Vec::with_capacity(len);
            for idx in 0..len {
                decode_tuple(idx, size, &mut args);
                table.push(f(i, &args));
            }
            tables.push(table);
        }
        Algebra::new(signature, size, tables)
    }

    /// The one-element algebra over `signature`.
    pub fn trivial(signature: Signature) -> Self {
        let tables = signature.ops().iter().map(|_| vec![0]).collect();
        Algebra { signature, size: 1, tables }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> std::ops::Range<Element> {
        0..self.size
    }

    pub fn table(&self, op: usize) -> &[Element] {
        &self.tables[op]
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.signature.index_of(name)
    }

    #[inline]
    pub fn apply(&self, op: usize, args: &[Element]) -> Element {
        debug_assert_eq!(args.len(), self.signature.arity(op));
        self.tables[op][encode_tuple(args, self.size)]
    }

    /// Value of the 0-ary symbol `name`, if there is one.
    pub fn constant(&self, name: &str) -> Option<Element> {
        let i = self.op_index(name)?;
        (self.signature.arity(i) == 0).then(|| self.tables[i][0])
    }

    /// Values of all constants, in signature order.
    pub fn constant_values(&self) -> Vec<Element> {
        self.signature.constants().map(|i| self.tables[i][0]).collect()
    }

    pub fn same_signature(&self, other: &Algebra) -> bool {
        self.signature == other.signature
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::from_pairs(&[("*", 2), ("1", 0)]).unwrap()
    }

    #[test]
    fn tuple_coding_is_row_major() {
        let mut out = [0; 3];
        decode_tuple(encode_tuple(&[2, 0, 1], 3), 3, &mut out);
        assert_eq!(out, [2, 0, 1]);
        assert_eq!(encode_tuple(&[1, 0], 5), 5);
        assert_eq!(tuple_count(4, 0), Some(1));
    }

    #[test]
    fn table_errors_are_distinct() {
        assert!(matches!(
            Algebra::new(sig(), 2, vec![vec![0, 0, 0], vec![1]]),
            Err(AlgebraError::TableLength { .. })
        ));
        assert!(matches!(
            Algebra::new(sig(), 2, vec![vec![0, 0, 0, 2], vec![1]]),
            Err(AlgebraError::OutOfRange { value: 2, position: 3, .. })
        ));
        assert!(matches!(Algebra::new(sig(), 0, vec![]), Err(AlgebraError::EmptyUniverse)));
    }

    #[test]
    fn from_fn_matches_apply() {
        let a = Algebra::from_fn(sig(), 3, |op, args| if op == 0 { args[0].min(args[1]) } else { 2 }).unwrap();
        assert_eq!(a.apply(0, &[2, 1]), 1);
        assert_eq!(a.constant("1"), Some(2));
        assert_eq!(a.constant("*"), None);
        assert_eq!(Algebra::trivial(sig()).size(), 1);
    }
}
