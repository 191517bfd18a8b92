use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// Tables are fully materialized, so arity is bounded.
pub const MAX_ARITY: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpSymbol {
    pub name: String,
    pub arity: usize,
}

impl OpSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        OpSymbol { name: name.into(), arity }
    }
}

/// An ordered list of operation symbols. Constants are 0-ary symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<OpSymbol>", into = "Vec<OpSymbol>")]
pub struct Signature {
    ops: Vec<OpSymbol>,
}

impl Signature {
    pub fn new(ops: Vec<OpSymbol>) -> Result<Self, AlgebraError> {
        for (i, op) in ops.iter().enumerate() {
            if op.name.is_empty() || op.name.chars().any(|c| c.is_whitespace() || "(),".contains(c)) {
                return Err(AlgebraError::BadSymbolName(op.name.clone()));
            }
            if op.arity > MAX_ARITY {
                return Err(AlgebraError::ArityTooLarge { op: op.name.clone(), arity: op.arity });
            }
            if ops[..i].iter().any(|o| o.name == op.name) {
                return Err(AlgebraError::DuplicateSymbol(op.name.clone()));
            }
        }
        Ok(Signature { ops })
    }

    /// Convenience constructor from `(name, arity)` pairs.
    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self, AlgebraError> {
        Self::new(pairs.iter().map(|&(n, a)| OpSymbol::new(n, a)).collect())
    }

    pub fn ops(&self) -> &[OpSymbol] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    pub fn arity(&self, op: usize) -> usize {
        self.ops[op].arity
    }

    pub fn name(&self, op: usize) -> &str {
        &self.ops[op].name
    }

    pub fn lookup(&self, name: &str) -> Option<&OpSymbol> {
        self.ops.iter().find(|o| o.name == name)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.lookup(name).is_some_and(|o| o.arity == 0)
    }

    /// Indices of the 0-ary symbols.
    pub fn constants(&self) -> impl Iterator<Item = usize> + '_ {
        self.ops.iter().enumerate().filter(|(_, o)| o.arity == 0).map(|(i, _)| i)
    }
}

impl TryFrom<Vec<OpSymbol>> for Signature {
    type Error = AlgebraError;
    fn try_from(ops: Vec<OpSymbol>) -> Result<Self, Self::Error> {
        Signature::new(ops)
    }
}

impl From<Signature> for Vec<OpSymbol> {
    fn from(s: Signature) -> Self {
        s.ops
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_wide_ops() {
        assert!(matches!(
            Signature::from_pairs(&[("+", 2), ("+", 1)]),
            Err(AlgebraError::DuplicateSymbol(_))
        ));
        assert!(matches!(
            Signature::from_pairs(&[("f", 9)]),
            Err(AlgebraError::ArityTooLarge { .. })
        ));
        assert!(Signature::from_pairs(&[("f", 8)]).is_ok());
    }

    #[test]
    fn constants_are_nullary_symbols() {
        let s = Signature::from_pairs(&[("+", 2), ("0", 0), ("*", 2), ("1", 0)]).unwrap();
        assert_eq!(s.constants().collect::<Vec<_>>(), vec![1, 3]);
        assert!(s.is_constant("1"));
        assert!(!s.is_constant("+"));
    }
}
