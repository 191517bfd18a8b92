use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A word over the alphabet `{1..N}`; the empty word is ε.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Word {
        Word(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` followed by the letter `j`.
    pub fn push(&self, j: u8) -> Word {
        let mut v = self.0.clone();
        v.push(j);
        Word(v)
    }

    pub fn has_prefix(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// Every word over `{1..letters}` of length at most `max_len`, shortest first.
    pub fn all(letters: u8, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..max_len {
            layer = layer.iter().flat_map(|w| (1..=letters).map(move |j| w.push(j))).collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    /// Words of length exactly `len`.
    pub fn of_length(letters: u8, len: usize) -> Vec<Word> {
        Word::all(letters, len).into_iter().filter(|w| w.len() == len).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let sep = if self.0.iter().any(|&j| j > 9) { "." } else { "" };
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        f.write_str(&parts.join(sep))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a word (use ε, digits like 12, or dotted letters like 10.3)")]
pub struct BadWord(pub String);

impl FromStr for Word {
    type Err = BadWord;

    fn from_str(s: &str) -> Result<Word, BadWord> {
        let bad = || BadWord(s.to_string());
        if s == "ε" || s.is_empty() {
            return Ok(Word::empty());
        }
        let letters: Option<Vec<u8>> = if s.contains('.') {
            s.split('.').map(|p| p.parse::<u8>().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect()
        };
        let letters = letters.ok_or_else(bad)?;
        if letters.contains(&0) {
            return Err(bad());
        }
        Ok(Word(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Word, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_order() {
        let ws = Word::all(2, 2);
        assert_eq!(ws.len(), 7);
        assert_eq!(ws.iter().filter(|w| (1..=2).contains(&w.len())).count(), 6);
        assert_eq!(ws[0], Word::empty());
        assert_eq!(ws.iter().map(Word::to_string).collect::<Vec<_>>(), ["ε", "1", "2", "11", "12", "21", "22"]);
    }

    #[test]
    fn text_round_trip() {
        for w in [Word::empty(), Word::new(vec![1, 2]), Word::new(vec![10, 3])] {
            assert_eq!(w.to_string().parse::<Word>().unwrap(), w);
        }
        assert!("1a".parse::<Word>().is_err());
        assert!("0".parse::<Word>().is_err());
        assert!(Word::new(vec![1, 2, 1]).has_prefix(&Word::new(vec![1, 2])));
    }
}
