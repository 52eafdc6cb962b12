//! Finite words over the alphabet {0, ..., q-1}.

use crate::{Error, Result};
use std::fmt;

/// A finite word over a q-letter alphabet. The empty word is the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    q: u8,
    letters: Vec<u8>,
}

pub const Q_MIN: u8 = 2;
pub const Q_MAX: u8 = 10;

pub fn check_q(q: u8) -> Result<()> {
    if !(Q_MIN..=Q_MAX).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "alphabet size {q} outside [{Q_MIN}, {Q_MAX}]"
        )));
    }
    Ok(())
}

impl Word {
    pub fn new(q: u8, letters: Vec<u8>) -> Result<Self> {
        check_q(q)?;
        if let Some(&bad) = letters.iter().find(|&&a| a >= q) {
            return Err(Error::InvalidWord(format!("letter {bad} >= q={q}")));
        }
        Ok(Self { q, letters })
    }

    pub fn root(q: u8) -> Result<Self> {
        Self::new(q, Vec::new())
    }

    /// Parses a digit string like "010" ("" for the root).
    pub fn parse(q: u8, s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::InvalidWord(format!("non-digit {c:?} in word")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(q, letters)
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    /// Word length l(v); the root has l = 0.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn child(&self, a: u8) -> Result<Self> {
        let mut letters = self.letters.clone();
        letters.push(a);
        Self::new(self.q, letters)
    }

    pub fn parent(&self) -> Option<Self> {
        if self.letters.is_empty() {
            None
        } else {
            Some(Self {
                q: self.q,
                letters: self.letters[..self.letters.len() - 1].to_vec(),
            })
        }
    }

    pub fn concat(&self, other: &Word) -> Result<Self> {
        if self.q != other.q {
            return Err(Error::InvalidWord("alphabet mismatch in concat".into()));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Self { q: self.q, letters })
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.letters.starts_with(&self.letters)
    }

    /// Longest common prefix, the poset infimum v ∧ w.
    pub fn meet(&self, other: &Word) -> Self {
        let n = self
            .letters
            .iter()
            .zip(&other.letters)
            .take_while(|(a, b)| a == b)
            .count();
        Self {
            q: self.q,
            letters: self.letters[..n].to_vec(),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "(root)");
        }
        for a in &self.letters {
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_and_validation() {
        assert!(Word::new(2, vec![0, 1, 0]).is_ok());
        assert!(Word::new(2, vec![0, 2]).is_err());
        assert!(Word::new(1, vec![]).is_err());
        assert!(Word::new(11, vec![]).is_err());
    }

    #[test]
    fn parse_and_display() {
        let w = Word::parse(3, "012").unwrap();
        assert_eq!(w.letters(), &[0, 1, 2]);
        assert_eq!(w.to_string(), "012");
        assert_eq!(Word::parse(2, "").unwrap(), Word::root(2).unwrap());
        assert!(Word::parse(2, "03").is_err());
        assert!(Word::parse(2, "a").is_err());
    }

    #[test]
    fn meet_is_lcp() {
        let a = Word::parse(2, "0010").unwrap();
        let b = Word::parse(2, "0011").unwrap();
        assert_eq!(a.meet(&b), Word::parse(2, "001").unwrap());
        assert_eq!(a.meet(&a), a);
        let root = Word::root(2).unwrap();
        assert_eq!(a.meet(&root), root);
        assert!(root.is_prefix_of(&a));
    }

    #[test]
    fn parent_child_roundtrip() {
        let w = Word::parse(2, "01").unwrap();
        assert_eq!(w.child(0).unwrap().parent().unwrap(), w);
        assert!(Word::root(2).unwrap().parent().is_none());
    }
}
