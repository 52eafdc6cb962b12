//! Finite prefix-closed word sets used as embedding patterns.

use super::word::check_q;
use crate::{Error, Result};
use std::collections::BTreeSet;

/// A nonempty finite prefix-closed set of words over {0, ..., q-1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    q: u8,
    words: BTreeSet<Vec<u8>>,
}

impl Configuration {
    pub fn new(q: u8, words: impl IntoIterator<Item = Vec<u8>>) -> Result<Self> {
        check_q(q)?;
        let mut set: BTreeSet<Vec<u8>> = words.into_iter().collect();
        set.insert(Vec::new());
        for w in &set {
            if let Some(&bad) = w.iter().find(|&&a| a >= q) {
                return Err(Error::InvalidConfiguration(format!(
                    "letter {bad} >= q={q} in {w:?}"
                )));
            }
        }
        let prefixes: Vec<Vec<u8>> = set
            .iter()
            .filter(|w| !w.is_empty())
            .map(|w| w[..w.len() - 1].to_vec())
            .collect();
        for p in prefixes {
            if !set.contains(&p) {
                return Err(Error::InvalidConfiguration(format!(
                    "missing prefix {p:?}"
                )));
            }
        }
        Ok(Self { q, words: set })
    }

    pub fn singleton_root(q: u8) -> Result<Self> {
        Self::new(q, std::iter::empty())
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.words.contains(w)
    }

    pub fn words(&self) -> impl Iterator<Item = &[u8]> + '_ {
        self.words.iter().map(|w| w.as_slice())
    }

    pub fn height(&self) -> usize {
        self.words.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    /// The level set C(n).
    pub fn level(&self, n: usize) -> Vec<&[u8]> {
        self.words
            .iter()
            .filter(|w| w.len() == n)
            .map(|w| w.as_slice())
            .collect()
    }

    /// Letters a with wa in C.
    pub fn children(&self, w: &[u8]) -> Vec<u8> {
        (0..self.q)
            .filter(|&a| {
                let mut c = w.to_vec();
                c.push(a);
                self.words.contains(&c)
            })
            .collect()
    }

    pub fn is_leaf(&self, w: &[u8]) -> bool {
        self.children(w).is_empty()
    }

    /// The subconfiguration C^v = { w : vw in C }.
    pub fn subconfig(&self, v: &[u8]) -> Result<Self> {
        if !self.words.contains(v) {
            return Err(Error::InvalidConfiguration(format!("{v:?} not in C")));
        }
        let words = self
            .words
            .iter()
            .filter(|w| w.starts_with(v))
            .map(|w| w[v.len()..].to_vec());
        Self::new(self.q, words)
    }

    /// Branching means some level holds at least two words.
    pub fn is_branching(&self) -> bool {
        (1..=self.height()).any(|n| self.level(n).len() >= 2)
    }

    /// C(1)' restricted to letters whose subconfiguration branches.
    pub fn branching_children(&self) -> Vec<u8> {
        self.children(&[])
            .into_iter()
            .filter(|&a| self.subconfig(&[a]).unwrap().is_branching())
            .collect()
    }

    /// Shape invariant under relabeling letters: sorted recursive child shapes.
    fn shape(&self, v: &[u8]) -> Vec<String> {
        let mut shapes: Vec<String> = self
            .children(v)
            .iter()
            .map(|&a| {
                let mut c = v.to_vec();
                c.push(a);
                format!("({})", self.shape(&c).join(""))
            })
            .collect();
        shapes.sort();
        shapes
    }

    /// Equality of configurations up to relabeling letters along each branch.
    pub fn is_isomorphic_to(&self, other: &Configuration) -> bool {
        self.shape(&[]) == other.shape(&[])
    }
}

/// The named configuration families, plus parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigKind {
    /// F^r = {root} ∪ Λ_r ∪ 0Λ_r: a split, then a second split below child 0.
    F { r: u8 },
    /// D^{r,n}: the full r-ary tree of height n.
    D { r: u8, n: usize },
    /// V^{r,k,n}: vertices of T^r_{kN} of level at most n+1.
    V { r: u8, k: usize, n: usize },
}

impl ConfigKind {
    /// Parses CLI shorthand: "F2", "D2,2", "V2,3,3".
    pub fn parse(s: &str) -> Result<Self> {
        let err = || Error::InvalidParameter(format!("unrecognized configuration {s:?}"));
        let (head, rest) = s.split_at(1);
        let nums: Vec<usize> = rest
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| err()))
            .collect::<Result<_>>()?;
        match (head, nums.as_slice()) {
            ("F" | "f", [r]) => Ok(ConfigKind::F { r: *r as u8 }),
            ("D" | "d", [r, n]) => Ok(ConfigKind::D { r: *r as u8, n: *n }),
            ("V" | "v", [r, k, n]) => Ok(ConfigKind::V {
                r: *r as u8,
                k: *k,
                n: *n,
            }),
            _ => Err(err()),
        }
    }
}

impl std::fmt::Display for ConfigKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigKind::F { r } => write!(f, "F{r}"),
            ConfigKind::D { r, n } => write!(f, "D{r},{n}"),
            ConfigKind::V { r, k, n } => write!(f, "V{r},{k},{n}"),
        }
    }
}

fn check_r(r: u8, q: u8) -> Result<()> {
    if !(2..=q).contains(&r) {
        return Err(Error::InvalidParameter(format!("need 2 <= r <= q, got r={r}, q={q}")));
    }
    Ok(())
}

pub fn make_configuration(kind: ConfigKind, q: u8) -> Result<Configuration> {
    check_q(q)?;
    match kind {
        ConfigKind::F { r } => {
            check_r(r, q)?;
            let mut words: Vec<Vec<u8>> = Vec::new();
            for a in 0..r {
                words.push(vec![a]);
                words.push(vec![0, a]);
            }
            Configuration::new(q, words)
        }
        ConfigKind::D { r, n } => {
            check_r(r, q)?;
            if n < 1 {
                return Err(Error::InvalidParameter("D needs n >= 1".into()));
            }
            let mut words: Vec<Vec<u8>> = vec![Vec::new()];
            let mut frontier = vec![Vec::new()];
            for _ in 0..n {
                let mut next = Vec::new();
                for w in &frontier {
                    for a in 0..r {
                        let mut c = w.clone();
                        c.push(a);
                        next.push(c);
                    }
                }
                words.extend(next.iter().cloned());
                frontier = next;
            }
            Configuration::new(q, words)
        }
        ConfigKind::V { r, k, n } => {
            check_r(r, q)?;
            if k < 1 || n < 1 {
                return Err(Error::InvalidParameter("V needs k, n >= 1".into()));
            }
            // Levels 0..=n+1 of the tree splitting q ways at multiples of k
            // and r-1 ways elsewhere.
            let mut words: Vec<Vec<u8>> = vec![Vec::new()];
            let mut frontier = vec![Vec::new()];
            for j in 0..=n {
                let s = if j % k == 0 { q } else { r - 1 };
                let mut next = Vec::new();
                for w in &frontier {
                    for a in 0..s {
                        let mut c = w.clone();
                        c.push(a);
                        next.push(c);
                    }
                }
                words.extend(next.iter().cloned());
                frontier = next;
            }
            Configuration::new(q, words)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_prefix_closed() {
        assert!(Configuration::new(2, vec![vec![0, 1]]).is_err());
        assert!(Configuration::new(2, vec![vec![0], vec![0, 1]]).is_ok());
        assert!(Configuration::new(2, vec![vec![2]]).is_err());
    }

    #[test]
    fn f_family() {
        let c = make_configuration(ConfigKind::F { r: 2 }, 2).unwrap();
        // {root, 0, 1, 00, 01}
        assert_eq!(c.len(), 5);
        assert_eq!(c.height(), 2);
        assert_eq!(c.children(&[]), vec![0, 1]);
        assert_eq!(c.children(&[0]), vec![0, 1]);
        assert!(c.is_leaf(&[1]));
        assert!(c.is_branching());
        // Only child 0 carries a branching subconfiguration.
        assert_eq!(c.branching_children(), vec![0]);
        assert_eq!(c.subconfig(&[0]).unwrap().children(&[]), vec![0, 1]);
    }

    #[test]
    fn d_family() {
        let c = make_configuration(ConfigKind::D { r: 2, n: 1 }, 2).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.height(), 1);
        let d = make_configuration(ConfigKind::D { r: 3, n: 2 }, 3).unwrap();
        assert_eq!(d.len(), 1 + 3 + 9);
        assert_eq!(d.height(), 2);
        assert_eq!(d.branching_children(), vec![0, 1, 2]);
    }

    #[test]
    fn v_family() {
        // Levels 0..=4 of T^2_{3N}: counts 1, 2, 2, 2, 4.
        let c = make_configuration(ConfigKind::V { r: 2, k: 3, n: 3 }, 2).unwrap();
        assert_eq!(c.height(), 4);
        for (n, count) in [(0, 1), (1, 2), (2, 2), (3, 2), (4, 4)] {
            assert_eq!(c.level(n).len(), count, "level {n}");
        }
        assert_eq!(c.len(), 11);
    }

    #[test]
    fn subconfig_and_shape() {
        let c = make_configuration(ConfigKind::F { r: 2 }, 2).unwrap();
        let sub = c.subconfig(&[0]).unwrap();
        let d = make_configuration(ConfigKind::D { r: 2, n: 1 }, 2).unwrap();
        assert_eq!(sub, d);
        assert!(sub.is_isomorphic_to(&d));
        assert!(!c.is_isomorphic_to(&d));
        // Isomorphism ignores which letters are used.
        let left = Configuration::new(2, vec![vec![0], vec![0, 0]]).unwrap();
        let right = Configuration::new(2, vec![vec![1], vec![1, 1]]).unwrap();
        assert!(left.is_isomorphic_to(&right));
        assert!(!left.is_branching());
    }

    #[test]
    fn kind_parse() {
        assert_eq!(ConfigKind::parse("F2").unwrap(), ConfigKind::F { r: 2 });
        assert_eq!(
            ConfigKind::parse("D2,2").unwrap(),
            ConfigKind::D { r: 2, n: 2 }
        );
        assert_eq!(
            ConfigKind::parse("V2,3,3").unwrap(),
            ConfigKind::V { r: 2, k: 3, n: 3 }
        );
        assert!(ConfigKind::parse("X1").is_err());
        assert!(ConfigKind::parse("F").is_err());
    }
}
