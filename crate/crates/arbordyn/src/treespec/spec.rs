//! Finite-state descriptions of infinite pruned trees and finite truncations.

use super::epseq::{EventuallyPeriodic, EventuallyPeriodicSet};
use super::word::check_q;
use crate::rational::Int;
use crate::{Error, Result};
use num::{One, Zero};
use std::collections::BTreeSet;

/// Tree determined by a splitting profile: every level-n vertex has children
/// 0..s(n), with s eventually periodic and 1 <= s(n) <= q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileTree {
    q: u8,
    splitting: EventuallyPeriodic<u8>,
}

impl ProfileTree {
    pub fn new(q: u8, splitting: EventuallyPeriodic<u8>) -> Result<Self> {
        check_q(q)?;
        for &s in splitting.preperiod().iter().chain(splitting.period()) {
            if s < 1 || s > q {
                return Err(Error::InvalidSpec(format!("splitting value {s} outside [1, {q}]")));
            }
        }
        Ok(Self { q, splitting })
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn splitting(&self) -> &EventuallyPeriodic<u8> {
        &self.splitting
    }

    pub fn s(&self, n: usize) -> u8 {
        *self.splitting.get(n)
    }

    /// Levels j with s(j) >= r, as an eventually periodic set.
    pub fn levels_with_split_at_least(&self, r: u8) -> EventuallyPeriodicSet {
        EventuallyPeriodicSet::from_fn(
            self.splitting.preperiod_len(),
            self.splitting.period_len(),
            |j| self.s(j) >= r,
        )
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        w.iter().enumerate().all(|(i, &a)| a < self.s(i))
    }

    pub fn shift(&self, m: usize) -> Self {
        Self {
            q: self.q,
            splitting: self.splitting.shift(m),
        }
    }

    /// Equivalent automaton: one state per position in the canonical profile.
    pub fn to_automaton(&self) -> AutomatonTree {
        let pre = self.splitting.preperiod_len();
        let per = self.splitting.period_len();
        let n = pre + per;
        let delta = (0..n)
            .map(|j| {
                let next = if j + 1 < n { j + 1 } else { pre };
                (0..self.q)
                    .map(|a| if a < self.s(j) { Some(next) } else { None })
                    .collect()
            })
            .collect();
        AutomatonTree::new(self.q, n, 0, delta).expect("profile automaton is valid")
    }
}

/// Tree recognized by a deterministic partial automaton; a word belongs to
/// the tree when every prefix has a defined transition path from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonTree {
    q: u8,
    num_states: usize,
    root: usize,
    delta: Vec<Vec<Option<usize>>>,
}

impl AutomatonTree {
    pub fn new(
        q: u8,
        num_states: usize,
        root: usize,
        delta: Vec<Vec<Option<usize>>>,
    ) -> Result<Self> {
        check_q(q)?;
        if root >= num_states || delta.len() != num_states {
            return Err(Error::InvalidSpec("automaton shape mismatch".into()));
        }
        for row in &delta {
            if row.len() != q as usize {
                return Err(Error::InvalidSpec("transition row length != q".into()));
            }
            for t in row.iter().flatten() {
                if *t >= num_states {
                    return Err(Error::InvalidSpec(format!("transition target {t} out of range")));
                }
            }
        }
        let tree = Self { q, num_states, root, delta };
        for s in tree.reachable() {
            if tree.delta[s].iter().all(|t| t.is_none()) {
                return Err(Error::InvalidSpec(format!(
                    "reachable state {s} has no outgoing letters (tree not pruned)"
                )));
            }
        }
        Ok(tree)
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn delta(&self, state: usize, letter: u8) -> Option<usize> {
        self.delta[state][letter as usize]
    }

    /// Letters allowed out of a state.
    pub fn letters(&self, state: usize) -> Vec<u8> {
        (0..self.q)
            .filter(|&a| self.delta[state][a as usize].is_some())
            .collect()
    }

    pub fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_states];
        let mut stack = vec![self.root];
        seen[self.root] = true;
        while let Some(s) = stack.pop() {
            for t in self.delta[s].iter().flatten() {
                if !seen[*t] {
                    seen[*t] = true;
                    stack.push(*t);
                }
            }
        }
        (0..self.num_states).filter(|&s| seen[s]).collect()
    }

    /// The state reached by a word, if the word is in the tree.
    pub fn state_of(&self, w: &[u8]) -> Option<usize> {
        let mut s = self.root;
        for &a in w {
            s = self.delta[s][a as usize]?;
        }
        Some(s)
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.state_of(w).is_some()
    }

    pub fn with_root(&self, root: usize) -> Result<Self> {
        Self::new(self.q, self.num_states, root, self.delta.clone())
    }

    /// Restriction of the state set to one strongly connected component
    /// containing every state reachable from every other; None if the
    /// reachable part is not strongly connected.
    pub fn is_strongly_connected(&self) -> bool {
        let reach = self.reachable();
        // From each reachable state, every other reachable state must be
        // reachable.
        for &start in &reach {
            let mut seen = vec![false; self.num_states];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(s) = stack.pop() {
                for t in self.delta[s].iter().flatten() {
                    if !seen[*t] {
                        seen[*t] = true;
                        stack.push(*t);
                    }
                }
            }
            if reach.iter().any(|&s| !seen[s]) {
                return false;
            }
        }
        true
    }

    /// Letter-count matrix m[s][t] = number of letters moving s to t.
    pub fn letter_count_matrix(&self) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; self.num_states]; self.num_states];
        for s in 0..self.num_states {
            for t in self.delta[s].iter().flatten() {
                m[s][*t] += 1;
            }
        }
        m
    }
}

/// Finite truncation of a tree: all words up to a fixed depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitTree {
    q: u8,
    depth: usize,
    words: BTreeSet<Vec<u8>>,
}

impl ExplicitTree {
    pub fn new(q: u8, depth: usize, words: impl IntoIterator<Item = Vec<u8>>) -> Result<Self> {
        check_q(q)?;
        let mut set: BTreeSet<Vec<u8>> = words.into_iter().collect();
        set.insert(Vec::new());
        for w in &set {
            if let Some(&bad) = w.iter().find(|&&a| a >= q) {
                return Err(Error::InvalidSpec(format!("letter {bad} >= q={q}")));
            }
            if w.len() > depth {
                return Err(Error::InvalidSpec(format!("word {w:?} deeper than {depth}")));
            }
        }
        let members: Vec<Vec<u8>> = set.iter().cloned().collect();
        for w in &members {
            if !w.is_empty() && !set.contains(&w[..w.len() - 1]) {
                return Err(Error::InvalidSpec(format!("missing prefix of {w:?}")));
            }
            if w.len() < depth {
                let has_child = (0..q).any(|a| {
                    let mut c = w.clone();
                    c.push(a);
                    set.contains(&c)
                });
                if !has_child {
                    return Err(Error::InvalidSpec(format!(
                        "word {w:?} at depth {} has no child (not pruned up to {depth})",
                        w.len()
                    )));
                }
            }
        }
        Ok(Self { q, depth, words: set })
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.words.contains(w)
    }

    pub fn words(&self) -> impl Iterator<Item = &[u8]> + '_ {
        self.words.iter().map(|w| w.as_slice())
    }

    pub fn level(&self, n: usize) -> Vec<&[u8]> {
        self.words
            .iter()
            .filter(|w| w.len() == n)
            .map(|w| w.as_slice())
            .collect()
    }

    pub fn children(&self, w: &[u8]) -> Vec<u8> {
        (0..self.q)
            .filter(|&a| {
                let mut c = w.to_vec();
                c.push(a);
                self.words.contains(&c)
            })
            .collect()
    }
}

/// A tree given by one of the three finite descriptions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeSpec {
    Profile(ProfileTree),
    Automaton(AutomatonTree),
    Explicit(ExplicitTree),
}

impl TreeSpec {
    pub fn q(&self) -> u8 {
        match self {
            TreeSpec::Profile(t) => t.q(),
            TreeSpec::Automaton(t) => t.q(),
            TreeSpec::Explicit(t) => t.q(),
        }
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        match self {
            TreeSpec::Profile(t) => t.contains(w),
            TreeSpec::Automaton(t) => t.contains(w),
            TreeSpec::Explicit(t) => t.contains(w),
        }
    }

    /// Letters allowed below a tree word.
    pub fn children(&self, w: &[u8]) -> Result<Vec<u8>> {
        if !self.contains(w) {
            return Err(Error::NotInTree(format!("{w:?}")));
        }
        Ok(match self {
            TreeSpec::Profile(t) => (0..t.s(w.len())).collect(),
            TreeSpec::Automaton(t) => t.letters(t.state_of(w).unwrap()),
            TreeSpec::Explicit(t) => t.children(w),
        })
    }

    /// Exact |T(n)| with arbitrary-precision integers.
    pub fn level_count(&self, n: usize) -> Result<Int> {
        match self {
            TreeSpec::Profile(t) => {
                let mut c = Int::one();
                for j in 0..n {
                    c *= Int::from(t.s(j));
                }
                Ok(c)
            }
            TreeSpec::Automaton(t) => {
                let mut counts = vec![Int::zero(); t.num_states()];
                counts[t.root()] = Int::one();
                let m = t.letter_count_matrix();
                for _ in 0..n {
                    let mut next = vec![Int::zero(); t.num_states()];
                    for (s, c) in counts.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        for (tgt, mult) in m[s].iter().enumerate() {
                            if *mult > 0 {
                                next[tgt] += c * Int::from(*mult);
                            }
                        }
                    }
                    counts = next;
                }
                Ok(counts.into_iter().sum())
            }
            TreeSpec::Explicit(t) => {
                if n > t.depth() {
                    return Err(Error::HorizonExceeded(format!(
                        "level {n} beyond truncation depth {}",
                        t.depth()
                    )));
                }
                Ok(Int::from(t.level(n).len()))
            }
        }
    }

    /// The tree rooted at v: { w : vw in T }.
    pub fn subtree(&self, v: &[u8]) -> Result<TreeSpec> {
        if !self.contains(v) {
            return Err(Error::NotInTree(format!("{v:?}")));
        }
        Ok(match self {
            TreeSpec::Profile(t) => TreeSpec::Profile(t.shift(v.len())),
            TreeSpec::Automaton(t) => {
                TreeSpec::Automaton(t.with_root(t.state_of(v).unwrap())?)
            }
            TreeSpec::Explicit(t) => {
                let words = t
                    .words()
                    .filter(|w| w.starts_with(v))
                    .map(|w| w[v.len()..].to_vec());
                TreeSpec::Explicit(ExplicitTree::new(t.q(), t.depth() - v.len(), words)?)
            }
        })
    }

    /// All tree words of length <= depth, in sorted order.
    pub fn words_up_to(&self, depth: usize) -> Result<Vec<Vec<u8>>> {
        if let TreeSpec::Explicit(t) = self {
            if depth > t.depth() {
                return Err(Error::HorizonExceeded(format!(
                    "depth {depth} beyond truncation depth {}",
                    t.depth()
                )));
            }
        }
        let mut out = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for w in &frontier {
                for a in self.children(w)? {
                    let mut c = w.clone();
                    c.push(a);
                    next.push(c);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out.sort();
        Ok(out)
    }

    pub fn truncate(&self, depth: usize) -> Result<ExplicitTree> {
        ExplicitTree::new(self.q(), depth, self.words_up_to(depth)?)
    }

    /// The automaton presentation, when one exists at this scale.
    pub fn automaton(&self) -> Result<AutomatonTree> {
        match self {
            TreeSpec::Profile(t) => Ok(t.to_automaton()),
            TreeSpec::Automaton(t) => Ok(t.clone()),
            TreeSpec::Explicit(_) => Err(Error::Unsupported(
                "explicit truncations have no automaton presentation".into(),
            )),
        }
    }
}

/// The example tree families, parameterized by their splitting level set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamedFamily {
    /// T_E^r: split q ways on levels in E, r-1 ways elsewhere.
    E(EventuallyPeriodicSet),
    /// T_kN^r: E = multiples of k.
    Multiples { k: usize },
    /// T_eps: E = kN \ kNN (splitting suppressed on multiples of kN).
    Eps { k: usize, big_n: usize },
}

pub fn make_named_tree(family: NamedFamily, q: u8, r: u8) -> Result<ProfileTree> {
    check_q(q)?;
    if !(2..=q).contains(&r) {
        return Err(Error::InvalidParameter(format!("need 2 <= r <= q, got r={r}, q={q}")));
    }
    let set = match family {
        NamedFamily::E(e) => e,
        NamedFamily::Multiples { k } => EventuallyPeriodicSet::multiples(k)?,
        NamedFamily::Eps { k, big_n } => {
            if big_n < 1 {
                return Err(Error::InvalidParameter("Eps needs N >= 1".into()));
            }
            EventuallyPeriodicSet::multiples_minus(k, k * big_n)?
        }
    };
    let splitting = EventuallyPeriodic::from_fn(set.preperiod_len(), set.period_len(), |n| {
        if set.contains(n) {
            q
        } else {
            r - 1
        }
    });
    ProfileTree::new(q, splitting)
}
