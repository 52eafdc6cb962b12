//! Finite-state Markov trees: probability weights on a tree automaton.

use crate::rational::{rat_to_f64, rat_zero, Rat};
use crate::treespec::AutomatonTree;
use crate::{Error, Result};
use num::{One, Zero};

/// An additive weight function on tree words, determined by per-state letter
/// probabilities over a tree automaton. Encodes a Borel probability measure
/// on the boundary of the tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStateMarkovTree {
    automaton: AutomatonTree,
    prob: Vec<Vec<Rat>>,
}

impl FiniteStateMarkovTree {
    pub fn new(automaton: AutomatonTree, prob: Vec<Vec<Rat>>) -> Result<Self> {
        if prob.len() != automaton.num_states() {
            return Err(Error::InvalidMarkovTree("one probability row per state".into()));
        }
        for (s, row) in prob.iter().enumerate() {
            if row.len() != automaton.q() as usize {
                return Err(Error::InvalidMarkovTree(format!("row {s} length != q")));
            }
            let mut total = rat_zero();
            for (a, p) in row.iter().enumerate() {
                if p < &rat_zero() {
                    return Err(Error::InvalidMarkovTree(format!("negative weight at ({s}, {a})")));
                }
                if !p.is_zero() && automaton.delta(s, a as u8).is_none() {
                    return Err(Error::InvalidMarkovTree(format!(
                        "positive weight on missing transition ({s}, {a})"
                    )));
                }
                total += p;
            }
            if !total.is_one() {
                return Err(Error::InvalidMarkovTree(format!("row {s} sums to {total}, not 1")));
            }
        }
        Ok(Self { automaton, prob })
    }

    /// Uniform weights over the letters available at each state.
    pub fn uniform(automaton: AutomatonTree) -> Self {
        let prob = (0..automaton.num_states())
            .map(|s| {
                let letters = automaton.letters(s);
                let share = Rat::new(1.into(), (letters.len() as i64).into());
                (0..automaton.q())
                    .map(|a| {
                        if automaton.delta(s, a).is_some() {
                            share.clone()
                        } else {
                            rat_zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(automaton, prob).expect("uniform weights are valid")
    }

    pub fn automaton(&self) -> &AutomatonTree {
        &self.automaton
    }

    pub fn q(&self) -> u8 {
        self.automaton.q()
    }

    pub fn prob(&self, state: usize, letter: u8) -> &Rat {
        &self.prob[state][letter as usize]
    }

    pub fn prob_rows(&self) -> &[Vec<Rat>] {
        &self.prob
    }

    /// Letters with positive probability at a state.
    pub fn support_letters(&self, state: usize) -> Vec<u8> {
        (0..self.q())
            .filter(|&a| !self.prob[state][a as usize].is_zero())
            .collect()
    }

    /// The weight τ(v): product of letter probabilities along the path,
    /// zero off the support.
    pub fn weight(&self, w: &[u8]) -> Rat {
        let mut s = self.automaton.root();
        let mut total = Rat::one();
        for &a in w {
            let p = &self.prob[s][a as usize];
            if p.is_zero() {
                return rat_zero();
            }
            total *= p;
            s = self.automaton.delta(s, a).expect("positive weight has transition");
        }
        total
    }

    /// The conditional Markov tree τ^v: same machine, root moved to the
    /// state of v. Requires τ(v) > 0.
    pub fn conditional(&self, v: &[u8]) -> Result<Self> {
        if self.weight(v).is_zero() {
            return Err(Error::InvalidMarkovTree(format!("τ({v:?}) = 0")));
        }
        let state = self.automaton.state_of(v).expect("positive weight is in tree");
        Ok(Self {
            automaton: self.automaton.with_root(state)?,
            prob: self.prob.clone(),
        })
    }

    /// All words of length <= depth with positive weight.
    pub fn support_words(&self, depth: usize) -> Vec<Vec<u8>> {
        let mut out = vec![Vec::new()];
        let mut frontier = vec![(Vec::new(), self.automaton.root())];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (w, s) in &frontier {
                for a in self.support_letters(*s) {
                    let mut c = w.clone();
                    c.push(a);
                    next.push((c, self.automaton.delta(*s, a).unwrap()));
                }
            }
            out.extend(next.iter().map(|(w, _)| w.clone()));
            frontier = next;
        }
        out
    }
}

/// Partial sum of the tree metric d(τ1, τ2) = Σ q^{-l(v)} |τ1(v) - τ2(v)|
/// over l(v) <= depth, plus a tail bound. The true distance lies in
/// [partial, partial + tail].
pub fn markov_metric(t1: &FiniteStateMarkovTree, t2: &FiniteStateMarkovTree, depth: usize) -> Result<(f64, f64)> {
    if t1.q() != t2.q() {
        return Err(Error::InvalidMarkovTree("alphabet mismatch".into()));
    }
    let q = t1.q() as f64;
    // |τ1 - τ2| vanishes off the union of supports.
    let mut words: std::collections::BTreeSet<Vec<u8>> =
        t1.support_words(depth).into_iter().collect();
    words.extend(t2.support_words(depth));
    let mut partial = 0.0;
    for w in &words {
        let diff = t1.weight(w) - t2.weight(w);
        partial += q.powi(-(w.len() as i32)) * rat_to_f64(&diff).abs();
    }
    // Level sums of each τ are 1, so each deeper level adds at most 2 q^{-n}.
    let tail = 2.0 * q.powi(-(depth as i32)) / (q - 1.0);
    Ok((partial, tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::treespec::{make_named_tree, NamedFamily};

    fn uniform_t2_3n() -> FiniteStateMarkovTree {
        let p = make_named_tree(NamedFamily::Multiples { k: 3 }, 2, 2).unwrap();
        FiniteStateMarkovTree::uniform(p.to_automaton())
    }

    #[test]
    fn weights_multiply_along_paths() {
        let t = uniform_t2_3n();
        assert_eq!(t.weight(&[]), rat(1, 1));
        assert_eq!(t.weight(&[0]), rat(1, 2));
        assert_eq!(t.weight(&[1, 0, 0]), rat(1, 2));
        assert_eq!(t.weight(&[1, 0, 0, 1]), rat(1, 4));
        assert_eq!(t.weight(&[1, 1]), rat(0, 1));
        // Level sums are 1.
        for depth in 0..8 {
            let total: Rat = t
                .support_words(depth)
                .iter()
                .filter(|w| w.len() == depth)
                .map(|w| t.weight(w))
                .sum();
            assert_eq!(total, rat(1, 1), "level {depth}");
        }
    }

    #[test]
    fn conditional_matches_ratio() {
        let t = uniform_t2_3n();
        for v in [vec![0u8], vec![1], vec![0, 0], vec![1, 0, 0]] {
            let c = t.conditional(&v).unwrap();
            let tv = t.weight(&v);
            for w in c.support_words(6) {
                let mut vw = v.clone();
                vw.extend_from_slice(&w);
                assert_eq!(c.weight(&w), t.weight(&vw) / tv.clone(), "v={v:?} w={w:?}");
            }
        }
        assert_eq!(t.conditional(&[]).unwrap(), t);
        assert!(t.conditional(&[1, 1]).is_err());
    }

    #[test]
    fn validation() {
        let auto = uniform_t2_3n().automaton().clone();
        // Rows must sum to one.
        let bad = FiniteStateMarkovTree::new(
            auto.clone(),
            vec![vec![rat(1, 2), rat(1, 4)], vec![rat(1, 1), rat(0, 1)], vec![rat(1, 1), rat(0, 1)]],
        );
        assert!(bad.is_err());
        // Positive weight must sit on a defined transition.
        let bad = FiniteStateMarkovTree::new(
            auto,
            vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 2), rat(1, 2)], vec![rat(1, 1), rat(0, 1)]],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn metric_basics() {
        let t = uniform_t2_3n();
        let (partial, tail) = markov_metric(&t, &t, 4).unwrap();
        assert_eq!(partial, 0.0);
        assert!(tail > 0.0);

        // Point mass on 000... within the same tree.
        let auto = t.automaton().clone();
        let point = FiniteStateMarkovTree::new(
            auto,
            vec![vec![rat(1, 1), rat(0, 1)], vec![rat(1, 1), rat(0, 1)], vec![rat(1, 1), rat(0, 1)]],
        )
        .unwrap();
        let (d1, _) = markov_metric(&t, &point, 3).unwrap();
        let (d2, _) = markov_metric(&point, &t, 3).unwrap();
        assert!((d1 - d2).abs() < 1e-15);
        // Hand count: level 1 contributes (1/2)(1/2 + 1/2) = 1/2, levels 2, 3
        // repeat the same two-word pattern: (1/4)(1/2+1/2) + (1/8)(1/2+1/2).
        assert!((d1 - (0.5 / 2.0 + 0.5 / 4.0 + 0.5 / 8.0) * 2.0).abs() < 1e-12);
    }
}
