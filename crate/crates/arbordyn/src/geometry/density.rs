//! Densities of vertex sets inside trees: exact level-set reductions,
//! finite-depth averages, and Banach-density witnesses along Markov trees.

use crate::cp::FiniteStateMarkovTree;
use crate::geometry::minkowski::markov_dim;
use crate::rational::{rat, rat_to_f64, Int, Rat};
use crate::treespec::{EventuallyPeriodicSet, TreeSpec};
use crate::{Error, Result};
use num::{One, Zero};
use std::collections::BTreeSet;

/// Membership of a vertex in V, expressed at the granularity the tree spec
/// supports: by level, by automaton state, or by explicit word list.
#[derive(Debug, Clone)]
pub enum VertexPredicate {
    Levels(EventuallyPeriodicSet),
    States(Vec<bool>),
    Explicit(BTreeSet<Vec<u8>>),
}

impl VertexPredicate {
    pub fn all() -> Self {
        VertexPredicate::Levels(EventuallyPeriodicSet::full())
    }

    pub fn none() -> Self {
        VertexPredicate::Levels(EventuallyPeriodicSet::empty())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityEvalMode {
    Exact,
    Estimate(usize),
}

#[derive(Debug, Clone)]
pub enum DensityValue {
    Exact(Rat),
    Estimate { value: f64, sequence: Vec<f64> },
}

impl DensityValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            DensityValue::Exact(r) => rat_to_f64(r),
            DensityValue::Estimate { value, .. } => *value,
        }
    }
}

/// Ancestor-count average over the level-n vertices:
/// (1/|T(n)|) sum_v |{ancestors of v in V}| / (n+1). Each level-j ancestor
/// slot is shared by all its level-n descendants, so the sum telescopes to
/// sum_j (members of V at level j weighted by descendant counts).
fn level_average(tree: &TreeSpec, v: &VertexPredicate, n: usize) -> Result<Rat> {
    match (tree, v) {
        (TreeSpec::Profile(t), VertexPredicate::Levels(set)) => {
            let hits = (0..=n).filter(|&j| set.contains(j)).count();
            let _ = t;
            Ok(rat(hits as i64, (n + 1) as i64))
        }
        (TreeSpec::Explicit(t), pred) => {
            let mut total = Int::zero();
            let mut count = Int::zero();
            for w in t.level(n) {
                count += Int::one();
                let hits = (0..=n)
                    .filter(|&j| match pred {
                        VertexPredicate::Levels(set) => set.contains(j),
                        VertexPredicate::Explicit(words) => words.contains(&w[..j].to_vec()),
                        VertexPredicate::States(_) => false,
                    })
                    .count();
                total += Int::from(hits);
            }
            if count.is_zero() {
                return Err(Error::InvalidSpec("empty level".into()));
            }
            if matches!(pred, VertexPredicate::States(_)) {
                return Err(Error::Unsupported(
                    "state predicates need a finite-state tree".into(),
                ));
            }
            Ok(Rat::new(total, count * Int::from(n + 1)))
        }
        (_, pred) => {
            let auto = tree.automaton()?;
            let ns = auto.num_states();
            // counts[j][t]: level-j words in state t; desc[m][t]: level-m
            // descendant count below state t.
            let mut counts = vec![vec![Int::zero(); ns]];
            counts[0][auto.root()] = Int::one();
            for j in 0..n {
                let mut next = vec![Int::zero(); ns];
                for t in 0..ns {
                    if counts[j][t].is_zero() {
                        continue;
                    }
                    for a in auto.letters(t) {
                        let tgt = auto.delta(t, a).unwrap();
                        next[tgt] += &counts[j][t];
                    }
                }
                counts.push(next);
            }
            let mut desc = vec![vec![Int::one(); ns]];
            for m in 0..n {
                let mut next = vec![Int::zero(); ns];
                for t in 0..ns {
                    for a in auto.letters(t) {
                        next[t] += &desc[m][auto.delta(t, a).unwrap()];
                    }
                }
                desc.push(next);
            }
            let total_leaves: Int = counts[n].iter().cloned().sum();
            let mut hits = Int::zero();
            match pred {
                VertexPredicate::States(sel) => {
                    if sel.len() != ns {
                        return Err(Error::InvalidParameter(
                            "state predicate length must match the automaton".into(),
                        ));
                    }
                    for j in 0..=n {
                        for t in 0..ns {
                            if sel[t] {
                                hits += &counts[j][t] * &desc[n - j][t];
                            }
                        }
                    }
                }
                VertexPredicate::Levels(set) => {
                    for j in 0..=n {
                        if set.contains(j) {
                            for t in 0..ns {
                                hits += &counts[j][t] * &desc[n - j][t];
                            }
                        }
                    }
                }
                VertexPredicate::Explicit(words) => {
                    for w in words {
                        if w.len() <= n {
                            if let Some(t) = auto.state_of(w) {
                                hits += &desc[n - w.len()][t];
                            }
                        }
                    }
                }
            }
            Ok(Rat::new(hits, total_leaves * Int::from(n + 1)))
        }
    }
}

/// Upper density of V in T. Exact only for the profile + level-set pairing,
/// where every level-n vertex sees the same ancestors and the average reduces
/// to the natural density of the level set.
pub fn upper_density(
    tree: &TreeSpec,
    v: &VertexPredicate,
    mode: DensityEvalMode,
) -> Result<DensityValue> {
    match mode {
        DensityEvalMode::Exact => match (tree, v) {
            (TreeSpec::Profile(_), VertexPredicate::Levels(set)) => {
                Ok(DensityValue::Exact(crate::arith::densities(set).upper))
            }
            _ => Err(Error::Unsupported(
                "exact vertex density needs a profile tree with a level predicate".into(),
            )),
        },
        DensityEvalMode::Estimate(depth) => {
            if depth < 2 {
                return Err(Error::InvalidParameter("estimate depth must be >= 2".into()));
            }
            let mut sequence = Vec::new();
            let mut best = 0.0f64;
            for n in depth / 2..=depth {
                let f = rat_to_f64(&level_average(tree, v, n)?);
                sequence.push(f);
                best = best.max(f);
            }
            Ok(DensityValue::Estimate { value: best, sequence })
        }
    }
}

/// One evaluation point of the Banach-density witness.
#[derive(Debug, Clone)]
pub struct WitnessResult {
    pub value: Rat,
    pub vertex: Vec<u8>,
}

fn indicator_levels(v: &VertexPredicate, base: usize, n: usize) -> Option<Vec<bool>> {
    match v {
        VertexPredicate::Levels(set) => Some((0..=n).map(|j| set.contains(base + j)).collect()),
        _ => None,
    }
}

/// Witness lower bound for the tree-Banach density of V:
/// (1/(n+1)) sum_{l(w) <= n} tau^v(w) 1_V(vw), maximized over the supplied
/// root shifts v. Exact rational; requires tau to have positive dimension.
pub fn banach_density_witness(
    tau: &FiniteStateMarkovTree,
    v_pred: &VertexPredicate,
    vertices: &[Vec<u8>],
    n: usize,
) -> Result<WitnessResult> {
    if vertices.is_empty() {
        return Err(Error::InvalidParameter("need at least one base vertex".into()));
    }
    let dim = markov_dim(tau, 20.max(n))?;
    let positive = dim.exact.map(|e| e > 1e-12).unwrap_or(dim.estimate > 1e-12);
    if !positive {
        return Err(Error::InvalidMarkovTree(
            "witness requires a Markov tree of positive dimension".into(),
        ));
    }
    let auto = tau.automaton();
    let mut best: Option<WitnessResult> = None;
    for v in vertices {
        let cond = tau.conditional(v)?;
        let cauto = cond.automaton();
        let value = match v_pred {
            VertexPredicate::Levels(_) => {
                // Level masses are 1, so the sum counts member levels.
                let flags = indicator_levels(v_pred, v.len(), n).unwrap();
                let hits = flags.iter().filter(|&&b| b).count();
                rat(hits as i64, (n + 1) as i64)
            }
            VertexPredicate::States(sel) => {
                if sel.len() != auto.num_states() {
                    return Err(Error::InvalidParameter(
                        "state predicate length must match the automaton".into(),
                    ));
                }
                // The conditional chain reuses the same state space rebased
                // at state(v); push mass forward level by level.
                let ns = cauto.num_states();
                let mut mass = vec![Rat::zero(); ns];
                mass[cauto.root()] = Rat::one();
                let mut acc = Rat::zero();
                for j in 0..=n {
                    for (t, m) in mass.iter().enumerate() {
                        if sel[t] && !m.is_zero() {
                            acc += m;
                        }
                    }
                    if j == n {
                        break;
                    }
                    let mut next = vec![Rat::zero(); ns];
                    for t in 0..ns {
                        if mass[t].is_zero() {
                            continue;
                        }
                        for a in cond.support_letters(t) {
                            let tgt = cauto.delta(t, a).unwrap();
                            next[tgt] += &mass[t] * cond.prob(t, a);
                        }
                    }
                    mass = next;
                }
                acc / rat((n + 1) as i64, 1)
            }
            VertexPredicate::Explicit(words) => {
                let mut acc = Rat::zero();
                for j in 0..=n {
                    for w in cond.support_words(j) {
                        let mut vw = v.clone();
                        vw.extend_from_slice(&w);
                        if words.contains(&vw) {
                            acc += cond.weight(&w);
                        }
                    }
                }
                acc / rat((n + 1) as i64, 1)
            }
        };
        if best.as_ref().map(|b| value > b.value).unwrap_or(true) {
            best = Some(WitnessResult { value, vertex: v.clone() });
        }
    }
    Ok(best.unwrap())
}
