//! Minkowski dimension of finite-state trees and dimension of Markov trees.

use crate::cp::{build_cp_chain, FiniteStateMarkovTree};
use crate::rational::{big_log_q, rat_to_f64};
use crate::treespec::{AutomatonTree, TreeSpec};
use crate::{Error, Result};
use num::Zero;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimMode {
    Exact,
    Estimate(usize),
}

/// Dimension value with its provenance: exact closed form or the sequence
/// log_q |T(n)| / n it was estimated from.
#[derive(Debug, Clone)]
pub struct DimResult {
    pub value: f64,
    pub exact: bool,
    pub sequence: Vec<f64>,
}

/// Index of primitivity of a strongly connected graph: gcd of cycle lengths,
/// computed from BFS level differences along edges.
fn graph_period(auto: &AutomatonTree) -> usize {
    let mut level = vec![usize::MAX; auto.num_states()];
    level[auto.root()] = 0;
    let mut queue = std::collections::VecDeque::from([auto.root()]);
    let mut g: usize = 0;
    while let Some(s) = queue.pop_front() {
        for a in auto.letters(s) {
            let t = auto.delta(s, a).unwrap();
            if level[t] == usize::MAX {
                level[t] = level[s] + 1;
                queue.push_back(t);
            } else {
                let diff = (level[s] as i64 + 1 - level[t] as i64).unsigned_abs() as usize;
                g = num::integer::gcd(g, diff);
            }
        }
    }
    if g == 0 {
        1
    } else {
        g
    }
}

/// Perron eigenvalue of the letter-count matrix of a strongly connected
/// automaton. Power iteration from the all-ones vector with residual 1e-12
/// and a 10000-iteration cap; each outer step applies the matrix once per
/// unit of the graph period so periodic spectra do not oscillate.
fn perron_eigenvalue(auto: &AutomatonTree) -> f64 {
    let h = graph_period(auto);
    let m = auto.letter_count_matrix();
    let n = auto.num_states();
    let mut v = vec![1.0f64; n];
    let mut est = 0.0f64;
    for _ in 0..10_000 {
        let mut w = v.clone();
        for _ in 0..h {
            let mut next = vec![0.0; n];
            for s in 0..n {
                for t in 0..n {
                    if m[s][t] > 0 {
                        next[s] += m[s][t] as f64 * w[t];
                    }
                }
            }
            w = next;
        }
        let norm_v: f64 = v.iter().sum();
        let norm_w: f64 = w.iter().sum();
        let new_est = (norm_w / norm_v).powf(1.0 / h as f64);
        for x in w.iter_mut() {
            *x /= norm_w;
        }
        let done = (new_est - est).abs() < 1e-13;
        est = new_est;
        v = w;
        if done {
            break;
        }
    }
    est
}

/// Minkowski dimension: exact closed forms for profiles and strongly
/// connected automata, level-count estimates otherwise.
pub fn minkowski_dim(tree: &TreeSpec, mode: DimMode) -> Result<DimResult> {
    match mode {
        DimMode::Exact => match tree {
            TreeSpec::Profile(t) => {
                // The level-count growth averages log_q s(j) over one period.
                let logq = (t.q() as f64).ln();
                let value = t
                    .splitting()
                    .period()
                    .iter()
                    .map(|&s| (s as f64).ln() / logq)
                    .sum::<f64>()
                    / t.splitting().period_len() as f64;
                Ok(DimResult { value, exact: true, sequence: vec![] })
            }
            TreeSpec::Automaton(a) => {
                if !a.is_strongly_connected() {
                    return Err(Error::Unsupported(
                        "exact dimension needs a strongly connected automaton; use estimate mode"
                            .into(),
                    ));
                }
                let lambda = perron_eigenvalue(a);
                Ok(DimResult {
                    value: lambda.ln() / (a.q() as f64).ln(),
                    exact: true,
                    sequence: vec![],
                })
            }
            TreeSpec::Explicit(_) => Err(Error::Unsupported(
                "explicit truncations only support estimate mode".into(),
            )),
        },
        DimMode::Estimate(depth) => {
            if depth < 2 {
                return Err(Error::InvalidParameter("estimate depth must be >= 2".into()));
            }
            let q = tree.q();
            let mut sequence = Vec::new();
            let mut best = 0.0f64;
            for n in depth / 2..=depth {
                let count = tree.level_count(n)?;
                if count.is_zero() {
                    return Err(Error::InvalidSpec("empty level in pruned tree".into()));
                }
                let v = big_log_q(&count, q) / n as f64;
                sequence.push(v);
                best = best.max(v);
            }
            Ok(DimResult { value: best, exact: false, sequence })
        }
    }
}

/// Entropy-rate dimension of a Markov tree: H_n/n along level sections, with
/// the exact stationary entropy rate attached when the chain is ergodic.
#[derive(Debug, Clone)]
pub struct MarkovDimResult {
    pub estimate: f64,
    pub sequence: Vec<f64>,
    pub exact: Option<f64>,
}

pub fn markov_dim(tau: &FiniteStateMarkovTree, horizon: usize) -> Result<MarkovDimResult> {
    if horizon < 1 {
        return Err(Error::InvalidParameter("horizon must be >= 1".into()));
    }
    let auto = tau.automaton();
    let n_states = auto.num_states();
    let logq = (tau.q() as f64).ln();
    // p[t]: mass of level-n vertices in state t; e[t]: their entropy term
    // -Σ τ(v) log_q τ(v).
    let mut p = vec![0.0f64; n_states];
    let mut e = vec![0.0f64; n_states];
    p[auto.root()] = 1.0;
    let mut hs = Vec::with_capacity(horizon);
    for _ in 1..=horizon {
        let mut np = vec![0.0; n_states];
        let mut ne = vec![0.0; n_states];
        for t in 0..n_states {
            if p[t] == 0.0 && e[t] == 0.0 {
                continue;
            }
            for a in tau.support_letters(t) {
                let tgt = auto.delta(t, a).unwrap();
                let pr = rat_to_f64(tau.prob(t, a));
                np[tgt] += p[t] * pr;
                ne[tgt] += pr * e[t] + p[t] * pr * (-pr.ln() / logq);
            }
        }
        p = np;
        e = ne;
        hs.push(e.iter().sum::<f64>());
    }
    let tail_start = horizon / 2;
    let estimate = hs
        .iter()
        .enumerate()
        .skip(tail_start)
        .map(|(i, h)| h / (i + 1) as f64)
        .fold(f64::INFINITY, f64::min);
    let chain = build_cp_chain(tau);
    let exact = chain.is_ergodic().then(|| chain.entropy());
    let sequence = hs
        .iter()
        .enumerate()
        .map(|(i, h)| h / (i + 1) as f64)
        .collect();
    Ok(MarkovDimResult { estimate, sequence, exact })
}
