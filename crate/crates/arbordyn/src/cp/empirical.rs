//! Empirical distributions along level sections, and return-time sets of
//! chain state sets.

use super::chain::CPChain;
use crate::rational::{rat_to_f64, rat_zero, Int, Rat};
use crate::treespec::{EventuallyPeriodicSet, TreeSpec};
use crate::{Error, Result};
use num::{One, Zero};
use std::collections::BTreeMap;

/// μ_L: the average over levels 0..=L of the level-uniform distribution on
/// subtree states, with its entropy.
#[derive(Debug, Clone)]
pub struct EmpiricalDistribution {
    /// Mass per automaton state, summing to 1.
    pub state_weights: Vec<Rat>,
    pub entropy: f64,
}

/// Builds μ_L for a finite-state tree: weight each level-L vertex equally,
/// pull the weight back to ancestors, and average over levels 0..=L.
pub fn empirical_distribution(tree: &TreeSpec, level: usize) -> Result<EmpiricalDistribution> {
    let auto = tree.automaton()?;
    let n = auto.num_states();
    let q = auto.q() as f64;
    let logq = q.ln();

    // counts[j][t]: level-j vertices in state t.
    let mut counts = vec![vec![Int::zero(); n]];
    counts[0][auto.root()] = Int::one();
    for j in 0..level {
        let mut next = vec![Int::zero(); n];
        for t in 0..n {
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
    // desc[i][t]: words of length i below a state-t vertex.
    let mut desc = vec![vec![Int::one(); n]];
    for i in 0..level {
        let mut next = vec![Int::zero(); n];
        for t in 0..n {
            for a in auto.letters(t) {
                next[t] += &desc[i][auto.delta(t, a).unwrap()];
            }
        }
        desc.push(next);
        let _ = i;
    }
    let total = desc[level][auto.root()].clone();
    if total.is_zero() {
        return Err(Error::InvalidSpec("empty level section".into()));
    }

    let levels = Rat::from_integer(Int::from(level as u64 + 1));
    let mut weights = vec![rat_zero(); n];
    let mut entropy = 0.0;
    for (j, row) in counts.iter().enumerate() {
        let back = level - j;
        for t in 0..n {
            if row[t].is_zero() {
                continue;
            }
            let mass = Rat::new(row[t].clone() * desc[back][t].clone(), total.clone())
                / levels.clone();
            weights[t] += mass.clone();
            // Conditional letter entropy at this vertex: descendant-count
            // ratios below the horizon, uniform over letters at the horizon.
            let h: f64 = if back == 0 {
                (auto.letters(t).len() as f64).ln() / logq
            } else {
                auto.letters(t)
                    .iter()
                    .map(|&a| {
                        let child = auto.delta(t, a).unwrap();
                        let p = rat_to_f64(&Rat::new(
                            desc[back - 1][child].clone(),
                            desc[back][t].clone(),
                        ));
                        if p <= 0.0 {
                            0.0
                        } else {
                            -p * p.ln() / logq
                        }
                    })
                    .sum()
            };
            entropy += rat_to_f64(&mass) * h;
        }
    }
    Ok(EmpiricalDistribution { state_weights: weights, entropy })
}

/// Return times of a chain state set: exact correlations and the full
/// eventually periodic return set.
#[derive(Debug, Clone)]
pub struct ReturnTimesReport {
    /// ν(A ∩ S^{-n} A) for n = 0..=n_max.
    pub correlations: Vec<Rat>,
    /// { n : ν(A ∩ S^{-n} A) > 0 }, exact for all n.
    pub set: EventuallyPeriodicSet,
    pub preperiod: usize,
    pub period: usize,
}

/// Computes the return-time structure. Positivity of the correlation at lag
/// n depends only on the support of the n-step kernel, which is eventually
/// periodic in n; the repeat is found by direct enumeration of the boolean
/// support matrices.
pub fn return_times(chain: &CPChain, a: &[bool], n_max: usize) -> Result<ReturnTimesReport> {
    let n = chain.len();
    if a.len() != n {
        return Err(Error::InvalidParameter("state-set length mismatch".into()));
    }
    let support: Vec<Vec<bool>> = chain
        .kernel()
        .iter()
        .map(|row| row.iter().map(|p| !p.is_zero()).collect())
        .collect();
    let bool_mul = |x: &Vec<Vec<bool>>, y: &Vec<Vec<bool>>| -> Vec<Vec<bool>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).any(|k| x[i][k] && y[k][j]))
                    .collect()
            })
            .collect()
    };
    let identity: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();

    // Walk M^0, M^1, ... until a matrix repeats: preperiod + period found.
    let mut seen: BTreeMap<Vec<Vec<bool>>, usize> = BTreeMap::new();
    let mut mats: Vec<Vec<Vec<bool>>> = Vec::new();
    let mut m = identity;
    let (preperiod, period) = loop {
        if let Some(&first) = seen.get(&m) {
            break (first, mats.len() - first);
        }
        seen.insert(m.clone(), mats.len());
        mats.push(m.clone());
        m = bool_mul(&m, &support);
    };

    let positive_states: Vec<bool> = chain.stationary().iter().map(|p| !p.is_zero()).collect();
    let positive_at = |lag: usize| -> bool {
        let idx = if lag < preperiod + period {
            lag
        } else {
            preperiod + (lag - preperiod) % period
        };
        (0..n).any(|s| {
            a[s] && positive_states[s] && (0..n).any(|t| a[t] && mats[idx][s][t])
        })
    };
    let set = EventuallyPeriodicSet::from_fn(preperiod, period, positive_at);

    // Exact rational correlations up to n_max.
    let mut correlations = Vec::with_capacity(n_max + 1);
    let mut power: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { rat_zero() })
                .collect()
        })
        .collect();
    for _ in 0..=n_max {
        let c: Rat = (0..n)
            .filter(|&s| a[s])
            .map(|s| -> Rat {
                (0..n)
                    .filter(|&t| a[t])
                    .map(|t| chain.stationary()[s].clone() * power[s][t].clone())
                    .sum()
            })
            .sum();
        correlations.push(c);
        // power <- power * kernel
        power = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| power[i][k].clone() * chain.kernel_entry(k, j).clone())
                            .sum()
                    })
                    .collect()
            })
            .collect();
    }

    Ok(ReturnTimesReport { correlations, set, preperiod, period })
}
