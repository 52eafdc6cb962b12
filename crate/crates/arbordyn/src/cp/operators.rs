//! The Markov operator P and the shift S on chain functions.
//!
//! Functions live on finite history windows: a depth-d function reads the
//! last d states (s_{-(d-1)}, ..., s_0) of the stationary chain. P averages
//! over the next state and shortens the window; S forgets the newest state
//! and lengthens it. On these spaces PS = I, P and S are adjoint in
//! L²(π-path measure), and P(f·Sg) = g·Pf hold exactly.

use super::chain::CPChain;
use crate::rational::{rat_to_f64, rat_zero, Rat};
use crate::{Error, Result};
use num::Zero;
use std::collections::BTreeMap;

/// A function of the last `depth` chain states, stored on admissible paths
/// (consecutive states joined by positive kernel entries). Paths are ordered
/// oldest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainFunction {
    depth: usize,
    values: BTreeMap<Vec<usize>, Rat>,
}

/// Enumerates admissible paths of a given length.
fn paths(chain: &CPChain, depth: usize) -> Vec<Vec<usize>> {
    assert!(depth >= 1);
    let mut out: Vec<Vec<usize>> = (0..chain.len()).map(|s| vec![s]).collect();
    for _ in 1..depth {
        let mut next = Vec::new();
        for p in &out {
            let last = *p.last().unwrap();
            for t in 0..chain.len() {
                if !chain.kernel_entry(last, t).is_zero() {
                    let mut e = p.clone();
                    e.push(t);
                    next.push(e);
                }
            }
        }
        out = next;
    }
    out
}

impl ChainFunction {
    /// A state function: depth-1 window.
    pub fn from_state_values(chain: &CPChain, values: &[Rat]) -> Result<Self> {
        if values.len() != chain.len() {
            return Err(Error::InvalidParameter("state-function length mismatch".into()));
        }
        // Zeros are never stored, so map equality is pointwise equality.
        Ok(Self {
            depth: 1,
            values: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(s, v)| (vec![s], v.clone()))
                .collect(),
        })
    }

    pub fn indicator(chain: &CPChain, set: &[bool]) -> Self {
        let values: Vec<Rat> = set
            .iter()
            .map(|&b| if b { Rat::from_integer(1.into()) } else { rat_zero() })
            .collect();
        Self::from_state_values(chain, &values).expect("set length matches")
    }

    pub fn constant(chain: &CPChain, v: Rat) -> Self {
        let values = vec![v; chain.len()];
        Self::from_state_values(chain, &values).expect("lengths match")
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn value(&self, path: &[usize]) -> Rat {
        assert_eq!(path.len(), self.depth);
        self.values.get(path).cloned().unwrap_or_else(rat_zero)
    }

    /// Values as a state function; only valid at depth 1.
    pub fn state_values(&self, chain: &CPChain) -> Result<Vec<Rat>> {
        if self.depth != 1 {
            return Err(Error::InvalidParameter(format!(
                "depth {} function is not a state function",
                self.depth
            )));
        }
        Ok((0..chain.len()).map(|s| self.value(&[s])).collect())
    }

    /// Reinterprets the function at a larger depth, ignoring older states.
    pub fn lift(&self, chain: &CPChain, depth: usize) -> Self {
        assert!(depth >= self.depth);
        if depth == self.depth {
            return self.clone();
        }
        let values = paths(chain, depth)
            .into_iter()
            .map(|p| {
                let v = self.value(&p[depth - self.depth..]);
                (p, v)
            })
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Self { depth, values }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.values().all(|v| *v >= rat_zero())
    }
}

/// (Pf)(s_{-(d-2)},...,s_0) = Σ_t K(s_0, t) f(s_{-(d-2)},...,s_0,t).
pub fn apply_p(chain: &CPChain, f: &ChainFunction) -> ChainFunction {
    let d = f.depth;
    if d == 1 {
        // Depth stays 1: classic kernel action on state functions.
        let values: Vec<Rat> = (0..chain.len())
            .map(|s| {
                (0..chain.len())
                    .map(|t| chain.kernel_entry(s, t).clone() * f.value(&[t]))
                    .sum()
            })
            .collect();
        return ChainFunction::from_state_values(chain, &values).expect("lengths match");
    }
    let values = paths(chain, d - 1)
        .into_iter()
        .map(|p| {
            let last = *p.last().unwrap();
            let v: Rat = (0..chain.len())
                .filter(|&t| !chain.kernel_entry(last, t).is_zero())
                .map(|t| {
                    let mut e = p.clone();
                    e.push(t);
                    chain.kernel_entry(last, t).clone() * f.value(&e)
                })
                .sum();
            (p, v)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect();
    ChainFunction { depth: d - 1, values }
}

/// (Sf)(s_{-d},...,s_0) = f(s_{-d},...,s_{-1}): forget the newest state.
pub fn apply_s(chain: &CPChain, f: &ChainFunction) -> ChainFunction {
    let d = f.depth;
    let values = paths(chain, d + 1)
        .into_iter()
        .map(|p| {
            let v = f.value(&p[..d]);
            (p, v)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect();
    ChainFunction { depth: d + 1, values }
}

/// Pointwise product after lifting to a common depth.
pub fn multiply(chain: &CPChain, f: &ChainFunction, g: &ChainFunction) -> ChainFunction {
    let depth = f.depth.max(g.depth);
    let lf = f.lift(chain, depth);
    let lg = g.lift(chain, depth);
    let values = lf
        .values
        .iter()
        .filter_map(|(p, v)| {
            let w = lg.value(p);
            if w.is_zero() {
                None
            } else {
                Some((p.clone(), v.clone() * w))
            }
        })
        .collect();
    ChainFunction { depth, values }
}

/// Path weight: π at the oldest state times the kernel along the path.
fn path_weight(chain: &CPChain, path: &[usize]) -> Rat {
    let mut w = chain.stationary()[path[0]].clone();
    for pair in path.windows(2) {
        if w.is_zero() {
            return w;
        }
        w *= chain.kernel_entry(pair[0], pair[1]).clone();
    }
    w
}

/// ⟨f, g⟩ in L² of the stationary path measure, exact.
pub fn inner_product(chain: &CPChain, f: &ChainFunction, g: &ChainFunction) -> Rat {
    let depth = f.depth.max(g.depth);
    let lf = f.lift(chain, depth);
    let lg = g.lift(chain, depth);
    paths(chain, depth)
        .into_iter()
        .map(|p| path_weight(chain, &p) * lf.value(&p) * lg.value(&p))
        .sum()
}

/// L² norm in double precision (the squared norm is exact).
pub fn l2_norm(chain: &CPChain, f: &ChainFunction) -> f64 {
    rat_to_f64(&inner_product(chain, f, f)).sqrt()
}

pub fn subtract(chain: &CPChain, f: &ChainFunction, g: &ChainFunction) -> ChainFunction {
    let depth = f.depth.max(g.depth);
    let lf = f.lift(chain, depth);
    let lg = g.lift(chain, depth);
    let mut values = lf.values.clone();
    for (p, v) in &lg.values {
        let e = values.entry(p.clone()).or_insert_with(rat_zero);
        *e -= v.clone();
    }
    values.retain(|_, v| !v.is_zero());
    ChainFunction { depth, values }
}

/// Conditional expectation of a state function onto the shift-invariant
/// algebra: the π-weighted average over each recurrent class, extended to
/// transient states by absorption probabilities.
pub fn project_invariant(chain: &CPChain, f: &ChainFunction) -> Result<ChainFunction> {
    let fv = f.state_values(chain)?;
    let n = chain.len();
    let mut result = vec![rat_zero(); n];
    let mut assigned = vec![false; n];
    let mut class_avgs = Vec::new();
    for (c, class) in chain.recurrent_classes().iter().enumerate() {
        let pi = chain.class_stationary(c);
        let avg: Rat = class.iter().map(|&s| pi[s].clone() * fv[s].clone()).sum();
        for &s in class {
            result[s] = avg.clone();
            assigned[s] = true;
        }
        class_avgs.push(avg);
    }
    // Transient states: absorption-weighted mix of class averages, obtained
    // by iterating the kernel until the transient mass is gone. Finite
    // chains reach a fixed point once every path is absorbed; iterate n
    // times past the longest transient path via linear solve instead.
    if assigned.iter().any(|a| !a) {
        // h_c via the same elimination the chain builder uses is not stored;
        // recompute by solving (I - K_TT) x = K_TR * avg_on_R.
        let transient: Vec<usize> = (0..n).filter(|&s| !assigned[s]).collect();
        let m = transient.len();
        let mut a = vec![vec![rat_zero(); m]; m];
        let mut b = vec![rat_zero(); m];
        let t_index: BTreeMap<usize, usize> =
            transient.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        for (row, &s) in transient.iter().enumerate() {
            a[row][row] += Rat::from_integer(1.into());
            for t in 0..n {
                let p = chain.kernel_entry(s, t);
                if p.is_zero() {
                    continue;
                }
                if let Some(&col) = t_index.get(&t) {
                    a[row][col] -= p.clone();
                } else {
                    b[row] += p.clone() * result[t].clone();
                }
            }
        }
        let x = super::chain::solve_rational(a, b);
        for (i, &s) in transient.iter().enumerate() {
            result[s] = x[i].clone();
        }
    }
    ChainFunction::from_state_values(chain, &result)
}
