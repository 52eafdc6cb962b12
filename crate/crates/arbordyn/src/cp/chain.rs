//! The finite chain induced by a Markov tree: states are (label, subtree
//! state) pairs, with exact rational kernel and stationary distributions.

use super::markov_tree::FiniteStateMarkovTree;
use crate::rational::{rat_to_f64, rat_zero, Rat};
use crate::{Error, Result};
use num::{One, Zero};
use std::collections::BTreeMap;

/// A chain state: the label of the last letter read and the automaton state
/// of the current subtree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ChainState {
    pub label: u8,
    pub auto_state: usize,
}

/// The CP-process of a finite-state Markov tree, as a finite Markov chain.
#[derive(Debug, Clone)]
pub struct CPChain {
    q: u8,
    states: Vec<ChainState>,
    kernel: Vec<Vec<Rat>>,
    /// Positive-probability letters of each state's subtree, with weights.
    letters: Vec<Vec<(u8, Rat)>>,
    /// Distribution after the first step from the root.
    initial: Vec<Rat>,
    recurrent_classes: Vec<Vec<usize>>,
    /// Stationary distribution per recurrent class (full-length vector).
    class_stationary: Vec<Vec<Rat>>,
    /// Default ν: class stationary distributions mixed by absorption
    /// probability from the initial distribution.
    stationary: Vec<Rat>,
}

/// Solves a square rational linear system by Gaussian elimination.
/// Panics on singular systems; callers only pass nonsingular ones.
pub(crate) fn solve_rational(mut a: Vec<Vec<Rat>>, mut b: Vec<Rat>) -> Vec<Rat> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("nonsingular system");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= inv.clone();
        }
        b[col] /= inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in 0..n {
                    let v = a[col][c].clone() * factor.clone();
                    a[r][c] -= v;
                }
                let v = b[col].clone() * factor;
                b[r] -= v;
            }
        }
    }
    b
}

/// Strongly connected components of a support graph, Tarjan-free iterative
/// Kosaraju. Returns components in arbitrary order.
fn sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // Iterative post-order.
        let mut stack = vec![(start, 0usize)];
        seen[start] = true;
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
                stack.pop();
            }
        }
    }
    let mut radj = vec![Vec::new(); n];
    for (v, outs) in adj.iter().enumerate() {
        for &w in outs {
            radj[w].push(v);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for &v in order.iter().rev() {
        if comp[v] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![v];
        comp[v] = id;
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &w in &radj[x] {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps
}

/// Builds the CP chain of a Markov tree: reachable (label, state) pairs, the
/// rational kernel, recurrent classes, and exact stationary distributions.
pub fn build_cp_chain(tree: &FiniteStateMarkovTree) -> CPChain {
    let auto = tree.automaton();
    let q = tree.q();

    // Discover reachable (label, state) pairs starting one step below the root.
    let mut index: BTreeMap<ChainState, usize> = BTreeMap::new();
    let mut states: Vec<ChainState> = Vec::new();
    let mut queue: Vec<usize> = Vec::new();
    let root = auto.root();
    for a in tree.support_letters(root) {
        let st = ChainState { label: a, auto_state: auto.delta(root, a).unwrap() };
        if !index.contains_key(&st) {
            index.insert(st, states.len());
            queue.push(states.len());
            states.push(st);
        }
    }
    let mut edges: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); states.len()];
    while let Some(i) = queue.pop() {
        let s = states[i].auto_state;
        for a in tree.support_letters(s) {
            let st = ChainState { label: a, auto_state: auto.delta(s, a).unwrap() };
            let j = *index.entry(st).or_insert_with(|| {
                states.push(st);
                edges.push(Vec::new());
                queue.push(states.len() - 1);
                states.len() - 1
            });
            edges[i].push((j, tree.prob(s, a).clone()));
        }
    }

    let n = states.len();
    let mut kernel = vec![vec![rat_zero(); n]; n];
    for (i, outs) in edges.iter().enumerate() {
        for (j, p) in outs {
            kernel[i][*j] = p.clone();
        }
    }
    let letters: Vec<Vec<(u8, Rat)>> = states
        .iter()
        .map(|st| {
            tree.support_letters(st.auto_state)
                .into_iter()
                .map(|a| (a, tree.prob(st.auto_state, a).clone()))
                .collect()
        })
        .collect();
    let mut initial = vec![rat_zero(); n];
    for a in tree.support_letters(root) {
        let st = ChainState { label: a, auto_state: auto.delta(root, a).unwrap() };
        initial[index[&st]] = tree.prob(root, a).clone();
    }

    // Recurrent classes: closed strongly connected components.
    let adj: Vec<Vec<usize>> = kernel
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let comps = sccs(&adj);
    let mut comp_of = vec![0usize; n];
    for (id, members) in comps.iter().enumerate() {
        for &v in members {
            comp_of[v] = id;
        }
    }
    let mut recurrent_classes: Vec<Vec<usize>> = comps
        .iter()
        .filter(|members| {
            members
                .iter()
                .all(|&v| adj[v].iter().all(|&w| comp_of[w] == comp_of[v]))
        })
        .cloned()
        .collect();
    recurrent_classes.sort();

    // Stationary distribution per class: solve πK = π, Σπ = 1 on the class.
    let class_stationary: Vec<Vec<Rat>> = recurrent_classes
        .iter()
        .map(|class| {
            let m = class.len();
            // Unknowns π_j for j in class; equations (K^T - I)π = 0 with the
            // last equation replaced by normalization.
            let mut a = vec![vec![rat_zero(); m]; m];
            let mut b = vec![rat_zero(); m];
            for (row, &t) in class.iter().enumerate().take(m - 1) {
                for (col, &s) in class.iter().enumerate() {
                    a[row][col] = kernel[s][t].clone();
                    if s == t {
                        a[row][col] -= Rat::one();
                    }
                }
            }
            for col in 0..m {
                a[m - 1][col] = Rat::one();
            }
            b[m - 1] = Rat::one();
            let pi = solve_rational(a, b);
            let mut full = vec![rat_zero(); n];
            for (k, &s) in class.iter().enumerate() {
                full[s] = pi[k].clone();
            }
            full
        })
        .collect();

    // Absorption probabilities from the initial distribution, per class.
    let recurrent_mask: Vec<bool> = {
        let mut mask = vec![false; n];
        for class in &recurrent_classes {
            for &s in class {
                mask[s] = true;
            }
        }
        mask
    };
    let transient: Vec<usize> = (0..n).filter(|&s| !recurrent_mask[s]).collect();
    let t_index: BTreeMap<usize, usize> = transient.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let class_weight: Vec<Rat> = recurrent_classes
        .iter()
        .map(|class| {
            // h(s) = P[absorbed in this class | start s].
            let mut h = vec![rat_zero(); n];
            for &s in class {
                h[s] = Rat::one();
            }
            if !transient.is_empty() {
                let m = transient.len();
                let mut a = vec![vec![rat_zero(); m]; m];
                let mut b = vec![rat_zero(); m];
                for (row, &s) in transient.iter().enumerate() {
                    a[row][row] = Rat::one();
                    for (t, p) in kernel[s].iter().enumerate() {
                        if p.is_zero() {
                            continue;
                        }
                        if let Some(&col) = t_index.get(&t) {
                            a[row][col] -= p.clone();
                        } else {
                            b[row] += p.clone() * h[t].clone();
                        }
                    }
                }
                let ht = solve_rational(a, b);
                for (i, &s) in transient.iter().enumerate() {
                    h[s] = ht[i].clone();
                }
            }
            initial
                .iter()
                .zip(&h)
                .map(|(p, hv)| p.clone() * hv.clone())
                .sum()
        })
        .collect();
    let mut stationary = vec![rat_zero(); n];
    for (w, pi) in class_weight.iter().zip(&class_stationary) {
        for (s, p) in pi.iter().enumerate() {
            stationary[s] += w.clone() * p.clone();
        }
    }

    CPChain {
        q,
        states,
        kernel,
        letters,
        initial,
        recurrent_classes,
        class_stationary,
        stationary,
    }
}

impl CPChain {
    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[ChainState] {
        &self.states
    }

    pub fn kernel(&self) -> &[Vec<Rat>] {
        &self.kernel
    }

    pub fn kernel_entry(&self, s: usize, t: usize) -> &Rat {
        &self.kernel[s][t]
    }

    pub fn initial(&self) -> &[Rat] {
        &self.initial
    }

    pub fn stationary(&self) -> &[Rat] {
        &self.stationary
    }

    pub fn recurrent_classes(&self) -> &[Vec<usize>] {
        &self.recurrent_classes
    }

    pub fn class_stationary(&self, class: usize) -> &[Rat] {
        &self.class_stationary[class]
    }

    pub fn is_ergodic(&self) -> bool {
        self.recurrent_classes.len() == 1
            && self.recurrent_classes[0].len() == self.states.len()
    }

    /// Positive-probability letters of the subtree at a state.
    pub fn state_letters(&self, s: usize) -> &[(u8, Rat)] {
        &self.letters[s]
    }

    /// B_i: states whose label is i.
    pub fn b_set(&self, i: u8) -> Vec<bool> {
        self.states.iter().map(|st| st.label == i).collect()
    }

    /// A_r: states whose subtree splits at least r ways. A_0 and A_1 are
    /// the whole space for pruned trees.
    pub fn a_set(&self, r: u8) -> Vec<bool> {
        self.letters
            .iter()
            .map(|ls| ls.len() >= r as usize)
            .collect()
    }

    /// A_r^δ: at least r letters of probability exceeding δ.
    pub fn a_set_threshold(&self, r: u8, delta: &Rat) -> Vec<bool> {
        self.letters
            .iter()
            .map(|ls| ls.iter().filter(|(_, p)| p > delta).count() >= r as usize)
            .collect()
    }

    /// Exact ν-measure of a state set.
    pub fn measure(&self, set: &[bool]) -> Rat {
        self.stationary
            .iter()
            .zip(set)
            .filter(|(_, inc)| **inc)
            .map(|(p, _)| p.clone())
            .sum()
    }

    /// The information function H(s): letter entropy of the subtree, base q.
    pub fn info(&self, s: usize) -> f64 {
        let logq = (self.q as f64).ln();
        self.letters[s]
            .iter()
            .map(|(_, p)| {
                let x = rat_to_f64(p);
                if x <= 0.0 {
                    0.0
                } else {
                    -x * x.ln() / logq
                }
            })
            .sum()
    }

    /// Stationary entropy H(ν) = Σ π(s) H(s).
    pub fn entropy(&self) -> f64 {
        self.stationary
            .iter()
            .enumerate()
            .map(|(s, p)| rat_to_f64(p) * self.info(s))
            .sum()
    }

    /// ν(A_r) plus the entropy lower-bound check
    /// ν(A_r) >= (H(ν) - log_q(r-1)) / (1 - log_q(r-1)).
    pub fn measure_of_splitting(&self, r: u8) -> Result<SplittingReport> {
        if r < 2 || r > self.q {
            return Err(Error::InvalidParameter(format!("need 2 <= r <= q, got {r}")));
        }
        let nu = self.measure(&self.a_set(r));
        let log_term = ((r - 1) as f64).ln() / (self.q as f64).ln();
        let bound = (self.entropy() - log_term) / (1.0 - log_term);
        let ok = rat_to_f64(&nu) >= bound - 1e-9;
        Ok(SplittingReport { nu_a_r: nu, bound, ok })
    }
}

/// ν(A_r) with the entropy bound it must dominate.
#[derive(Debug, Clone)]
pub struct SplittingReport {
    pub nu_a_r: Rat,
    pub bound: f64,
    pub ok: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cp::markov_tree::FiniteStateMarkovTree;
    use crate::rational::rat;
    use crate::treespec::{make_named_tree, AutomatonTree, NamedFamily};

    fn chain_of(k: usize, q: u8, r: u8) -> CPChain {
        let p = make_named_tree(NamedFamily::Multiples { k }, q, r).unwrap();
        build_cp_chain(&FiniteStateMarkovTree::uniform(p.to_automaton()))
    }

    #[test]
    fn t2_3n_chain_structure() {
        let c = chain_of(3, 2, 2);
        assert_eq!(c.len(), 4);
        assert!(c.is_ergodic());
        // π concentrates 1/3 on the splitting state, 1/3 on its successor
        // split across labels, 1/3 on the last cycle state.
        let pi: Vec<Rat> = c.stationary().to_vec();
        let total: Rat = pi.iter().cloned().sum();
        assert_eq!(total, rat(1, 1));
        assert_eq!(c.measure(&c.a_set(2)), rat(1, 3));
        assert!((c.entropy() - 1.0 / 3.0).abs() < 1e-12);
        let rep = c.measure_of_splitting(2).unwrap();
        assert!(rep.ok);
        assert!((rep.bound - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn full_binary_chain() {
        let c = chain_of(1, 2, 2);
        assert_eq!(c.len(), 2);
        assert_eq!(c.stationary(), &[rat(1, 2), rat(1, 2)]);
        assert!((c.entropy() - 1.0).abs() < 1e-15);
        assert_eq!(c.measure(&c.a_set(2)), rat(1, 1));
    }

    #[test]
    fn stationarity_is_exact() {
        for (k, q, r) in [(1, 2, 2), (2, 2, 2), (3, 2, 2), (2, 3, 2), (3, 4, 3), (4, 3, 3)] {
            let c = chain_of(k, q, r);
            let pi = c.stationary();
            for t in 0..c.len() {
                let lhs: Rat = (0..c.len()).map(|s| pi[s].clone() * c.kernel_entry(s, t).clone()).sum();
                assert_eq!(lhs, pi[t], "k={k} q={q} r={r} state {t}");
            }
        }
    }

    #[test]
    fn equality_family_nu_a3() {
        // q=4, r=3, E=2N: ν(A_3) = 1/2 meets the bound with equality.
        let p = make_named_tree(
            NamedFamily::E(crate::treespec::EventuallyPeriodicSet::multiples(2).unwrap()),
            4,
            3,
        )
        .unwrap();
        let c = build_cp_chain(&FiniteStateMarkovTree::uniform(p.to_automaton()));
        let rep = c.measure_of_splitting(3).unwrap();
        assert_eq!(rep.nu_a_r, rat(1, 2));
        assert!((rep.bound - 0.5).abs() < 1e-12);
        assert!(rep.ok);
    }

    #[test]
    fn reducible_chain_classes() {
        // Two branches from the root that never rejoin: state 1 cycles on
        // letter 0, state 2 cycles on letter 1.
        let auto = AutomatonTree::new(
            2,
            3,
            0,
            vec![
                vec![Some(1), Some(2)],
                vec![Some(1), None],
                vec![None, Some(2)],
            ],
        )
        .unwrap();
        let c = build_cp_chain(&FiniteStateMarkovTree::uniform(auto));
        assert_eq!(c.recurrent_classes().len(), 2);
        assert!(!c.is_ergodic());
        // Mixture weights are the 1/2-1/2 first-step split.
        let total: Rat = c.stationary().iter().cloned().sum();
        assert_eq!(total, rat(1, 1));
        for class in 0..2 {
            let sum: Rat = c.class_stationary(class).iter().cloned().sum();
            assert_eq!(sum, rat(1, 1));
        }
    }

    #[test]
    fn deterministic_branch_entropy_zero() {
        let auto = AutomatonTree::new(2, 1, 0, vec![vec![Some(0), Some(0)]]).unwrap();
        let point = FiniteStateMarkovTree::new(auto, vec![vec![rat(1, 1), rat(0, 1)]]).unwrap();
        let c = build_cp_chain(&point);
        assert_eq!(c.len(), 1);
        assert_eq!(c.entropy(), 0.0);
        assert_eq!(c.measure(&c.a_set(2)), rat(0, 1));
    }
}
