//! Affine configuration embeddings and generic-parameter sets.

use crate::arith;
use crate::rational::rat_string;
use crate::treespec::{Configuration, EventuallyPeriodicSet, ExplicitTree, ProfileTree, TreeSpec};
use crate::{Error, Result};
use itertools::Itertools;
use num::Zero;
use std::collections::{BTreeMap, BTreeSet};

/// An affine embedding of a configuration at base vertex v with parameter m:
/// the root maps to v, levels scale by m, and meets are preserved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingWitness {
    pub assignment: BTreeMap<Vec<u8>, Vec<u8>>,
    pub m: usize,
    pub base: Vec<u8>,
}

impl EmbeddingWitness {
    /// Checks the witness against the pairwise definition: correct levels
    /// and meet preservation for every pair of configuration words.
    pub fn validate(&self, tree: &TreeSpec, config: &Configuration) -> Result<()> {
        let base_level = self.base.len();
        for w in config.words() {
            let img = self
                .assignment
                .get(w)
                .ok_or_else(|| Error::InvalidSpec("missing image".into()))?;
            if img.len() != base_level + self.m * w.len() {
                return Err(Error::InvalidSpec("image level mismatch".into()));
            }
            if !tree.contains(img) {
                return Err(Error::InvalidSpec("image outside the tree".into()));
            }
        }
        let meet = |a: &[u8], b: &[u8]| -> Vec<u8> {
            a.iter()
                .zip(b)
                .take_while(|(x, y)| x == y)
                .map(|(x, _)| *x)
                .collect()
        };
        let words: Vec<&[u8]> = config.words().collect();
        for (w1, w2) in words.iter().copied().tuple_combinations() {
            let m12 = meet(w1, w2);
            let img_meet = self.assignment.get(m12.as_slice()).unwrap();
            let meet_img = meet(&self.assignment[w1], &self.assignment[w2]);
            if *img_meet != meet_img {
                return Err(Error::InvalidSpec("meet not preserved".into()));
            }
        }
        Ok(())
    }
}

/// Searches for an embedding of C at v with parameter m.
///
/// Distinct children of a configuration vertex w are mapped through distinct
/// children of the image of w; this structural rule is equivalent to pairwise
/// meet preservation for prefix-closed C. Equivalence: if children w·a, w·b
/// go through distinct branches at the image u of w, the meet of any two
/// images from different branches is exactly u, matching the meet w of the
/// configuration words; meets of words in the same branch reduce by
/// induction below that branch. Conversely a meet-preserving map must send
/// w·a and w·b through distinct branches, else their images would meet
/// strictly below u while the words meet at w. Tested against the pairwise
/// oracle over the fixture corpus.
pub fn appears_at(
    tree: &TreeSpec,
    config: &Configuration,
    v: &[u8],
    m: usize,
) -> Result<Option<EmbeddingWitness>> {
    if !tree.contains(v) {
        return Err(Error::NotInTree(format!("{v:?}")));
    }
    if config.q() > tree.q() {
        return Err(Error::InvalidParameter(
            "configuration alphabet exceeds the tree alphabet".into(),
        ));
    }
    let height = config.height();
    if let TreeSpec::Explicit(t) = tree {
        if v.len() + m * height > t.depth() {
            return Err(Error::HorizonExceeded(format!(
                "need depth {}, truncation has {}",
                v.len() + m * height,
                t.depth()
            )));
        }
    }
    if m == 0 {
        let assignment = config.words().map(|w| (w.to_vec(), v.to_vec())).collect();
        return Ok(Some(EmbeddingWitness { assignment, m: 0, base: v.to_vec() }));
    }

    // Places the subconfiguration below w at image u; child subtrees are
    // disjoint, so each child resolves independently once its branch letter
    // and connecting path are fixed.
    fn place(
        tree: &TreeSpec,
        config: &Configuration,
        m: usize,
        w: &[u8],
        u: &[u8],
        out: &mut BTreeMap<Vec<u8>, Vec<u8>>,
    ) -> bool {
        out.insert(w.to_vec(), u.to_vec());
        let kids = config.children(w);
        if kids.is_empty() {
            return true;
        }
        let letters = tree.children(u).expect("image stays inside the tree");
        if letters.len() < kids.len() {
            out.remove(w);
            return false;
        }
        // Lexicographic first witness: ordered selections of distinct
        // branch letters, then lexicographic connecting paths.
        for combo in letters.iter().permutations(kids.len()) {
            let mut ok = true;
            let snapshot = out.clone();
            for (kid_letter, branch) in kids.iter().zip(&combo) {
                let mut wc = w.to_vec();
                wc.push(*kid_letter);
                let mut uc = u.to_vec();
                uc.push(**branch);
                // Extend by m-1 more levels, trying paths in lex order.
                let mut placed = false;
                let mut stack = vec![uc];
                while let Some(cand) = stack.pop() {
                    if cand.len() == u.len() + m {
                        if place(tree, config, m, &wc, &cand, out) {
                            placed = true;
                            break;
                        }
                    } else {
                        for a in tree.children(&cand).expect("inside tree").into_iter().rev() {
                            let mut next = cand.clone();
                            next.push(a);
                            stack.push(next);
                        }
                    }
                }
                if !placed {
                    ok = false;
                    break;
                }
            }
            if ok {
                return true;
            }
            *out = snapshot;
        }
        out.remove(w);
        false
    }

    let mut assignment = BTreeMap::new();
    if place(tree, config, m, &[], v, &mut assignment) {
        Ok(Some(EmbeddingWitness { assignment, m, base: v.to_vec() }))
    } else {
        Ok(None)
    }
}

/// Levels j of a profile tree whose vertices host C with parameter m.
/// Membership depends only on the level: the subtree below any level-j
/// vertex is the shifted profile tree, so j qualifies exactly when every
/// non-leaf configuration vertex w finds enough branches at its image level,
/// s(j + m l(w)) >= #children(w).
pub fn config_level_set(
    tree: &ProfileTree,
    config: &Configuration,
    m: usize,
) -> Result<EventuallyPeriodicSet> {
    if config.q() > tree.q() {
        return Err(Error::InvalidParameter(
            "configuration alphabet exceeds the tree alphabet".into(),
        ));
    }
    if m == 0 {
        return Ok(EventuallyPeriodicSet::full());
    }
    let demands: Vec<(usize, u8)> = config
        .words()
        .filter(|w| !config.is_leaf(w))
        .map(|w| (m * w.len(), config.children(w).len() as u8))
        .collect();
    let pre = tree.splitting().preperiod_len();
    let p = tree.splitting().period_len();
    Ok(EventuallyPeriodicSet::from_fn(pre, p, |j| {
        demands.iter().all(|&(off, need)| tree.s(j + off) >= need)
    }))
}

/// Parameters m <= m_max whose base-vertex set has positive density.
#[derive(Debug, Clone)]
pub struct GenericParams {
    pub params: Vec<usize>,
    pub exact: bool,
    pub certificates: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenericMode {
    Upper,
    Banach,
}

/// Generic parameters of C in T. Exact for profile trees through the level
/// criterion; finite-depth witness search otherwise, flagged as an estimate.
pub fn generic_params(
    tree: &TreeSpec,
    config: &Configuration,
    mode: GenericMode,
    m_max: usize,
    depth: usize,
) -> Result<GenericParams> {
    if m_max < 1 {
        return Err(Error::InvalidParameter("m_max must be >= 1".into()));
    }
    match tree {
        TreeSpec::Profile(t) => {
            let mut params = Vec::new();
            let mut certificates = Vec::new();
            for m in 0..=m_max {
                let levels = config_level_set(t, config, m)?;
                let d = arith::densities(&levels);
                let val = match mode {
                    GenericMode::Upper => d.upper,
                    GenericMode::Banach => d.banach,
                };
                if !val.is_zero() {
                    params.push(m);
                    certificates.push(format!(
                        "levels {} density {}",
                        levels.describe(),
                        rat_string(&val)
                    ));
                }
            }
            Ok(GenericParams { params, exact: true, certificates })
        }
        _ => {
            let height = config.height();
            let mut params = Vec::new();
            let mut certificates = Vec::new();
            for m in 0..=m_max {
                if m * height > depth {
                    break;
                }
                let limit = depth - m * height;
                let mut found = None;
                'scan: for v in tree.words_up_to(limit)? {
                    if appears_at(tree, config, &v, m)?.is_some() {
                        found = Some(v);
                        break 'scan;
                    }
                }
                if let Some(v) = found {
                    params.push(m);
                    certificates.push(format!("witness at {v:?}"));
                }
            }
            Ok(GenericParams { params, exact: false, certificates })
        }
    }
}

/// Exhaustive pairwise-definition oracle: every level-respecting map is
/// enumerated and checked for meet preservation directly.
pub fn brute_force_oracle(
    tree: &ExplicitTree,
    config: &Configuration,
    m: usize,
) -> Result<BTreeSet<Vec<u8>>> {
    let height = config.height();
    let spec = TreeSpec::Explicit(tree.clone());
    let words: Vec<Vec<u8>> = tree.words().map(|w| w.to_vec()).collect();
    let cwords: BTreeSet<Vec<u8>> = config.words().map(|w| w.to_vec()).collect();
    let mut result = BTreeSet::new();
    for v in &words {
        if v.len() + m * height > tree.depth() {
            continue;
        }
        if search_maps(&spec, config, &cwords, v, m) {
            result.insert(v.clone());
        }
    }
    Ok(result)
}

fn search_maps(
    tree: &TreeSpec,
    config: &Configuration,
    cwords: &BTreeSet<Vec<u8>>,
    v: &[u8],
    m: usize,
) -> bool {
    // Assign images in word order (parents precede children in a
    // prefix-closed set under the BTreeSet order only within equal lengths,
    // so sort by length first).
    let mut order: Vec<&Vec<u8>> = cwords.iter().collect();
    order.sort_by_key(|w| w.len());

    fn extensions(tree: &TreeSpec, u: &[u8], m: usize) -> Vec<Vec<u8>> {
        let mut level = vec![u.to_vec()];
        for _ in 0..m {
            let mut next = Vec::new();
            for w in &level {
                for a in tree.children(w).expect("inside tree") {
                    let mut wc = w.clone();
                    wc.push(a);
                    next.push(wc);
                }
            }
            level = next;
        }
        level
    }

    fn meet(a: &[u8], b: &[u8]) -> Vec<u8> {
        a.iter()
            .zip(b)
            .take_while(|(x, y)| x == y)
            .map(|(x, _)| *x)
            .collect()
    }

    fn rec(
        tree: &TreeSpec,
        config: &Configuration,
        order: &[&Vec<u8>],
        idx: usize,
        m: usize,
        assignment: &mut BTreeMap<Vec<u8>, Vec<u8>>,
    ) -> bool {
        if idx == order.len() {
            return true;
        }
        let w = order[idx];
        let parent = &w[..w.len() - 1];
        let pu = assignment[parent].clone();
        'cand: for u in extensions(tree, &pu, m) {
            // Pairwise meet preservation against every earlier word; the
            // condition mentions only pairs, so checking each new word as
            // it lands is the same predicate with early exit.
            for prev in assignment.keys() {
                let im = assignment.get(meet(w, prev).as_slice()).unwrap();
                if *im != meet(&u, &assignment[prev.as_slice()]) {
                    continue 'cand;
                }
            }
            assignment.insert(w.clone(), u);
            if rec(tree, config, order, idx + 1, m, assignment) {
                return true;
            }
            assignment.remove(w);
        }
        false
    }

    let mut assignment = BTreeMap::new();
    assignment.insert(Vec::new(), v.to_vec());
    rec(tree, config, &order[1..], 0, m, &mut assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treespec::{make_configuration, make_named_tree, ConfigKind, NamedFamily};

    fn t3n() -> TreeSpec {
        TreeSpec::Profile(make_named_tree(NamedFamily::Multiples { k: 3 }, 2, 2).unwrap())
    }

    fn f2() -> Configuration {
        make_configuration(ConfigKind::F { r: 2 }, 2).unwrap()
    }

    #[test]
    fn appears_at_examples() {
        let w = appears_at(&t3n(), &f2(), &[], 3).unwrap().unwrap();
        w.validate(&t3n(), &f2()).unwrap();

        for m in 1..=10 {
            assert!(appears_at(&t3n(), &f2(), &[1], m).unwrap().is_none(), "m={m}");
        }

        let w = appears_at(&t3n(), &f2(), &[1], 0).unwrap().unwrap();
        w.validate(&t3n(), &f2()).unwrap();
        assert!(w.assignment.values().all(|u| u == &vec![1]));
    }

    #[test]
    fn level_set_examples() {
        let t = make_named_tree(NamedFamily::Multiples { k: 3 }, 2, 2).unwrap();
        assert_eq!(
            config_level_set(&t, &f2(), 3).unwrap(),
            EventuallyPeriodicSet::multiples(3).unwrap()
        );
        assert_eq!(
            config_level_set(&t, &f2(), 1).unwrap(),
            EventuallyPeriodicSet::empty()
        );
        let full = make_named_tree(NamedFamily::Multiples { k: 1 }, 2, 2).unwrap();
        let d22 = make_configuration(ConfigKind::D { r: 2, n: 2 }, 2).unwrap();
        for m in [0, 1, 2, 5] {
            assert_eq!(
                config_level_set(&full, &d22, m).unwrap(),
                EventuallyPeriodicSet::full()
            );
        }
    }

    #[test]
    fn level_set_matches_difference_set() {
        // For F^r the criterion reads j in E_r and j+m in E_r.
        let t = make_named_tree(NamedFamily::Eps { k: 2, big_n: 4 }, 2, 2).unwrap();
        let e2 = t.levels_with_split_at_least(2);
        for m in 1..=9 {
            let ls = config_level_set(&t, &f2(), m).unwrap();
            let expected = e2.intersect(&e2.shift_back(m));
            assert_eq!(ls, expected, "m={m}");
        }
    }

    #[test]
    fn generic_param_examples() {
        let g = generic_params(&t3n(), &f2(), GenericMode::Upper, 12, 0).unwrap();
        assert!(g.exact);
        assert_eq!(g.params, vec![0, 3, 6, 9, 12]);

        let eps = TreeSpec::Profile(make_named_tree(NamedFamily::Eps { k: 2, big_n: 4 }, 2, 2).unwrap());
        let g = generic_params(&eps, &f2(), GenericMode::Banach, 8, 0).unwrap();
        assert_eq!(g.params, vec![0, 2, 4, 6, 8]);

        let full = TreeSpec::Profile(make_named_tree(NamedFamily::Multiples { k: 1 }, 2, 2).unwrap());
        let g = generic_params(&full, &f2(), GenericMode::Upper, 5, 0).unwrap();
        assert_eq!(g.params, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn oracle_examples() {
        let trunc = t3n().truncate(8).unwrap();
        let hits = brute_force_oracle(&trunc, &f2(), 3).unwrap();
        // Level criterion 3N intersected with the room constraint l(v) <= 2.
        assert_eq!(hits, BTreeSet::from([vec![]]));

        let root_only = Configuration::singleton_root(2).unwrap();
        let all: BTreeSet<Vec<u8>> = trunc.words().map(|w| w.to_vec()).collect();
        assert_eq!(brute_force_oracle(&trunc, &root_only, 4).unwrap(), all);

        let full = make_named_tree(NamedFamily::Multiples { k: 1 }, 2, 2)
            .unwrap()
            .to_automaton();
        let full = TreeSpec::Automaton(full).truncate(6).unwrap();
        let v223 = make_configuration(ConfigKind::V { r: 2, k: 2, n: 3 }, 2).unwrap();
        let hits = brute_force_oracle(&full, &v223, 1).unwrap();
        assert!(!hits.is_empty());
        assert!(hits.iter().all(|v| v.len() <= 2));
        assert_eq!(hits.iter().filter(|v| v.len() == 2).count(), 4);
    }

    #[test]
    fn search_agrees_with_oracle_on_corpus() {
        let trees: Vec<TreeSpec> = vec![
            t3n(),
            TreeSpec::Profile(make_named_tree(NamedFamily::Multiples { k: 1 }, 2, 2).unwrap()),
            TreeSpec::Profile(make_named_tree(NamedFamily::Eps { k: 2, big_n: 4 }, 2, 2).unwrap()),
            TreeSpec::Profile(make_named_tree(NamedFamily::Multiples { k: 2 }, 3, 2).unwrap()),
        ];
        let configs: Vec<Configuration> = vec![
            f2(),
            make_configuration(ConfigKind::D { r: 2, n: 2 }, 2).unwrap(),
            make_configuration(ConfigKind::D { r: 2, n: 3 }, 2).unwrap(),
            make_configuration(ConfigKind::V { r: 2, k: 2, n: 1 }, 2).unwrap(),
            Configuration::new(2, vec![vec![], vec![0], vec![0, 0]]).unwrap(),
        ];
        for tree in &trees {
            let depth = if tree.q() == 2 { 8 } else { 6 };
            let trunc = tree.truncate(depth).unwrap();
            let tspec = TreeSpec::Explicit(trunc.clone());
            for config in &configs {
                if config.q() > tree.q() {
                    continue;
                }
                let h = config.height();
                for m in 0..=3usize {
                    if m * h > depth {
                        continue;
                    }
                    let oracle = brute_force_oracle(&trunc, config, m).unwrap();
                    for v in trunc.words() {
                        if v.len() + m * h > depth {
                            continue;
                        }
                        let found = appears_at(&tspec, config, v, m).unwrap();
                        assert_eq!(
                            found.is_some(),
                            oracle.contains(v),
                            "tree q={} config h={} m={} v={:?}",
                            tree.q(),
                            h,
                            m,
                            v
                        );
                        if let Some(w) = found {
                            w.validate(&tspec, config).unwrap();
                        }
                        // Infinite-tree search must agree with the truncation.
                        let inf = appears_at(tree, config, v, m).unwrap();
                        assert_eq!(inf.is_some(), oracle.contains(v));
                    }
                }
            }
        }
    }

    #[test]
    fn monotone_under_subconfigurations() {
        let big = make_configuration(ConfigKind::D { r: 2, n: 2 }, 2).unwrap();
        let small = Configuration::new(2, vec![vec![], vec![0], vec![1], vec![0, 0]]).unwrap();
        let tree = t3n();
        for m in 0..=4 {
            for v in tree.words_up_to(3).unwrap() {
                if appears_at(&tree, &big, &v, m).unwrap().is_some() {
                    assert!(appears_at(&tree, &small, &v, m).unwrap().is_some());
                }
            }
        }
    }

    #[test]
    fn profile_level_criterion_matches_search() {
        let t = make_named_tree(NamedFamily::Eps { k: 2, big_n: 4 }, 2, 2).unwrap();
        let tree = TreeSpec::Profile(t.clone());
        let d22 = make_configuration(ConfigKind::D { r: 2, n: 2 }, 2).unwrap();
        for m in 1..=3usize {
            let ls = config_level_set(&t, &d22, m).unwrap();
            for level in 0..10usize {
                let v = vec![0u8; level].iter().map(|_| 0u8).collect::<Vec<_>>();
                if !tree.contains(&v) {
                    continue;
                }
                assert_eq!(
                    appears_at(&tree, &d22, &v, m).unwrap().is_some(),
                    ls.contains(level),
                    "m={m} level={level}"
                );
            }
        }
    }
}
