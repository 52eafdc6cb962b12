//! Configuration-detecting functions: recursive construction and exact
//! evaluation on CP-chains.

use crate::cp::{build_cp_chain, CPChain, FiniteStateMarkovTree};
use crate::embed;
use crate::rational::{rat, Int, Rat};
use crate::treespec::{Configuration, TreeSpec};
use crate::{Error, Result};
use itertools::Itertools;
use num::{One, Signed, Zero};

/// A reified detector expression. Label indicators only appear under a P
/// application, so evaluation at the root never consults the root's label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DetectorExpr {
    Const(Rat),
    /// 1_{B_i}: the last letter read is i.
    IndLabel(u8),
    /// 1_{A_r}: the subtree splits at least r ways.
    IndSplit(u8),
    /// 1_{A_r^delta}: at least r letters of probability exceeding delta.
    IndSplitThresh(u8, Rat),
    Prod(Vec<DetectorExpr>),
    Sum(Vec<DetectorExpr>),
    Scale(Rat, Box<DetectorExpr>),
    /// P^j applied to the inner expression.
    ApplyP(usize, Box<DetectorExpr>),
    /// The nonlinear operator R_{r,m}: sum over r-letter subsets I of
    /// prod_{i in I} P(1_{B_i} P^{m-1} f).
    ApplyR(u8, usize, Box<DetectorExpr>),
}

pub type StateFunction = Vec<Rat>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiVariant {
    Phi,
    PhiPrime,
    Varphi,
}

fn split_indicator(r: usize, delta: &Option<Rat>) -> DetectorExpr {
    if r < 2 {
        // Every state of a pruned tree has at least one letter.
        return DetectorExpr::Const(Rat::one());
    }
    match delta {
        Some(d) => DetectorExpr::IndSplitThresh(r as u8, d.clone()),
        None => DetectorExpr::IndSplit(r as u8),
    }
}

/// Builds the detector for C with parameter m.
///
/// The phi recursion is applied uniformly; the stated base cases fall out of
/// it: a leafless level-1 set gives an empty product and the leading split
/// indicator alone, and split indicators of order < 2 are constant 1.
pub fn build_phi(
    config: &Configuration,
    m: usize,
    variant: PhiVariant,
    delta: Option<Rat>,
) -> Result<DetectorExpr> {
    if m < 1 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    if let Some(d) = &delta {
        if d.is_negative() || *d >= Rat::one() {
            return Err(Error::InvalidParameter("delta must lie in [0, 1)".into()));
        }
    }
    let q = config.q();
    match variant {
        PhiVariant::Varphi => Ok(build_varphi(config, m, q)),
        PhiVariant::Phi => Ok(build_phi_rec(config, m, q, &delta)),
        PhiVariant::PhiPrime => build_phi_prime(config, m, &delta),
    }
}

fn build_varphi(config: &Configuration, m: usize, q: u8) -> DetectorExpr {
    let kids = config.children(&[]);
    if kids.is_empty() {
        return DetectorExpr::Const(Rat::one());
    }
    let subs: Vec<DetectorExpr> = kids
        .iter()
        .map(|&a| build_varphi(&config.subconfig(&[a]).expect("child exists"), m, q))
        .collect();
    let mut terms = Vec::new();
    for set in (0..q).combinations(kids.len()) {
        for perm in (0..kids.len()).permutations(kids.len()) {
            let factors: Vec<DetectorExpr> = set
                .iter()
                .zip(&perm)
                .map(|(&i, &kidx)| {
                    DetectorExpr::ApplyP(
                        1,
                        Box::new(DetectorExpr::Prod(vec![
                            DetectorExpr::IndLabel(i),
                            DetectorExpr::ApplyP(m - 1, Box::new(subs[kidx].clone())),
                        ])),
                    )
                })
                .collect();
            terms.push(DetectorExpr::Prod(factors));
        }
    }
    DetectorExpr::Sum(terms)
}

fn build_phi_rec(config: &Configuration, m: usize, q: u8, delta: &Option<Rat>) -> DetectorExpr {
    let kids = config.children(&[]);
    let n = kids.len();
    if n == 0 {
        return DetectorExpr::Const(Rat::one());
    }
    let branching: Vec<(u8, Configuration)> = kids
        .iter()
        .filter_map(|&a| {
            let sub = config.subconfig(&[a]).expect("child exists");
            sub.is_branching().then_some((a, sub))
        })
        .collect();
    let lead = split_indicator(n, delta);
    if branching.is_empty() {
        return lead;
    }
    let subs: Vec<DetectorExpr> = branching
        .iter()
        .map(|(_, sub)| build_phi_rec(sub, m, q, delta))
        .collect();
    let mut terms = Vec::new();
    for set in (0..q).combinations(branching.len()) {
        for perm in (0..branching.len()).permutations(branching.len()) {
            let factors: Vec<DetectorExpr> = set
                .iter()
                .zip(&perm)
                .map(|(&i, &kidx)| {
                    DetectorExpr::ApplyP(
                        1,
                        Box::new(DetectorExpr::Prod(vec![
                            DetectorExpr::IndLabel(i),
                            DetectorExpr::ApplyP(m - 1, Box::new(subs[kidx].clone())),
                        ])),
                    )
                })
                .collect();
            terms.push(DetectorExpr::Prod(factors));
        }
    }
    DetectorExpr::Prod(vec![lead, DetectorExpr::Sum(terms)])
}

fn build_phi_prime(config: &Configuration, m: usize, delta: &Option<Rat>) -> Result<DetectorExpr> {
    let kids = config.children(&[]);
    let n = kids.len();
    if n == 0 {
        return Ok(DetectorExpr::Const(Rat::one()));
    }
    let subs: Vec<Configuration> = kids
        .iter()
        .map(|&a| config.subconfig(&[a]).expect("child exists"))
        .collect();
    for sub in &subs[1..] {
        if !sub.is_isomorphic_to(&subs[0]) {
            return Err(Error::InvalidConfiguration(
                "phi_prime needs isomorphic child configurations".into(),
            ));
        }
    }
    if subs[0].len() == 1 {
        // All children are leaves: the appropriate split indicator.
        return Ok(split_indicator(n, delta));
    }
    let inner = build_phi_prime(&subs[0], m, delta)?;
    Ok(DetectorExpr::ApplyR(n as u8, m, Box::new(inner)))
}

fn matvec(kernel: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    kernel
        .iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(k, _)| !k.is_zero())
                .map(|(k, x)| k * x)
                .sum()
        })
        .collect()
}

fn mask_to_vec(mask: &[bool]) -> Vec<Rat> {
    mask.iter()
        .map(|&b| if b { Rat::one() } else { Rat::zero() })
        .collect()
}

fn apply_r_states(chain: &CPChain, r: u8, m: usize, f: &[Rat]) -> Vec<Rat> {
    let mut h = f.to_vec();
    for _ in 1..m {
        h = matvec(chain.kernel(), &h);
    }
    let per_letter: Vec<Vec<Rat>> = (0..chain.q())
        .map(|i| {
            let masked: Vec<Rat> = chain
                .b_set(i)
                .iter()
                .zip(&h)
                .map(|(&b, x)| if b { x.clone() } else { Rat::zero() })
                .collect();
            matvec(chain.kernel(), &masked)
        })
        .collect();
    let n = chain.len();
    let mut out = vec![Rat::zero(); n];
    for set in (0..chain.q() as usize).combinations(r as usize) {
        for s in 0..n {
            let mut prod = Rat::one();
            for &i in &set {
                prod *= &per_letter[i][s];
                if prod.is_zero() {
                    break;
                }
            }
            out[s] += prod;
        }
    }
    out
}

/// Exact evaluation as a function on chain states.
pub fn evaluate(expr: &DetectorExpr, chain: &CPChain) -> StateFunction {
    let n = chain.len();
    match expr {
        DetectorExpr::Const(c) => vec![c.clone(); n],
        DetectorExpr::IndLabel(i) => mask_to_vec(&chain.b_set(*i)),
        DetectorExpr::IndSplit(r) => mask_to_vec(&chain.a_set(*r)),
        DetectorExpr::IndSplitThresh(r, d) => mask_to_vec(&chain.a_set_threshold(*r, d)),
        DetectorExpr::Prod(es) => {
            let mut out = vec![Rat::one(); n];
            for e in es {
                for (o, x) in out.iter_mut().zip(evaluate(e, chain)) {
                    *o *= x;
                }
            }
            out
        }
        DetectorExpr::Sum(es) => {
            let mut out = vec![Rat::zero(); n];
            for e in es {
                for (o, x) in out.iter_mut().zip(evaluate(e, chain)) {
                    *o += x;
                }
            }
            out
        }
        DetectorExpr::Scale(c, e) => evaluate(e, chain)
            .into_iter()
            .map(|x| x * c)
            .collect(),
        DetectorExpr::ApplyP(j, e) => {
            let mut v = evaluate(e, chain);
            for _ in 0..*j {
                v = matvec(chain.kernel(), &v);
            }
            v
        }
        DetectorExpr::ApplyR(r, m, e) => {
            let v = evaluate(e, chain);
            apply_r_states(chain, *r, *m, &v)
        }
    }
}

/// Exact evaluation at the root of the Markov tree. The root is not a chain
/// state (it carries no incoming label), so P applications take one explicit
/// first step through the root's letter distribution.
pub fn evaluate_at_root(
    expr: &DetectorExpr,
    chain: &CPChain,
    tau: &FiniteStateMarkovTree,
) -> Result<Rat> {
    let auto = tau.automaton();
    let root = auto.root();
    let root_letters: Vec<(u8, Rat)> = tau
        .support_letters(root)
        .into_iter()
        .map(|a| (a, tau.prob(root, a).clone()))
        .collect();
    let state_index = |label: u8| -> usize {
        let target = auto.delta(root, label).unwrap();
        chain
            .states()
            .iter()
            .position(|st| st.label == label && st.auto_state == target)
            .expect("first-step state present in the chain")
    };
    let first_step = |v: &[Rat]| -> Rat {
        root_letters
            .iter()
            .map(|(a, p)| p * &v[state_index(*a)])
            .sum()
    };
    match expr {
        DetectorExpr::Const(c) => Ok(c.clone()),
        DetectorExpr::IndLabel(_) => Err(Error::InvalidSpec(
            "label indicator is undefined at the root".into(),
        )),
        DetectorExpr::IndSplit(r) => Ok(if root_letters.len() >= *r as usize {
            Rat::one()
        } else {
            Rat::zero()
        }),
        DetectorExpr::IndSplitThresh(r, d) => {
            Ok(if root_letters.iter().filter(|(_, p)| p > d).count() >= *r as usize {
                Rat::one()
            } else {
                Rat::zero()
            })
        }
        DetectorExpr::Prod(es) => {
            let mut out = Rat::one();
            for e in es {
                out *= evaluate_at_root(e, chain, tau)?;
            }
            Ok(out)
        }
        DetectorExpr::Sum(es) => {
            let mut out = Rat::zero();
            for e in es {
                out += evaluate_at_root(e, chain, tau)?;
            }
            Ok(out)
        }
        DetectorExpr::Scale(c, e) => Ok(evaluate_at_root(e, chain, tau)? * c),
        DetectorExpr::ApplyP(j, e) => {
            if *j == 0 {
                return evaluate_at_root(e, chain, tau);
            }
            let mut v = evaluate(e, chain);
            for _ in 1..*j {
                v = matvec(chain.kernel(), &v);
            }
            Ok(first_step(&v))
        }
        DetectorExpr::ApplyR(r, m, e) => {
            let v = evaluate(e, chain);
            let mut h = v;
            for _ in 1..*m {
                h = matvec(chain.kernel(), &h);
            }
            // P(1_{B_i} h) at the root only sees the branch labelled i.
            let per_letter: Vec<Rat> = (0..chain.q())
                .map(|i| {
                    root_letters
                        .iter()
                        .find(|(a, _)| *a == i)
                        .map(|(a, p)| p * &h[state_index(*a)])
                        .unwrap_or_else(Rat::zero)
                })
                .collect();
            let mut out = Rat::zero();
            for set in (0..chain.q() as usize).combinations(*r as usize) {
                let mut prod = Rat::one();
                for &i in &set {
                    prod *= &per_letter[i];
                    if prod.is_zero() {
                        break;
                    }
                }
                out += prod;
            }
            Ok(out)
        }
    }
}

/// Agreement between detector positivity at the root and the exhaustive
/// embedding oracle.
#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub phi_at_root: Rat,
    pub appears: bool,
    pub agree: bool,
}

pub fn soundness_check(
    tree: &TreeSpec,
    config: &Configuration,
    m: usize,
    tau: &FiniteStateMarkovTree,
) -> Result<SoundnessReport> {
    let depth = m * config.height();
    let trunc = tree.truncate(depth.max(1))?;
    let appears = embed::brute_force_oracle(&trunc, config, m)?.contains(&Vec::new());
    let chain = build_cp_chain(tau);
    let expr = build_phi(config, m, PhiVariant::Phi, None)?;
    let phi_at_root = evaluate_at_root(&expr, &chain, tau)?;
    let agree = (phi_at_root > Rat::zero()) == appears;
    Ok(SoundnessReport { phi_at_root, appears, agree })
}

/// Exact verification of the closed-chain identities used in the equality
/// analysis, on chains of the T^r_{kN} family.
#[derive(Debug, Clone)]
pub struct EqualityReport {
    /// prod_i P 1_{B_i} = q^{-q} 1_{A_q}.
    pub product_identity: bool,
    /// On the complement of A_r: sum over (r-1)-subsets of prod P 1_{B_i}
    /// equals (r-1)^{1-r}.
    pub complement_identity: bool,
    /// Positivity pattern of phi-prime for the nested split family, n <= 3.
    pub nested_positive: Vec<bool>,
}

pub fn equality_case_identities(chain: &CPChain, r: u8, k: usize) -> Result<EqualityReport> {
    let q = chain.q();
    if r < 2 || r > q {
        return Err(Error::InvalidParameter("need 2 <= r <= q".into()));
    }
    // prod_i P 1_{B_i}.
    let mut prod = vec![Rat::one(); chain.len()];
    for i in 0..q {
        let v = matvec(chain.kernel(), &mask_to_vec(&chain.b_set(i)));
        for (o, x) in prod.iter_mut().zip(v) {
            *o *= x;
        }
    }
    let c1 = rat(1, 1) / Rat::from(Int::from(q).pow(q as u32));
    let aq = chain.a_set(q);
    let product_identity = prod
        .iter()
        .zip(&aq)
        .all(|(x, &in_aq)| *x == if in_aq { c1.clone() } else { Rat::zero() });

    // Sum over (r-1)-subsets on the complement of A_r.
    let per_letter: Vec<Vec<Rat>> = (0..q)
        .map(|i| matvec(chain.kernel(), &mask_to_vec(&chain.b_set(i))))
        .collect();
    let mut sum = vec![Rat::zero(); chain.len()];
    for set in (0..q as usize).combinations(r as usize - 1) {
        for s in 0..chain.len() {
            let mut p = Rat::one();
            for &i in &set {
                p *= &per_letter[i][s];
            }
            sum[s] += p;
        }
    }
    let c2 = rat(1, 1) / Rat::from(Int::from(r - 1).pow(r as u32 - 1));
    let ar = chain.a_set(r);
    let complement_identity = sum
        .iter()
        .zip(&ar)
        .all(|(x, &in_ar)| in_ar || *x == c2);

    // phi-prime of the nested split configurations, m = 1: positive exactly
    // on the q-splitting states.
    let mut nested_positive = Vec::new();
    for n in 1..=3usize {
        let cfg = crate::treespec::make_configuration(
            crate::treespec::ConfigKind::V { r, k, n: k * n },
            q,
        )?;
        let expr = build_phi(&cfg, 1, PhiVariant::PhiPrime, None)?;
        let vals = evaluate(&expr, chain);
        let ok = vals
            .iter()
            .zip(&aq)
            .all(|(x, &in_aq)| if in_aq { *x > Rat::zero() } else { x.is_zero() });
        nested_positive.push(ok);
    }
    Ok(EqualityReport { product_identity, complement_identity, nested_positive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treespec::{make_configuration, make_named_tree, ConfigKind, NamedFamily};

    fn uniform_chain(k: usize, q: u8, r: u8) -> (FiniteStateMarkovTree, CPChain) {
        let p = make_named_tree(NamedFamily::Multiples { k }, q, r).unwrap();
        let tau = FiniteStateMarkovTree::uniform(p.to_automaton());
        let chain = build_cp_chain(&tau);
        (tau, chain)
    }

    fn f2() -> Configuration {
        make_configuration(ConfigKind::F { r: 2 }, 2).unwrap()
    }

    #[test]
    fn phi_f2_on_t3n() {
        let (_, chain) = uniform_chain(3, 2, 2);
        let expr = build_phi(&f2(), 3, PhiVariant::Phi, None).unwrap();
        let vals = evaluate(&expr, &chain);
        // Positive exactly at the splitting state: the 3-cycle returns to it.
        for (v, &split) in vals.iter().zip(&chain.a_set(2)) {
            if split {
                assert!(*v > Rat::zero());
            } else {
                assert!(v.is_zero());
            }
        }
        let expr1 = build_phi(&f2(), 1, PhiVariant::Phi, None).unwrap();
        assert!(evaluate(&expr1, &chain).iter().all(|v| v.is_zero()));
    }

    #[test]
    fn phi_trivial_config() {
        let (_, chain) = uniform_chain(3, 2, 2);
        let c = Configuration::singleton_root(2).unwrap();
        for variant in [PhiVariant::Phi, PhiVariant::Varphi, PhiVariant::PhiPrime] {
            let expr = build_phi(&c, 2, variant, None).unwrap();
            assert!(evaluate(&expr, &chain).iter().all(|v| v.is_one()));
        }
    }

    #[test]
    fn phi_f_r_collapses_to_kernel_power() {
        // phi_{F^r_m} = 1_{A_r} P^m 1_{A_r} on every fixture chain.
        for (k, q, r) in [(1, 2, 2), (3, 2, 2), (2, 3, 2), (2, 3, 3)] {
            let (_, chain) = uniform_chain(k, q, r);
            let fr = make_configuration(ConfigKind::F { r }, q).unwrap();
            for m in 1..=4 {
                let expr = build_phi(&fr, m, PhiVariant::Phi, None).unwrap();
                let vals = evaluate(&expr, &chain);
                let mut v = mask_to_vec(&chain.a_set(r));
                for _ in 0..m {
                    v = matvec(chain.kernel(), &v);
                }
                let direct: Vec<Rat> = chain
                    .a_set(r)
                    .iter()
                    .zip(&v)
                    .map(|(&b, x)| if b { x.clone() } else { Rat::zero() })
                    .collect();
                assert_eq!(vals, direct, "k={k} q={q} r={r} m={m}");
            }
        }
    }

    #[test]
    fn phi_d_r2_is_r_factorial_phi_prime() {
        for (k, q, r) in [(1, 2, 2), (3, 2, 2), (2, 3, 2), (1, 3, 3)] {
            let (_, chain) = uniform_chain(k, q, r);
            let d = make_configuration(ConfigKind::D { r, n: 2 }, q).unwrap();
            for m in 1..=3 {
                let phi = evaluate(&build_phi(&d, m, PhiVariant::Phi, None).unwrap(), &chain);
                let prime =
                    evaluate(&build_phi(&d, m, PhiVariant::PhiPrime, None).unwrap(), &chain);
                let factorial = rat((1..=r as i64).product::<i64>(), 1);
                for (a, b) in phi.iter().zip(&prime) {
                    assert_eq!(*a, b * &factorial, "k={k} q={q} r={r} m={m}");
                }
            }
        }
    }

    #[test]
    fn phi_bounds_and_varphi_domination() {
        let configs: Vec<Configuration> = vec![
            f2(),
            make_configuration(ConfigKind::D { r: 2, n: 2 }, 2).unwrap(),
            make_configuration(ConfigKind::V { r: 2, k: 2, n: 2 }, 2).unwrap(),
            Configuration::new(2, vec![vec![], vec![0], vec![0, 0]]).unwrap(),
        ];
        for (k, q, r) in [(1, 2, 2), (3, 2, 2), (2, 2, 2)] {
            let (_, chain) = uniform_chain(k, q, r);
            for c in &configs {
                for m in 1..=3 {
                    let phi = evaluate(&build_phi(c, m, PhiVariant::Phi, None).unwrap(), &chain);
                    let varphi =
                        evaluate(&build_phi(c, m, PhiVariant::Varphi, None).unwrap(), &chain);
                    for (p, v) in phi.iter().zip(&varphi) {
                        assert!(*p >= Rat::zero() && *p <= Rat::one());
                        assert!(*v >= Rat::zero() && *v <= Rat::one());
                        assert!(v <= p, "varphi must not exceed phi");
                    }
                }
            }
        }
    }

    #[test]
    fn delta_monotonicity() {
        let (_, chain) = uniform_chain(3, 2, 2);
        let d22 = make_configuration(ConfigKind::D { r: 2, n: 2 }, 2).unwrap();
        let deltas = [rat(0, 1), rat(1, 10), rat(2, 5), rat(3, 5)];
        for c in [&f2(), &d22] {
            for m in 1..=3 {
                let mut prev: Option<Vec<Rat>> = None;
                for d in &deltas {
                    let vals = evaluate(
                        &build_phi(c, m, PhiVariant::Phi, Some(d.clone())).unwrap(),
                        &chain,
                    );
                    if let Some(p) = &prev {
                        for (hi, lo) in p.iter().zip(&vals) {
                            assert!(hi >= lo, "larger delta must not increase phi");
                        }
                    }
                    prev = Some(vals);
                }
            }
        }
        // delta = 0 agrees with the plain indicator on a uniform chain.
        let plain = evaluate(&build_phi(&f2(), 2, PhiVariant::Phi, None).unwrap(), &chain);
        let zero = evaluate(
            &build_phi(&f2(), 2, PhiVariant::Phi, Some(rat(0, 1))).unwrap(),
            &chain,
        );
        assert_eq!(plain, zero);
    }

    #[test]
    fn phi_prime_rejects_heterogeneous_children() {
        assert!(build_phi(&f2(), 2, PhiVariant::PhiPrime, None).is_err());
    }

    #[test]
    fn soundness_examples() {
        let t = make_named_tree(NamedFamily::Multiples { k: 3 }, 2, 2).unwrap();
        let tau = FiniteStateMarkovTree::uniform(t.to_automaton());
        let tree = TreeSpec::Profile(t);
        let r = soundness_check(&tree, &f2(), 3, &tau).unwrap();
        assert!(r.agree && r.appears && r.phi_at_root > Rat::zero());
        let r = soundness_check(&tree, &f2(), 1, &tau).unwrap();
        assert!(r.agree && !r.appears && r.phi_at_root.is_zero());

        let full = make_named_tree(NamedFamily::Multiples { k: 1 }, 2, 2).unwrap();
        let tau = FiniteStateMarkovTree::uniform(full.to_automaton());
        let tree = TreeSpec::Profile(full);
        let d22 = make_configuration(ConfigKind::D { r: 2, n: 2 }, 2).unwrap();
        let r = soundness_check(&tree, &d22, 2, &tau).unwrap();
        assert!(r.agree && r.appears);
    }

    #[test]
    fn soundness_on_oracle_corpus() {
        let trees = [
            make_named_tree(NamedFamily::Multiples { k: 3 }, 2, 2).unwrap(),
            make_named_tree(NamedFamily::Multiples { k: 1 }, 2, 2).unwrap(),
            make_named_tree(NamedFamily::Eps { k: 2, big_n: 4 }, 2, 2).unwrap(),
            make_named_tree(NamedFamily::Multiples { k: 2 }, 3, 2).unwrap(),
        ];
        let configs: Vec<Configuration> = vec![
            f2(),
            make_configuration(ConfigKind::D { r: 2, n: 2 }, 2).unwrap(),
            make_configuration(ConfigKind::D { r: 2, n: 3 }, 2).unwrap(),
            make_configuration(ConfigKind::V { r: 2, k: 2, n: 1 }, 2).unwrap(),
            Configuration::new(2, vec![vec![], vec![0], vec![0, 0]]).unwrap(),
        ];
        for t in &trees {
            let tau = FiniteStateMarkovTree::uniform(t.to_automaton());
            let tree = TreeSpec::Profile(t.clone());
            for c in &configs {
                if c.q() > t.q() {
                    continue;
                }
                for m in 1..=4usize {
                    if m * c.height() > 9 {
                        continue;
                    }
                    let r = soundness_check(&tree, c, m, &tau).unwrap();
                    assert!(r.agree, "q={} h={} m={m}", t.q(), c.height());
                }
            }
        }
    }

    #[test]
    fn equality_identities() {
        for (k, q, r) in [(3, 2, 2), (1, 2, 2), (2, 3, 2)] {
            let (_, chain) = uniform_chain(k, q, r);
            let rep = equality_case_identities(&chain, r, k).unwrap();
            assert!(rep.product_identity, "k={k} q={q} r={r}");
            assert!(rep.complement_identity, "k={k} q={q} r={r}");
            assert!(rep.nested_positive.iter().all(|&b| b), "k={k} q={q} r={r}");
        }
    }

    #[test]
    fn correspondence_inequality() {
        // Exact check: density of the base-vertex set dominates the
        // stationary average of phi.
        use crate::embed::config_level_set;
        for (k, q, r) in [(3, 2, 2), (1, 2, 2), (2, 3, 2)] {
            let t = make_named_tree(NamedFamily::Multiples { k }, q, r).unwrap();
            let tau = FiniteStateMarkovTree::uniform(t.to_automaton());
            let chain = build_cp_chain(&tau);
            let fr = make_configuration(ConfigKind::F { r }, q).unwrap();
            let d2 = make_configuration(ConfigKind::D { r, n: 2 }, q).unwrap();
            for c in [&fr, &d2] {
                for m in 1..=8usize {
                    let levels = config_level_set(&t, c, m).unwrap();
                    let lhs = crate::arith::densities(&levels).upper;
                    let phi = evaluate(&build_phi(c, m, PhiVariant::Phi, None).unwrap(), &chain);
                    let rhs: Rat = chain
                        .stationary()
                        .iter()
                        .zip(&phi)
                        .map(|(p, v)| p * v)
                        .sum();
                    assert!(lhs >= rhs, "k={k} q={q} r={r} m={m}: {lhs} < {rhs}");
                }
            }
        }
    }
}
