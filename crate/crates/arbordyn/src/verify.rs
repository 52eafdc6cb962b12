//! End-to-end verification suites behind `arbordyn verify`. Each suite
//! recomputes a family of published identities from scratch and reports one
//! pass/fail record per assertion.

use crate::cp::{
    apply_p, apply_s, build_cp_chain, empirical_distribution, inner_product, l2_norm, multiply,
    project_invariant, ChainFunction, FiniteStateMarkovTree,
};
use crate::detect::{build_phi, equality_case_identities, evaluate, DetectorExpr, PhiVariant};
use crate::embed::{appears_at, config_level_set, generic_params, GenericMode};
use crate::geometry::{hausdorff_dim, minkowski_dim, DimMode};
use crate::rational::{rat, rat_string, Rat};
use crate::report::{ExperimentReport, ReportBuilder};
use crate::returns::{
    sweep_kneser, sweep_sum_closure, sweep_mean_ergodic, sweep_shift_partition, threshold_grid, verify_appendix,
    correlation, return_set, FiniteMPS,
};
use crate::treespec::{
    make_configuration, make_named_tree, ConfigKind, EventuallyPeriodicSet, NamedFamily, TreeSpec,
};
use crate::{arith, Error, Result};
use num::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SUITES: [&str; 5] = [
    "equality-case",
    "sharpness",
    "phi-identities",
    "returns-sweep",
    "appendix",
];

pub fn run_suite(suite: &str, seed: u64) -> Result<ExperimentReport> {
    match suite {
        "equality-case" => Ok(equality_case()),
        "sharpness" => Ok(sharpness()),
        "phi-identities" => Ok(phi_identities(seed)),
        "returns-sweep" => Ok(returns_sweep()),
        "appendix" => Ok(appendix()),
        other => Err(Error::InvalidParameter(format!(
            "unknown suite {other:?}; expected one of {SUITES:?}"
        ))),
    }
}

/// (q, r, k) grid for the extremal tree family, r <= q.
pub fn grid() -> Vec<(u8, u8, usize)> {
    let mut out = Vec::new();
    for q in [2u8, 3, 4] {
        for r in [2u8, 3] {
            if r > q {
                continue;
            }
            for k in 1..=4usize {
                out.push((q, r, k));
            }
        }
    }
    out
}

pub fn grid_tree(q: u8, r: u8, k: usize) -> TreeSpec {
    TreeSpec::Profile(make_named_tree(NamedFamily::Multiples { k }, q, r).expect("valid grid"))
}

fn equality_case() -> ExperimentReport {
    let mut b = ReportBuilder::new("equality-case");
    for (q, r, k) in grid() {
        let tag = format!("q{q}r{r}k{k}");
        let tree = grid_tree(q, r, k);
        let dim = minkowski_dim(&tree, DimMode::Exact).unwrap();
        let want = 1.0 / k as f64
            + ((r - 1) as f64).ln() / (q as f64).ln() * (1.0 - 1.0 / k as f64);
        b.check_tol(&format!("dim-{tag}"), dim.value, want, 1e-12);

        let config = make_configuration(ConfigKind::F { r }, q).unwrap();
        let gp = generic_params(&tree, &config, GenericMode::Upper, 6 * k, 1).unwrap();
        let want_params: Vec<usize> = (0..=6 * k).step_by(k).collect();
        b.check_exact(
            &format!("generic-{tag}"),
            gp.exact && gp.params == want_params,
            format!("{:?}", gp.params),
        );
        let d = arith::densities(&EventuallyPeriodicSet::multiples(k).unwrap()).lower;
        b.check_exact(
            &format!("param-density-{tag}"),
            d == rat(1, k as i64),
            rat_string(&d),
        );

        let tau = FiniteStateMarkovTree::uniform(tree.automaton().unwrap());
        let chain = build_cp_chain(&tau);
        let eq = equality_case_identities(&chain, r, k).unwrap();
        b.check_exact(
            &format!("operator-identities-{tag}"),
            eq.product_identity && eq.complement_identity,
            format!("product {}, complement {}", eq.product_identity, eq.complement_identity),
        );

        // Level horizons one short of a full period average the splitting
        // exactly, so the empirical entropy hits the dimension on the nose.
        let level = 8 * k - 1;
        let emp = empirical_distribution(&tree, level).unwrap();
        b.check_tol(&format!("entropy-convergence-{tag}"), emp.entropy, dim.value, 1e-12);
    }

    // Headline values for the k = 3 binary tree.
    let tree = grid_tree(2, 2, 3);
    let dim = minkowski_dim(&tree, DimMode::Exact).unwrap();
    b.value_f64("dim-q2r2k3", dim.value);
    b.check_tol("dim-q2r2k3-is-third", dim.value, 1.0 / 3.0, 1e-15);
    let tau = FiniteStateMarkovTree::uniform(tree.automaton().unwrap());
    let chain = build_cp_chain(&tau);
    let nu = chain.measure(&chain.a_set(2));
    b.value_rat("measure-A2", &nu);
    b.check_exact("measure-A2-is-third", nu == rat(1, 3), rat_string(&nu));
    b.check_tol("entropy-is-third", chain.entropy(), 1.0 / 3.0, 1e-12);
    let config = make_configuration(ConfigKind::F { r: 2 }, 2).unwrap();
    let gp = generic_params(&tree, &config, GenericMode::Upper, 24, 1).unwrap();
    b.check_exact(
        "generic-f2-window",
        gp.params == vec![0, 3, 6, 9, 12, 15, 18, 21, 24],
        format!("{:?}", gp.params),
    );
    b.finish()
}

fn sharpness() -> ExperimentReport {
    let mut b = ReportBuilder::new("sharpness");
    let (q, r, k, big_n) = (2u8, 2u8, 2usize, 4usize);
    b.input("family", format!("q{q} r{r} k{k} N{big_n}"));
    let profile = make_named_tree(NamedFamily::Eps { k, big_n }, q, r).unwrap();
    let tree = TreeSpec::Profile(profile.clone());

    let dim = minkowski_dim(&tree, DimMode::Exact).unwrap();
    b.value_f64("dim", dim.value);
    b.check_tol("dim-is-3-8", dim.value, 3.0 / 8.0, 1e-15);
    let hd = hausdorff_dim(&tree, 48, 64, 0.02).unwrap();
    b.check(
        "hausdorff-bracket",
        hd.lo <= 3.0 / 8.0 + 1e-12 && hd.hi >= 3.0 / 8.0 - 1e-12,
        "2e-2",
        format!("[{}, {}]", hd.lo, hd.hi),
    );

    // Banach-generic parameters of the split-resplit configuration: exactly
    // the even m, density 1/2.
    let f2 = make_configuration(ConfigKind::F { r }, q).unwrap();
    let gp = generic_params(&tree, &f2, GenericMode::Banach, 48, 1).unwrap();
    let want: Vec<usize> = (0..=48).step_by(2).collect();
    b.check_exact("banach-generic-evens", gp.exact && gp.params == want, format!("{:?}", gp.params));
    let evens = EventuallyPeriodicSet::multiples(2).unwrap();
    let d_star = arith::densities(&evens).lower;
    b.value_rat("generic-density", &d_star);
    b.check_exact("generic-density-half", d_star == rat(1, 2), rat_string(&d_star));
    // The density exceeds the dimension by the factor 4/3 > 1.
    b.check_exact(
        "ratio-4-3",
        rat(1, 2) == rat(4, 3) * rat(3, 8),
        "1/2 = (4/3) * (3/8)",
    );

    // The deep nested-split configuration admits no parameter-1 embedding:
    // its level criterion is empty, and direct search at every vertex up to
    // depth 24 agrees.
    let v229 = make_configuration(ConfigKind::V { r: 2, k: 2, n: 9 }, q).unwrap();
    let levels = config_level_set(&profile, &v229, 1).unwrap();
    b.check_exact("v229-level-set-empty", levels.is_empty(), levels.describe());
    let mut absent = true;
    let mut tried = 0usize;
    for v in tree.words_up_to(24).unwrap() {
        tried += 1;
        if appears_at(&tree, &v229, &v, 1).unwrap().is_some() {
            absent = false;
        }
    }
    b.check_exact("v229-absent-at-1", absent, format!("{tried} vertices searched"));
    b.finish()
}

pub fn fixture_chains() -> Vec<(String, FiniteStateMarkovTree)> {
    let mut out = Vec::new();
    for (q, r, k) in [(2u8, 2u8, 3usize), (2, 2, 2), (2, 2, 1), (3, 2, 2), (3, 3, 2), (4, 3, 4)] {
        let tree = make_named_tree(NamedFamily::Multiples { k }, q, r).unwrap();
        out.push((
            format!("q{q}r{r}k{k}"),
            FiniteStateMarkovTree::uniform(tree.to_automaton()),
        ));
    }
    let eps = make_named_tree(NamedFamily::Eps { k: 2, big_n: 4 }, 2, 2).unwrap();
    out.push(("eps".into(), FiniteStateMarkovTree::uniform(eps.to_automaton())));
    out
}

fn random_state_fn(chain: &crate::cp::CPChain, rng: &mut ChaCha8Rng) -> ChainFunction {
    let values: Vec<Rat> = (0..chain.len())
        .map(|_| rat(rng.gen_range(-4..=8), rng.gen_range(1..=5)))
        .collect();
    ChainFunction::from_state_values(chain, &values).expect("lengths match")
}

fn phi_identities(seed: u64) -> ExperimentReport {
    let mut b = ReportBuilder::new("phi-identities");
    b.input("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (tag, tau) in fixture_chains() {
        let chain = build_cp_chain(&tau);
        let one = ChainFunction::constant(&chain, Rat::one());
        b.check_exact(&format!("p-one-{tag}"), apply_p(&chain, &one) == one, "P1 = 1");

        let mut adjoint_ok = true;
        let mut intertwine_ok = true;
        let mut proj_ok = true;
        for _ in 0..100 {
            let f1 = random_state_fn(&chain, &mut rng);
            let f2 = random_state_fn(&chain, &mut rng);
            let g = random_state_fn(&chain, &mut rng);
            // A generic depth-2 function mixing old and new coordinates.
            let f = multiply(&chain, &apply_s(&chain, &f1), &f2);
            let lhs = inner_product(&chain, &apply_p(&chain, &f), &g);
            let rhs = inner_product(&chain, &f, &apply_s(&chain, &g));
            adjoint_ok &= lhs == rhs;
            let left = apply_p(&chain, &multiply(&chain, &f, &apply_s(&chain, &g)));
            let right = multiply(&chain, &g, &apply_p(&chain, &f));
            intertwine_ok &= left == right;
            let proj = project_invariant(&chain, &f1).unwrap();
            proj_ok &= l2_norm(&chain, &proj) <= l2_norm(&chain, &f1) + 1e-12;
        }
        b.check(&format!("adjoint-{tag}"), adjoint_ok, "exact", "<Pf,g> = <f,Sg>, 100 pairs");
        b.check(&format!("intertwine-{tag}"), intertwine_ok, "exact", "P(f Sg) = g Pf, 100 pairs");
        b.check(
            &format!("projection-contracts-{tag}"),
            proj_ok,
            "1e-12",
            "norm of invariant projection",
        );

        // The split-resplit detector collapses to its closed form, exactly.
        let q = chain.q();
        for r in 2..=q.min(3) {
            let config = make_configuration(ConfigKind::F { r }, q).unwrap();
            let mut closed_ok = true;
            for m in 1..=8usize {
                let phi = build_phi(&config, m, PhiVariant::Phi, None).unwrap();
                let closed = DetectorExpr::Prod(vec![
                    DetectorExpr::IndSplit(r),
                    DetectorExpr::ApplyP(m, Box::new(DetectorExpr::IndSplit(r))),
                ]);
                closed_ok &= evaluate(&phi, &chain) == evaluate(&closed, &chain);
            }
            b.check(
                &format!("phi-closed-form-r{r}-{tag}"),
                closed_ok,
                "exact",
                "phi(F) = 1_A P^m 1_A, m <= 8",
            );
            // Full r-ary height-2 configurations: phi = r! phi'.
            let d_r2 = make_configuration(ConfigKind::D { r, n: 2 }, q).unwrap();
            let mut fact = Rat::one();
            for i in 2..=r as i64 {
                fact *= rat(i, 1);
            }
            let mut fact_ok = true;
            for m in 1..=3usize {
                let phi = evaluate(&build_phi(&d_r2, m, PhiVariant::Phi, None).unwrap(), &chain);
                let phip =
                    evaluate(&build_phi(&d_r2, m, PhiVariant::PhiPrime, None).unwrap(), &chain);
                let scaled: Vec<Rat> = phip.iter().map(|x| x * &fact).collect();
                fact_ok &= phi == scaled;
            }
            b.check(
                &format!("phi-factorial-r{r}-{tag}"),
                fact_ok,
                "exact",
                "phi(D^{r,2}) = r! phi'",
            );
        }
    }
    b.finish()
}

fn returns_sweep() -> ExperimentReport {
    let mut b = ReportBuilder::new("returns-sweep");
    let rep = sweep_mean_ergodic(10).unwrap();
    b.value_str("mean-ergodic-checked", rep.checked);
    b.check_exact(
        "mean-ergodic-bound",
        rep.counterexamples.is_empty(),
        format!("{} violations", rep.counterexamples.len()),
    );
    let rep = sweep_shift_partition(10).unwrap();
    b.value_str("shift-partition-checked", rep.checked);
    b.check_exact(
        "shift-partition-oracle",
        rep.counterexamples.is_empty(),
        format!("{} counterexamples", rep.counterexamples.len()),
    );
    let rep = sweep_kneser(10).unwrap();
    b.value_str("kneser-checked", rep.checked);
    b.check_exact(
        "kneser-inequality",
        rep.counterexamples.is_empty(),
        format!("{} violations", rep.counterexamples.len()),
    );
    let rep = sweep_sum_closure(5).unwrap();
    b.value_str("sum-closure-checked", rep.checked);
    b.check_exact(
        "sum-closure",
        rep.counterexamples.is_empty(),
        format!("{} violations", rep.counterexamples.len()),
    );
    b.finish()
}

fn appendix() -> ExperimentReport {
    let mut b = ReportBuilder::new("appendix");
    let eta = rat(0, 1);
    let gamma_grid = vec![rat(1, 4), rat(1, 2), rat(3, 4)];

    let named: Vec<(&str, FiniteMPS, Vec<usize>, Option<usize>)> = vec![
        ("z6-03", FiniteMPS::rotation(6).unwrap(), vec![0, 3], Some(3)),
        ("z4-0", FiniteMPS::rotation(4).unwrap(), vec![0], Some(4)),
        ("z5-0", FiniteMPS::rotation(5).unwrap(), vec![0], Some(5)),
    ];
    for (tag, mps, points, want_k) in named {
        let mut a = vec![false; mps.n()];
        for &p in &points {
            a[p] = true;
        }
        let g = correlation(&mps, &a, &a);
        let nu = mps.measure(&a);
        let normalized: Vec<Rat> = g.values.iter().map(|v| v / (&nu * &nu)).collect();
        let dgrid = threshold_grid(&normalized);
        let rep = verify_appendix(&mps, &a, &eta, &dgrid, &gamma_grid).unwrap();
        b.check_exact(&format!("hypothesis-{tag}"), rep.hypothesis, "d(R^delta) <= nu(A)");
        b.check_exact(&format!("heavy-returns-bound-{tag}"), rep.heavy_bound_ok, "gamma grid");
        b.check_exact(&format!("double-returns-bound-{tag}"), rep.double_bound_ok, "delta grid");
        b.check_exact(
            &format!("small-delta-period-{tag}"),
            rep.extraction_ok && rep.extracted_period == want_k,
            format!("k = {:?}", rep.extracted_period),
        );
    }

    // Near-full return set: the hypothesis fails and no period is extracted.
    let m4 = FiniteMPS::rotation(4).unwrap();
    let a = vec![true, true, false, false];
    let g = correlation(&m4, &a, &a);
    let nu = m4.measure(&a);
    let normalized: Vec<Rat> = g.values.iter().map(|v| v / (&nu * &nu)).collect();
    let rep = verify_appendix(&m4, &a, &eta, &threshold_grid(&normalized), &gamma_grid).unwrap();
    b.check_exact("hypothesis-fails-z4-01", !rep.hypothesis, "d(R^delta) = 3/4 > 1/2");

    // Non-ergodic control: two coprime cycles. The ergodic machinery must
    // refuse, and the return set is visibly not a single residue class.
    let m = FiniteMPS::two_cycles(2, 3).unwrap();
    let a = {
        let mut v = vec![false; 5];
        v[0] = true;
        v[2] = true;
        v
    };
    let err = verify_appendix(&m, &a, &eta, &[rat(1, 2)], &gamma_grid).is_err();
    b.check_exact("non-ergodic-rejected", err, "two cycles of lengths 2 and 3");
    let r = return_set(&m, &a);
    let not_knn = (1..=r.period_len())
        .find(|&n| r.contains(n))
        .map(|k| r != EventuallyPeriodicSet::multiples(k).unwrap())
        .unwrap_or(false);
    b.check_exact("non-ergodic-r-not-periodic", not_knn, r.describe());
    // The mean-ergodic lower bound still holds without ergodicity.
    let d = arith::densities(&r).lower;
    b.check_exact(
        "mean-ergodic-still-holds",
        d >= m.measure(&a),
        format!("d(R) = {}", rat_string(&d)),
    );
    b.finish()
}
