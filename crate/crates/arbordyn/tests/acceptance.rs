//! Acceptance gate: one test per criterion, each ending in a single
//! PASS/FAIL line. Exact quantities compare as rationals; real-valued
//! quantities state their tolerance inline.

use arbordyn::cp::{
    apply_p, apply_s, build_cp_chain, empirical_distribution, inner_product, l2_norm, multiply,
    project_invariant, ChainFunction, FiniteStateMarkovTree,
};
use arbordyn::detect::{
    build_phi, equality_case_identities, evaluate, soundness_check, DetectorExpr, PhiVariant,
};
use arbordyn::embed::{generic_params, GenericMode};
use arbordyn::geometry::{hausdorff_dim, minkowski_dim, DimMode};
use arbordyn::rational::{rat, Rat};
use arbordyn::returns::{sweep_kneser, sweep_mean_ergodic, sweep_shift_partition};
use arbordyn::treespec::{
    make_configuration, make_named_tree, ConfigKind, EventuallyPeriodicSet, NamedFamily, TreeSpec,
};
use arbordyn::{arith, verify};
use num::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn conclude(n: usize, what: &str, ok: bool) {
    println!("{} criterion {n}: {what}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {what}");
}

#[test]
fn criterion_01_equality_case_dimensions() {
    let mut ok = true;
    let start = std::time::Instant::now();
    for (q, r, k) in verify::grid() {
        let tree = verify::grid_tree(q, r, k);
        let dim = minkowski_dim(&tree, DimMode::Exact).unwrap();
        let want = 1.0 / k as f64
            + ((r - 1) as f64).ln() / (q as f64).ln() * (1.0 - 1.0 / k as f64);
        ok &= (dim.value - want).abs() < 1e-12;

        let config = make_configuration(ConfigKind::F { r }, q).unwrap();
        let gp = generic_params(&tree, &config, GenericMode::Upper, 6 * k, 1).unwrap();
        let want_params: Vec<usize> = (0..=6 * k).step_by(k).collect();
        ok &= gp.exact && gp.params == want_params;

        let d = arith::densities(&EventuallyPeriodicSet::multiples(k).unwrap()).lower;
        ok &= d == rat(1, k as i64);
    }
    ok &= start.elapsed().as_secs() < 10;
    conclude(1, "extremal-family dimensions, generic parameters, and densities (1e-12 / exact, < 10 s)", ok);
}

#[test]
fn criterion_02_hausdorff_brackets() {
    let mut ok = true;
    let start = std::time::Instant::now();
    for (q, r, k) in verify::grid() {
        let tree = verify::grid_tree(q, r, k);
        let exact = minkowski_dim(&tree, DimMode::Exact).unwrap().value;
        // Splitting is q-fold at level 0, so level counts never dip below
        // the dimension slope and the cut floor can stay at the root.
        let h = hausdorff_dim(&tree, 0, 60, 0.02).unwrap();
        ok &= h.lo <= exact + 1e-12 && exact <= h.hi + 1e-12;
    }
    ok &= start.elapsed().as_secs() < 60;
    conclude(2, "bisection brackets (horizon 60, tol 0.02) contain every exact dimension (< 60 s)", ok);
}

#[test]
fn criterion_03_sharpness_chain() {
    let rep = verify::run_suite("sharpness", 7).unwrap();
    conclude(3, "3/8-dimension family: density ratio 4/3 and absent deep configuration", rep.passed);
}

#[test]
fn criterion_04_chain_operator_identities() {
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let fixtures = verify::fixture_chains();
    ok &= fixtures.len() >= 5;
    for (_, tau) in &fixtures {
        let chain = build_cp_chain(tau);
        let one = ChainFunction::constant(&chain, Rat::one());
        ok &= apply_p(&chain, &one) == one;
        for _ in 0..100 {
            let f1 = values_fn(&chain, &mut rng);
            let f2 = values_fn(&chain, &mut rng);
            let g = values_fn(&chain, &mut rng);
            let f = multiply(&chain, &apply_s(&chain, &f1), &f2);
            // Adjointness of P and S in the stationary path space.
            ok &= inner_product(&chain, &apply_p(&chain, &f), &g)
                == inner_product(&chain, &f, &apply_s(&chain, &g));
            // P(f Sg) = g Pf.
            ok &= apply_p(&chain, &multiply(&chain, &f, &apply_s(&chain, &g)))
                == multiply(&chain, &g, &apply_p(&chain, &f));
            let proj = project_invariant(&chain, &f1).unwrap();
            ok &= l2_norm(&chain, &proj) <= l2_norm(&chain, &f1) + 1e-12;
        }
    }
    conclude(4, "P1 = 1, adjointness, intertwining, projection contraction (exact / 1e-12, 100 pairs x 7 chains)", ok);
}

fn values_fn(chain: &arbordyn::cp::CPChain, rng: &mut ChaCha8Rng) -> ChainFunction {
    let values: Vec<Rat> = (0..chain.len())
        .map(|_| rat(rng.gen_range(-4..=8), rng.gen_range(1..=5)))
        .collect();
    ChainFunction::from_state_values(chain, &values).unwrap()
}

#[test]
fn criterion_05_detector_closed_form() {
    let mut ok = true;
    for (_, tau) in verify::fixture_chains() {
        let chain = build_cp_chain(&tau);
        let q = chain.q();
        for r in 2..=q.min(3) {
            let config = make_configuration(ConfigKind::F { r }, q).unwrap();
            for m in 1..=8usize {
                let phi = build_phi(&config, m, PhiVariant::Phi, None).unwrap();
                let closed = DetectorExpr::Prod(vec![
                    DetectorExpr::IndSplit(r),
                    DetectorExpr::ApplyP(m, Box::new(DetectorExpr::IndSplit(r))),
                ]);
                ok &= evaluate(&phi, &chain) == evaluate(&closed, &chain);
            }
            let d_r2 = make_configuration(ConfigKind::D { r, n: 2 }, q).unwrap();
            let mut fact = Rat::one();
            for i in 2..=r as i64 {
                fact *= rat(i, 1);
            }
            for m in 1..=3usize {
                let phi = evaluate(&build_phi(&d_r2, m, PhiVariant::Phi, None).unwrap(), &chain);
                let phip =
                    evaluate(&build_phi(&d_r2, m, PhiVariant::PhiPrime, None).unwrap(), &chain);
                ok &= phi == phip.iter().map(|x| x * &fact).collect::<Vec<_>>();
            }
        }
    }
    conclude(5, "split detector equals its closed form for m <= 8, and phi = r! phi' at height 2 (exact)", ok);
}

#[test]
fn criterion_06_detector_soundness_corpus() {
    let start = std::time::Instant::now();
    let mut ok = true;
    let mut cases = 0usize;
    let trees: Vec<TreeSpec> = vec![
        verify::grid_tree(2, 2, 1),
        verify::grid_tree(2, 2, 2),
        verify::grid_tree(2, 2, 3),
        TreeSpec::Profile(make_named_tree(NamedFamily::Eps { k: 2, big_n: 4 }, 2, 2).unwrap()),
        verify::grid_tree(3, 2, 2),
        verify::grid_tree(3, 3, 2),
    ];
    let config_kinds = [
        ConfigKind::F { r: 2 },
        ConfigKind::F { r: 3 },
        ConfigKind::D { r: 2, n: 2 },
        ConfigKind::D { r: 2, n: 3 },
        ConfigKind::D { r: 3, n: 2 },
        ConfigKind::V { r: 2, k: 2, n: 2 },
    ];
    for tree in &trees {
        let q = tree.q();
        let tau = FiniteStateMarkovTree::uniform(tree.automaton().unwrap());
        for kind in config_kinds {
            let Ok(config) = make_configuration(kind, q) else { continue };
            if config.height() > 3 {
                continue;
            }
            for m in 1..=4usize {
                if m * config.height() > 9 {
                    continue;
                }
                let rep = soundness_check(tree, &config, m, &tau).unwrap();
                ok &= rep.agree;
                cases += 1;
            }
        }
    }
    ok &= cases >= 100 && start.elapsed().as_secs() < 120;
    conclude(
        6,
        &format!("detector positivity matches brute-force embedding on {cases} corpus cases (exact, < 120 s)"),
        ok,
    );
}

#[test]
fn criterion_07_equality_operator_identities() {
    let mut ok = true;
    for (q, r, k) in verify::grid() {
        let tree = verify::grid_tree(q, r, k);
        let tau = FiniteStateMarkovTree::uniform(tree.automaton().unwrap());
        let chain = build_cp_chain(&tau);
        let rep = equality_case_identities(&chain, r, k).unwrap();
        ok &= rep.product_identity && rep.complement_identity;
        ok &= rep.nested_positive.iter().all(|&b| b);
    }
    conclude(7, "product and complement operator identities hold exactly across the grid", ok);
}

#[test]
fn criterion_08_mean_ergodic_bound() {
    let start = std::time::Instant::now();
    let rep = sweep_mean_ergodic(10).unwrap();
    let ok = rep.counterexamples.is_empty() && rep.checked > 0 && start.elapsed().as_secs() < 60;
    conclude(
        8,
        &format!("return-set density >= measure on all {} systems with n <= 10 (exact, < 60 s)", rep.checked),
        ok,
    );
}

#[test]
fn criterion_09_partition_oracle_and_kneser() {
    let t = sweep_shift_partition(10).unwrap();
    let k = sweep_kneser(10).unwrap();
    let ok = t.counterexamples.is_empty() && k.counterexamples.is_empty();
    conclude(
        9,
        &format!(
            "shift-partition oracle ({} cases) and Kneser inequality ({} pairs) are violation-free",
            t.checked, k.checked
        ),
        ok,
    );
}

#[test]
fn criterion_10_appendix_suite() {
    let rep = verify::run_suite("appendix", 7).unwrap();
    conclude(10, "threshold-return lemmas, small-delta period extraction, and non-ergodic refusal", rep.passed);
}

#[test]
fn criterion_11_entropy_convergence() {
    let mut ok = true;
    for (q, r, k) in verify::grid() {
        let tree = verify::grid_tree(q, r, k);
        let dim = minkowski_dim(&tree, DimMode::Exact).unwrap().value;
        // One level short of a full period, the running entropy average
        // closes exactly.
        for t in [4usize, 8] {
            let emp = empirical_distribution(&tree, t * k - 1).unwrap();
            ok &= (emp.entropy - dim).abs() < 1e-12;
        }
    }
    conclude(11, "empirical entropy at period-aligned horizons equals the dimension (1e-12)", ok);
}
