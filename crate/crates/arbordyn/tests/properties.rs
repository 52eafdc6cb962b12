//! Randomized invariant checks over the core types.

use arbordyn::arith;
use arbordyn::embed::appears_at;
use arbordyn::geometry::{minkowski_dim, section_value, DimMode, SectionProblem};
use arbordyn::rational::{rat, Rat};
use arbordyn::returns::{
    correlation, return_set, return_set_delta, return_set_gamma, sumset, FiniteMPS,
};
use arbordyn::treespec::{
    make_configuration, ConfigKind, EventuallyPeriodic, EventuallyPeriodicSet, ProfileTree,
    TreeSpec,
};
use num::{One, Zero};
use proptest::prelude::*;

fn arb_set() -> impl Strategy<Value = EventuallyPeriodicSet> {
    (
        prop::collection::vec(any::<bool>(), 0..6),
        prop::collection::vec(any::<bool>(), 1..8),
    )
        .prop_filter_map("period must not be empty of structure", |(pre, per)| {
            EventuallyPeriodicSet::new(pre, per).ok()
        })
}

fn arb_pure_set() -> impl Strategy<Value = EventuallyPeriodicSet> {
    prop::collection::vec(any::<bool>(), 1..8)
        .prop_filter_map("nonempty period", |per| EventuallyPeriodicSet::new(vec![], per).ok())
        .prop_filter("pure", |s| s.preperiod_len() == 0)
}

fn arb_profile() -> impl Strategy<Value = ProfileTree> {
    (2u8..=5, prop::collection::vec(any::<bool>(), 1..6)).prop_map(|(q, mask)| {
        let splitting = EventuallyPeriodic::from_fn(0, mask.len(), |n| {
            if mask[n % mask.len()] {
                q
            } else {
                1
            }
        });
        ProfileTree::new(q, splitting).unwrap()
    })
}

fn arb_mps() -> impl Strategy<Value = (FiniteMPS, Vec<bool>)> {
    (prop::collection::vec(1usize..=4, 1..4), any::<u32>()).prop_map(|(cycles, bits)| {
        let mps = FiniteMPS::from_cycle_type(&cycles).unwrap();
        let n = mps.n();
        let mut a: Vec<bool> = (0..n).map(|i| bits & (1 << i) != 0).collect();
        if a.iter().all(|&x| !x) {
            a[0] = true;
        }
        (mps, a)
    })
}

proptest! {
    #[test]
    fn density_order(s in arb_set()) {
        let d = arith::densities(&s);
        prop_assert!(d.lower <= d.upper);
        prop_assert!(d.upper <= d.banach);
        prop_assert!(d.banach <= Rat::one());
        prop_assert!(d.lower >= Rat::zero());
    }

    #[test]
    fn density_complement(s in arb_set()) {
        let d = arith::densities(&s);
        let dc = arith::densities(&s.complement());
        prop_assert_eq!(d.upper + dc.lower, Rat::one());
    }

    #[test]
    fn set_algebra_consistent(a in arb_set(), b in arb_set()) {
        let inter = a.intersect(&b);
        let uni = a.union(&b);
        for n in 0..64usize {
            prop_assert_eq!(inter.contains(n), a.contains(n) && b.contains(n));
            prop_assert_eq!(uni.contains(n), a.contains(n) || b.contains(n));
        }
        prop_assert!(inter.is_subset_of(&a));
        prop_assert!(a.is_subset_of(&uni));
    }

    #[test]
    fn profile_dim_bounds_and_estimate(t in arb_profile()) {
        let spec = TreeSpec::Profile(t);
        let exact = minkowski_dim(&spec, DimMode::Exact).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&exact));
        let est = minkowski_dim(&spec, DimMode::Estimate(40)).unwrap().value;
        // The estimate is a max over tails, so it sits above the mean rate
        // but within one period's worth of slack.
        prop_assert!(est + 1e-9 >= exact);
        prop_assert!(est <= exact + 0.3);
    }

    #[test]
    fn section_value_monotone_in_lambda(t in arb_profile(), l1 in 0.0f64..1.0, l2 in 0.0f64..1.0) {
        let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        let spec = TreeSpec::Profile(t);
        let value = |lambda| {
            section_value(&SectionProblem { tree: spec.clone(), lambda, cut_floor: 0, horizon: 12 })
                .unwrap()
                .value
        };
        prop_assert!(value(hi) <= value(lo) + 1e-9);
    }

    #[test]
    fn zero_parameter_embedding_is_trivial(t in arb_profile()) {
        let spec = TreeSpec::Profile(t);
        let q = spec.q();
        let config = make_configuration(ConfigKind::F { r: 2.min(q) }, q).unwrap();
        let w = appears_at(&spec, &config, &[], 0).unwrap();
        prop_assert!(w.is_some());
    }

    #[test]
    fn return_set_bounds((mps, a) in arb_mps()) {
        let r = return_set(&mps, &a);
        prop_assert!(r.contains(0));
        // Mean ergodic lower bound.
        prop_assert!(arith::densities(&r).lower >= mps.measure(&a));
        // Thresholded sets nest inside R.
        let rd = return_set_delta(&mps, &a, &rat(1, 7)).unwrap();
        prop_assert!(rd.is_subset_of(&r));
        let rg = return_set_gamma(&mps, &a, &rat(1, 3)).unwrap();
        prop_assert!(rg.is_subset_of(&r));
    }

    #[test]
    fn correlation_is_symmetric_in_lag((mps, a) in arb_mps()) {
        let g = correlation(&mps, &a, &a);
        let p = g.period;
        for m in 0..p {
            prop_assert_eq!(g.get(m), g.get((p - m) % p));
        }
        // Mass conservation: the correlations sum to nu(A)^2 * p for uniform
        // rotations only; in general each value stays within [0, nu(A)].
        let nu = mps.measure(&a);
        for v in &g.values {
            prop_assert!(*v >= Rat::zero() && *v <= nu);
        }
    }

    #[test]
    fn sumset_symmetric(a in arb_pure_set(), b in arb_pure_set()) {
        let ab = sumset(&a, &b).unwrap();
        let ba = sumset(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn sumset_contains_translates(a in arb_pure_set(), b in arb_pure_set()) {
        let s = sumset(&a, &b).unwrap();
        for x in a.members_below(10) {
            for y in b.members_below(10) {
                prop_assert!(s.contains(x + y));
            }
        }
    }
}
