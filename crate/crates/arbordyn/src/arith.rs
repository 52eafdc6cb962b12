//! Exact density arithmetic for eventually periodic subsets of the naturals.

use crate::rational::{rat_string, Rat};
use crate::treespec::EventuallyPeriodicSet;
use crate::{Error, Result};
use num::Zero;
use serde::Serialize;

/// Upper, lower, and upper Banach densities of a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityTriple {
    pub upper: Rat,
    pub lower: Rat,
    pub banach: Rat,
}

/// Which density notion a positivity question refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityMode {
    Upper,
    Banach,
}

/// Exact densities. For an eventually periodic set the limit density exists
/// (upper = lower = c/P), and the Banach density is the max window average,
/// maximized over starting positions in the periodic part.
pub fn densities(e: &EventuallyPeriodicSet) -> DensityTriple {
    let p = e.period_len();
    let limit = e.density();
    // Count in each window of length p starting within one period of the
    // periodic part; window counts are p-periodic in the start position.
    let pre = e.preperiod_len();
    let best = (pre..pre + p)
        .map(|start| (start..start + p).filter(|&n| e.contains(n)).count())
        .max()
        .unwrap_or(0);
    let banach = Rat::new((best as i64).into(), (p as i64).into());
    debug_assert!(limit <= banach);
    DensityTriple {
        upper: limit.clone(),
        lower: limit,
        banach,
    }
}

/// Brute-force Banach density oracle: max members in any window of length
/// `window`, as an average. Starts range over the periodic part only, since
/// the limsup is over window positions tending to infinity and every
/// position far out is congruent to one in the first period.
pub fn banach_window_scan(e: &EventuallyPeriodicSet, window: usize) -> Rat {
    assert!(window >= 1);
    let pre = e.preperiod_len();
    let best = (pre..pre + e.period_len())
        .map(|start| (start..start + window).filter(|&n| e.contains(n)).count())
        .max()
        .unwrap_or(0);
    Rat::new((best as i64).into(), (window as i64).into())
}

/// The popular differences { m : density of E ∩ (E - m) is positive }, with
/// the density notion chosen by `mode`. Eventually periodic in m with period
/// dividing the period of E.
pub fn popular_differences(e: &EventuallyPeriodicSet, mode: DensityMode) -> EventuallyPeriodicSet {
    let p = e.period_len();
    let positive = |m: usize| -> bool {
        let inter = e.intersect(&e.shift_back(m));
        let d = densities(&inter);
        let v = match mode {
            DensityMode::Upper => d.upper,
            DensityMode::Banach => d.banach,
        };
        !v.is_zero()
    };
    // m and m + p shift within the periodic part identically, so the answer
    // is periodic in m with period p beyond the preperiod.
    EventuallyPeriodicSet::from_fn(e.preperiod_len(), p, positive)
}

/// The set of arithmetic-progression starts { n : n, n+k, ..., n+(m-1)k in E }.
pub fn ap_start_set(e: &EventuallyPeriodicSet, k: usize, m: usize) -> Result<EventuallyPeriodicSet> {
    if k < 1 || m < 1 {
        return Err(Error::InvalidParameter("ap_density needs k, m >= 1".into()));
    }
    let mut set = e.clone();
    for i in 1..m {
        set = set.intersect(&e.shift_back(i * k));
    }
    Ok(set)
}

/// Exact density of the AP-start set.
pub fn ap_density(e: &EventuallyPeriodicSet, k: usize, m: usize, mode: DensityMode) -> Result<Rat> {
    let set = ap_start_set(e, k, m)?;
    let d = densities(&set);
    Ok(match mode {
        DensityMode::Upper => d.upper,
        DensityMode::Banach => d.banach,
    })
}

/// Outcome of checking the inverse structure of a near-extremal set.
#[derive(Debug, Clone, Serialize)]
pub struct InverseReport {
    pub upper_density: String,
    pub hypothesis_met: bool,
    pub k: Option<usize>,
    pub k_multiples_popular: Option<bool>,
    pub ap_densities: Vec<String>,
    pub note: String,
}

/// Checks the inverse structure: when the popular differences of E are no
/// denser than E itself, the popular differences contain kN for the k
/// realized by the structure, and the AP-start densities stay at d(E).
pub fn verify_inverse_props(e: &EventuallyPeriodicSet, m_bound: usize) -> InverseReport {
    let d = densities(e);
    let pops = popular_differences(e, DensityMode::Upper);
    let d_pops = densities(&pops);
    if d.upper.is_zero() {
        return InverseReport {
            upper_density: rat_string(&d.upper),
            hypothesis_met: false,
            k: None,
            k_multiples_popular: None,
            ap_densities: vec![],
            note: "E has zero density".into(),
        };
    }
    // Hypothesis: the popular differences are exactly as dense as E itself,
    // i.e. E is extremal. For eventually periodic E this pins the structure
    // to a single residue class.
    if d_pops.upper != d.upper {
        return InverseReport {
            upper_density: rat_string(&d.upper),
            hypothesis_met: false,
            k: None,
            k_multiples_popular: None,
            ap_densities: vec![],
            note: format!(
                "popular differences have density {} > d(E) = {}",
                rat_string(&d_pops.upper),
                rat_string(&d.upper)
            ),
        };
    }
    // Find the least k >= 1 with kN inside the popular differences.
    let k_found = (1..=pops.period_len()).find(|&k| {
        EventuallyPeriodicSet::multiples(k)
            .expect("k >= 1")
            .is_subset_of(&pops)
    });
    let Some(k) = k_found else {
        return InverseReport {
            upper_density: rat_string(&d.upper),
            hypothesis_met: false,
            k: None,
            k_multiples_popular: None,
            ap_densities: vec![],
            note: "no k with kN inside the popular differences".into(),
        };
    };
    let ap: Vec<String> = (1..=m_bound)
        .map(|m| rat_string(&ap_density(e, k, m, DensityMode::Upper).expect("k, m >= 1")))
        .collect();
    InverseReport {
        upper_density: rat_string(&d.upper),
        hypothesis_met: true,
        k: Some(k),
        k_multiples_popular: Some(true),
        ap_densities: ap,
        note: String::new(),
    }
}
