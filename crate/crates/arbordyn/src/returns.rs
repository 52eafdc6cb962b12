//! Return-time sets of finite measure-preserving systems, Kneser structure,
//! and the inverse/stability statements they satisfy.

use crate::arith;
use crate::rational::{rat, Rat};
use crate::treespec::EventuallyPeriodicSet;
use crate::{Error, Result};
use num::integer::lcm;
use num::{One, Signed, Zero};

/// A finite measure-preserving system: a permutation of [0, n) with an
/// invariant rational measure. Invariance is enforced by requiring the
/// weights to be constant on every cycle.
#[derive(Debug, Clone)]
pub struct FiniteMPS {
    perm: Vec<usize>,
    weights: Vec<Rat>,
}

impl FiniteMPS {
    pub fn new(perm: Vec<usize>, weights: Vec<Rat>) -> Result<Self> {
        let n = perm.len();
        if n == 0 {
            return Err(Error::InvalidSystem("empty ground set".into()));
        }
        if weights.len() != n {
            return Err(Error::InvalidSystem("weight length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidSystem("not a permutation".into()));
            }
            seen[p] = true;
        }
        let total: Rat = weights.iter().cloned().sum();
        if !total.is_one() || weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidSystem("weights must be nonnegative and sum to 1".into()));
        }
        let mps = FiniteMPS { perm, weights };
        for cycle in mps.cycles() {
            let w0 = &mps.weights[cycle[0]];
            if cycle.iter().any(|&x| mps.weights[x] != *w0) {
                return Err(Error::InvalidSystem(
                    "weights must be constant on each cycle".into(),
                ));
            }
        }
        Ok(mps)
    }

    /// The rotation x -> x+1 on Z/n with uniform measure.
    pub fn rotation(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSystem("empty ground set".into()));
        }
        let perm = (0..n).map(|x| (x + 1) % n).collect();
        let w = rat(1, n as i64);
        Self::new(perm, vec![w; n])
    }

    /// Disjoint rotations with the given cycle lengths, uniform measure.
    pub fn from_cycle_type(cycles: &[usize]) -> Result<Self> {
        let n: usize = cycles.iter().sum();
        if n == 0 || cycles.iter().any(|&c| c == 0) {
            return Err(Error::InvalidSystem("cycle lengths must be positive".into()));
        }
        let mut perm = Vec::with_capacity(n);
        let mut base = 0;
        for &c in cycles {
            for i in 0..c {
                perm.push(base + (i + 1) % c);
            }
            base += c;
        }
        let w = rat(1, n as i64);
        Self::new(perm, vec![w; n])
    }

    /// The non-ergodic two-rotation family: cycles of lengths a and b with
    /// measure split evenly between them.
    pub fn two_cycles(a: usize, b: usize) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::InvalidSystem("cycle lengths must be positive".into()));
        }
        let mut perm = Vec::with_capacity(a + b);
        for i in 0..a {
            perm.push((i + 1) % a);
        }
        for i in 0..b {
            perm.push(a + (i + 1) % b);
        }
        let mut weights = vec![rat(1, 2 * a as i64); a];
        weights.extend(vec![rat(1, 2 * b as i64); b]);
        Self::new(perm, weights)
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.perm[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.perm[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Period of every correlation sequence: lcm of the cycle lengths.
    pub fn period(&self) -> usize {
        self.cycles().iter().fold(1, |acc, c| lcm(acc, c.len()))
    }

    /// Ergodic iff the support of the measure lies in a single cycle.
    pub fn is_ergodic(&self) -> bool {
        self.cycles()
            .iter()
            .filter(|c| !self.weights[c[0]].is_zero())
            .count()
            == 1
    }

    pub fn measure(&self, set: &[bool]) -> Rat {
        set.iter()
            .zip(&self.weights)
            .filter(|(&inc, _)| inc)
            .map(|(_, w)| w.clone())
            .sum()
    }

    /// S^{-1} B.
    pub fn preimage(&self, set: &[bool]) -> Vec<bool> {
        self.perm.iter().map(|&p| set[p]).collect()
    }

    fn preimage_pow(&self, set: &[bool], m: usize) -> Vec<bool> {
        let mut out = set.to_vec();
        for _ in 0..m {
            out = self.preimage(&out);
        }
        out
    }
}

/// One full period of an exact correlation sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationSeq {
    pub values: Vec<Rat>,
    pub period: usize,
}

impl CorrelationSeq {
    pub fn get(&self, m: usize) -> &Rat {
        &self.values[m % self.period]
    }
}

/// gamma_{A,B}(m) = nu(A intersect S^{-m} B), one full period.
pub fn correlation(mps: &FiniteMPS, a: &[bool], b: &[bool]) -> CorrelationSeq {
    let period = mps.period();
    let mut values = Vec::with_capacity(period);
    let mut shifted = b.to_vec();
    for _ in 0..period {
        let inter: Vec<bool> = a.iter().zip(&shifted).map(|(&x, &y)| x && y).collect();
        values.push(mps.measure(&inter));
        shifted = mps.preimage(&shifted);
    }
    CorrelationSeq { values, period }
}

fn periodic_set(period: usize, f: impl Fn(usize) -> bool) -> EventuallyPeriodicSet {
    EventuallyPeriodicSet::from_fn(0, period, f)
}

/// R = { n : gamma(n) > 0 }.
pub fn return_set(mps: &FiniteMPS, a: &[bool]) -> EventuallyPeriodicSet {
    let g = correlation(mps, a, a);
    periodic_set(g.period, |n| !g.get(n).is_zero())
}

/// R^delta = { n : gamma(n) > delta nu(A)^2 }.
pub fn return_set_delta(mps: &FiniteMPS, a: &[bool], delta: &Rat) -> Result<EventuallyPeriodicSet> {
    if !delta.is_positive() {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let nu = mps.measure(a);
    let bar = delta * &nu * &nu;
    let g = correlation(mps, a, a);
    Ok(periodic_set(g.period, |n| *g.get(n) > bar))
}

/// R_gamma = { n : gamma(n) >= (1 - gamma) nu(A) }.
pub fn return_set_gamma(mps: &FiniteMPS, a: &[bool], gamma: &Rat) -> Result<EventuallyPeriodicSet> {
    if !gamma.is_positive() || *gamma >= Rat::one() {
        return Err(Error::InvalidParameter("gamma must lie in (0, 1)".into()));
    }
    let nu = mps.measure(a);
    let bar = (Rat::one() - gamma) * nu;
    let g = correlation(mps, a, a);
    Ok(periodic_set(g.period, |n| *g.get(n) >= bar))
}

/// R_m^delta = { n : nu(A cap S^{-n}A cap S^{-(m+n)}A) > delta nu(A)^3 }.
pub fn return_set_m_delta(
    mps: &FiniteMPS,
    a: &[bool],
    m: usize,
    delta: &Rat,
) -> Result<EventuallyPeriodicSet> {
    if !delta.is_positive() {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let nu = mps.measure(a);
    let bar = delta * &nu * &nu * &nu;
    let period = mps.period();
    let mut flags = Vec::with_capacity(period);
    // Track S^{-n}A and S^{-(m+n)}A = S^{-n}(S^{-m}A) in lockstep.
    let mut shifted_n: Vec<bool> = a.to_vec();
    let mut shifted_mn: Vec<bool> = mps.preimage_pow(a, m);
    for _ in 0..period {
        let triple: Vec<bool> = (0..mps.n())
            .map(|x| a[x] && shifted_n[x] && shifted_mn[x])
            .collect();
        flags.push(mps.measure(&triple) > bar);
        shifted_n = mps.preimage(&shifted_n);
        shifted_mn = mps.preimage(&shifted_mn);
    }
    Ok(EventuallyPeriodicSet::new(vec![], flags).expect("period >= 1"))
}

/// R^eps_{A,B} = { n : nu(A cap S^{-n}B) > eps nu(A) nu(B) }.
pub fn transfer_set(
    mps: &FiniteMPS,
    a: &[bool],
    b: &[bool],
    eps: &Rat,
) -> Result<EventuallyPeriodicSet> {
    if eps.is_negative() {
        return Err(Error::InvalidParameter("epsilon must be nonnegative".into()));
    }
    let bar = eps * mps.measure(a) * mps.measure(b);
    let g = correlation(mps, a, b);
    Ok(periodic_set(g.period, |n| *g.get(n) > bar))
}

/// Sumset of two purely periodic sets of naturals; eventually periodic with
/// the lcm period after a 2-period run-in.
pub fn sumset(a: &EventuallyPeriodicSet, b: &EventuallyPeriodicSet) -> Result<EventuallyPeriodicSet> {
    if a.preperiod_len() != 0 || b.preperiod_len() != 0 {
        return Err(Error::InvalidParameter("sumset needs purely periodic sets".into()));
    }
    let p = lcm(a.period_len(), b.period_len());
    let test = |s: usize| -> bool {
        let limit = if s >= 2 * p { p } else { s + 1 };
        (0..limit).any(|x| a.contains(x) && s >= x && b.contains(s - x))
    };
    Ok(EventuallyPeriodicSet::from_fn(2 * p, p, test))
}

/// Minimal k such that the periodic part of S is a union of residue classes
/// mod k, with the residues K.
pub fn kneser_min_period(s: &EventuallyPeriodicSet) -> Result<(usize, Vec<usize>)> {
    if s.is_empty() {
        return Err(Error::InvalidParameter("empty set has no Kneser structure".into()));
    }
    let p = s.period_len();
    for k in 1..=p {
        if p % k != 0 {
            continue;
        }
        let residues = s.residues_mod(k);
        // Union of residue classes mod k: every member of a named residue
        // class within the periodic part is present.
        let pre = s.preperiod_len();
        let covered = (pre..pre + p).all(|n| s.contains(n) == residues.contains(&(n % k)));
        if covered {
            return Ok((k, residues));
        }
    }
    Ok((p, s.residues_mod(p)))
}

/// Kneser data for a subset of Z/k: stabilizer, sumset, and the inequality
/// |A+A| >= 2|A| - |H|.
#[derive(Debug, Clone)]
pub struct CyclicKneser {
    pub k: usize,
    pub stabilizer: Vec<usize>,
    pub sumset: Vec<usize>,
    pub bound_holds: bool,
}

fn rot_mask(mask: u32, g: usize, k: usize) -> u32 {
    let m = (1u32 << k) - 1;
    ((mask << g) | (mask >> (k - g))) & m
}

fn to_mask(k: usize, set: &[usize]) -> Result<u32> {
    let mut mask = 0u32;
    for &x in set {
        if x >= k {
            return Err(Error::InvalidParameter("element outside Z/k".into()));
        }
        mask |= 1 << x;
    }
    Ok(mask)
}

fn from_mask(k: usize, mask: u32) -> Vec<usize> {
    (0..k).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Sumset of two subsets of Z/k as bitmasks.
pub(crate) fn mask_sumset(k: usize, a: u32, b: u32) -> u32 {
    let mut out = 0u32;
    for g in 0..k {
        if a & (1 << g) != 0 {
            out |= rot_mask(b, g, k);
        }
    }
    out
}

/// Stabilizer H(S) = { g : g + S = S } as a bitmask.
pub(crate) fn mask_stabilizer(k: usize, s: u32) -> u32 {
    let mut out = 0u32;
    for g in 0..k {
        if rot_mask(s, g, k) == s {
            out |= 1 << g;
        }
    }
    out
}

pub fn kneser_cyclic(k: usize, set: &[usize]) -> Result<CyclicKneser> {
    if k == 0 || k > 31 {
        return Err(Error::InvalidParameter("need 1 <= k <= 31".into()));
    }
    if set.is_empty() {
        return Err(Error::InvalidParameter("empty set has no Kneser structure".into()));
    }
    let a = to_mask(k, set)?;
    let ss = mask_sumset(k, a, a);
    let h = mask_stabilizer(k, ss);
    let bound_holds =
        ss.count_ones() as i64 >= 2 * a.count_ones() as i64 - h.count_ones() as i64;
    Ok(CyclicKneser {
        k,
        stabilizer: from_mask(k, h),
        sumset: from_mask(k, ss),
        bound_holds,
    })
}

/// Conclusions of the inverse theorems for the return-time set.
#[derive(Debug, Clone)]
pub struct PartitionReport {
    pub nu_a: Rat,
    pub d_upper_r: Rat,
    pub hypothesis_equal: bool,
    pub k: Option<usize>,
    pub shift_partition_ok: Option<bool>,
    pub ergodic: bool,
    pub orbit_hypothesis: bool,
    pub orbit_k: Option<usize>,
    pub orbit_partition_ok: Option<bool>,
    pub note: String,
}

/// Indicator equality up to null sets.
fn equal_mod_null(mps: &FiniteMPS, x: &[bool], y: &[bool]) -> bool {
    x.iter()
        .zip(y)
        .zip(&mps.weights)
        .all(|((&a, &b), w)| a == b || w.is_zero())
}

pub fn verify_thm_partition(mps: &FiniteMPS, a: &[bool]) -> Result<PartitionReport> {
    let nu_a = mps.measure(a);
    if nu_a.is_zero() {
        return Err(Error::InvalidParameter("need a set of positive measure".into()));
    }
    let r = return_set(mps, a);
    let d = arith::densities(&r);
    let hypothesis_equal = d.upper == nu_a;
    let mut k = None;
    let mut shift_partition_ok = None;
    let mut note = String::new();
    if hypothesis_equal {
        let inv = Rat::one() / nu_a.clone();
        if inv.is_integer() {
            let kk: usize = inv.to_integer().try_into().map_err(|_| {
                Error::InvalidParameter("1/nu(A) out of range".into())
            })?;
            k = Some(kk);
            // X = A ⊔ S^{-1}A ⊔ ... ⊔ S^{-(k-1)}A up to null sets.
            let mut cover = vec![false; mps.n()];
            let mut disjoint = true;
            let mut shifted = a.to_vec();
            for _ in 0..kk {
                for (c, (&s, w)) in cover.iter_mut().zip(shifted.iter().zip(&mps.weights)) {
                    if s {
                        if *c && !w.is_zero() {
                            disjoint = false;
                        }
                        *c = true;
                    }
                }
                shifted = mps.preimage(&shifted);
            }
            let covers = equal_mod_null(mps, &cover, &vec![true; mps.n()]);
            shift_partition_ok = Some(disjoint && covers);
        } else {
            note = format!("1/nu(A) = {inv} is not an integer");
        }
    } else {
        note = format!("d(R) = {} differs from nu(A) = {}", d.upper, nu_a);
    }

    let ergodic = mps.is_ergodic();
    let d_lower = d.lower.clone();
    let orbit_hypothesis =
        ergodic && d_lower.is_positive() && d_lower < rat(3, 2) * nu_a.clone();
    let mut orbit_k = None;
    let mut orbit_partition_ok = None;
    if orbit_hypothesis {
        // R must be exactly kN for the least positive member k.
        let kk = (1..=r.period_len()).find(|&n| r.contains(n));
        if let Some(kk) = kk {
            if r == EventuallyPeriodicSet::multiples(kk)? {
                orbit_k = Some(kk);
                // U = union of S^{-jk}A over j; the k shifts of U partition X.
                let period = mps.period();
                let mut u = vec![false; mps.n()];
                let mut shifted = a.to_vec();
                for _ in 0..=period / kk + 1 {
                    for (uu, &s) in u.iter_mut().zip(&shifted) {
                        *uu |= s;
                    }
                    shifted = mps.preimage_pow(&shifted, kk);
                }
                let mut cover = vec![false; mps.n()];
                let mut disjoint = true;
                let mut shifted_u = u.clone();
                for _ in 0..kk {
                    for (c, (&s, w)) in
                        cover.iter_mut().zip(shifted_u.iter().zip(&mps.weights))
                    {
                        if s {
                            if *c && !w.is_zero() {
                                disjoint = false;
                            }
                            *c = true;
                        }
                    }
                    shifted_u = mps.preimage(&shifted_u);
                }
                let covers = equal_mod_null(mps, &cover, &vec![true; mps.n()]);
                orbit_partition_ok = Some(disjoint && covers);
            } else {
                orbit_partition_ok = Some(false);
            }
        }
    }
    Ok(PartitionReport {
        nu_a,
        d_upper_r: d.upper,
        hypothesis_equal,
        k,
        shift_partition_ok,
        ergodic,
        orbit_hypothesis,
        orbit_k,
        orbit_partition_ok,
        note,
    })
}

/// Threshold grid exhausting all behaviors of a normalized correlation: the
/// distinct positive values, their midpoints, and sentinels on both sides.
pub fn threshold_grid(values: &[Rat]) -> Vec<Rat> {
    let mut vs: Vec<Rat> = values.iter().filter(|v| v.is_positive()).cloned().collect();
    vs.sort();
    vs.dedup();
    let mut grid = Vec::new();
    if vs.is_empty() {
        return vec![rat(1, 2)];
    }
    let half = rat(1, 2);
    grid.push(vs[0].clone() * &half);
    for w in vs.windows(2) {
        grid.push((w[0].clone() + w[1].clone()) * &half);
    }
    grid.push(vs.last().unwrap().clone() + Rat::one());
    grid.extend(vs);
    grid.sort();
    grid.dedup();
    grid
}

#[derive(Debug, Clone)]
pub struct AppendixReport {
    pub hypothesis: bool,
    pub heavy_bound_ok: bool,
    pub double_bound_ok: bool,
    pub extracted_period: Option<usize>,
    pub extraction_ok: bool,
}

/// Checks the heavy-return and double-return density bounds and the
/// small-threshold period extraction on an ergodic system, with exact
/// thresholds. "All delta > 0" reduces to a finite grid because the
/// correlation takes finitely many values.
pub fn verify_appendix(
    mps: &FiniteMPS,
    a: &[bool],
    eta: &Rat,
    delta_grid: &[Rat],
    gamma_grid: &[Rat],
) -> Result<AppendixReport> {
    if eta.is_negative() || *eta >= rat(1, 5) {
        return Err(Error::InvalidParameter("need 0 <= eta < 1/5".into()));
    }
    if !mps.is_ergodic() {
        return Err(Error::InvalidSystem("appendix statements assume ergodicity".into()));
    }
    let nu = mps.measure(a);
    if nu.is_zero() {
        return Err(Error::InvalidParameter("need a set of positive measure".into()));
    }
    let bound = (Rat::one() + eta) * &nu;
    let hypothesis = delta_grid.iter().all(|d| {
        let rd = return_set_delta(mps, a, d).expect("positive delta");
        arith::densities(&rd).upper <= bound
    });

    let mut heavy_bound_ok = true;
    if hypothesis {
        for g in gamma_grid {
            let rg = return_set_gamma(mps, a, g)?;
            let lhs = arith::densities(&rg).lower;
            let rhs = (g - eta + g * eta) / g * &nu;
            if lhs < rhs {
                heavy_bound_ok = false;
            }
        }
    }

    // The double-return bound needs no hypothesis on ergodic systems.
    let mut double_bound_ok = true;
    for d in delta_grid {
        let rd = return_set_delta(mps, a, d)?;
        for m in 0..rd.period_len() {
            if !rd.contains(m) {
                continue;
            }
            for eps in delta_grid {
                if !eps.is_positive() || *eps >= Rat::one() {
                    continue;
                }
                let de = d * eps;
                let rmd = return_set_m_delta(mps, a, m, &de)?;
                let lhs = arith::densities(&rmd).lower;
                let rhs = (Rat::one() - eps) * &nu;
                if lhs < rhs {
                    double_bound_ok = false;
                }
            }
        }
    }

    // For delta below every positive normalized correlation R^delta = R;
    // under the hypothesis the claim is R = kN.
    let mut extracted_period = None;
    let mut extraction_ok = false;
    if hypothesis {
        let r = return_set(mps, a);
        if let Some(kk) = (1..=r.period_len()).find(|&n| r.contains(n)) {
            if r == EventuallyPeriodicSet::multiples(kk)? {
                let g = correlation(mps, a, a);
                let nu2 = &nu * &nu;
                let min_pos = g
                    .values
                    .iter()
                    .filter(|v| v.is_positive())
                    .min()
                    .cloned()
                    .unwrap_or_else(Rat::one);
                let small = min_pos / nu2 * rat(1, 2);
                let rd = return_set_delta(mps, a, &small)?;
                extraction_ok = rd == r;
                if extraction_ok {
                    extracted_period = Some(kk);
                }
            }
        }
    }
    Ok(AppendixReport { hypothesis, heavy_bound_ok, double_bound_ok, extracted_period, extraction_ok })
}

#[derive(Debug, Clone)]
pub struct SumCheckReport {
    pub closure_ok: bool,
    pub densities_checked: bool,
    pub densities_ok: Option<bool>,
}

/// Sum closure R_eps + R_gamma ⊆ R_{eps+gamma}, and the extremal-density
/// equalities when the extremal hypothesis holds.
pub fn lemma_sum_check(
    mps: &FiniteMPS,
    a: &[bool],
    eps: &Rat,
    gamma: &Rat,
) -> Result<SumCheckReport> {
    if eps.clone() + gamma >= Rat::one() {
        return Err(Error::InvalidParameter("need eps + gamma < 1".into()));
    }
    let re = return_set_gamma(mps, a, eps)?;
    let rg = return_set_gamma(mps, a, gamma)?;
    let sum_thresh = eps.clone() + gamma;
    let reg = return_set_gamma(mps, a, &sum_thresh)?;
    let p = mps.period();
    let mut closure_ok = true;
    for m in 0..p {
        if !re.contains(m) {
            continue;
        }
        for n in 0..p {
            if rg.contains(n) && !reg.contains(m + n) {
                closure_ok = false;
            }
        }
    }
    let nu = mps.measure(a);
    let r = return_set(mps, a);
    let extremal = arith::densities(&r).upper == nu && *gamma < rat(1, 2);
    let mut densities_ok = None;
    if extremal {
        let ss = sumset(&rg, &rg)?;
        let d_sum = arith::densities(&ss).upper;
        let d_g = arith::densities(&rg).upper;
        let d_r = arith::densities(&r).upper;
        densities_ok = Some(d_sum == d_g && d_g == d_r);
    }
    Ok(SumCheckReport {
        closure_ok,
        densities_checked: extremal,
        densities_ok,
    })
}

#[derive(Debug, Clone)]
pub struct TransferReport {
    pub lhs: Rat,
    pub rhs: Rat,
    pub holds: bool,
}

/// Open-question probe: mu(C) d(R_{A,B}) <= d(R_{A,C}) d(R_{B,C}). Reported
/// as data, never asserted.
pub fn transfer_inequality_probe(
    mps: &FiniteMPS,
    a: &[bool],
    b: &[bool],
    c: &[bool],
) -> Result<TransferReport> {
    let zero = rat(0, 1);
    let d_ab = arith::densities(&transfer_set(mps, a, b, &zero)?).upper;
    let d_ac = arith::densities(&transfer_set(mps, a, c, &zero)?).upper;
    let d_bc = arith::densities(&transfer_set(mps, b, c, &zero)?).upper;
    let lhs = mps.measure(c) * d_ab;
    let rhs = d_ac * d_bc;
    let holds = lhs <= rhs;
    Ok(TransferReport { lhs, rhs, holds })
}

/// Integer partitions of n, for sweeping cycle types.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for first in (1..=n.min(max)).rev() {
            cur.push(first);
            rec(n - first, first, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

fn subset_from_bits(n: usize, bits: u32) -> Vec<bool> {
    (0..n).map(|i| bits & (1 << i) != 0).collect()
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub checked: usize,
    pub counterexamples: Vec<String>,
}

/// Exhaustive shift-partition oracle over cyclic systems.
pub fn sweep_shift_partition(max_n: usize) -> Result<SweepReport> {
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for n in 1..=max_n {
        let mps = FiniteMPS::rotation(n)?;
        for bits in 1u32..(1 << n) {
            let a = subset_from_bits(n, bits);
            let rep = verify_thm_partition(&mps, &a)?;
            if rep.hypothesis_equal {
                checked += 1;
                if rep.shift_partition_ok != Some(true) {
                    counterexamples.push(format!("Z/{n} A bits {bits:b}"));
                }
            }
        }
    }
    Ok(SweepReport { checked, counterexamples })
}

/// Exhaustive Kneser bound |A+B| >= |A| + |B| - |H(A+B)| over Z/k.
pub fn sweep_kneser(max_k: usize) -> Result<SweepReport> {
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for k in 1..=max_k {
        for a in 1u32..(1 << k) {
            for b in 1u32..(1 << k) {
                let ss = mask_sumset(k, a, b);
                let h = mask_stabilizer(k, ss);
                checked += 1;
                if (ss.count_ones() as i64)
                    < a.count_ones() as i64 + b.count_ones() as i64 - h.count_ones() as i64
                {
                    counterexamples.push(format!("Z/{k} A {a:b} B {b:b}"));
                }
            }
        }
    }
    Ok(SweepReport { checked, counterexamples })
}

/// Exhaustive mean-ergodic lower bound d(R) >= nu(A) over all cycle types
/// of n <= max_n with uniform measure and all subsets. Pure bit arithmetic:
/// with uniform weights, positivity of the correlation at lag m only asks
/// whether A meets S^{-m}A.
pub fn sweep_mean_ergodic(max_n: usize) -> Result<SweepReport> {
    if max_n > 16 {
        return Err(Error::InvalidParameter("mean-ergodic sweep capped at n = 16".into()));
    }
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for n in 1..=max_n {
        for ct in partitions(n) {
            let mps = FiniteMPS::from_cycle_type(&ct)?;
            let period = mps.period();
            // pows[m][x] = S^m(x).
            let mut pows: Vec<Vec<usize>> = vec![(0..n).collect()];
            for m in 1..period {
                let prev = &pows[m - 1];
                pows.push(prev.iter().map(|&x| mps.perm[x]).collect());
            }
            for bits in 1u32..(1 << n) {
                let r_count = (0..period)
                    .filter(|&m| {
                        (0..n).any(|x| bits & (1 << x) != 0 && bits & (1 << pows[m][x]) != 0)
                    })
                    .count();
                checked += 1;
                // d(R) = r_count/period, nu(A) = |A|/n.
                if r_count * n < bits.count_ones() as usize * period {
                    counterexamples.push(format!("type {ct:?} A bits {bits:b}"));
                }
            }
        }
    }
    Ok(SweepReport { checked, counterexamples })
}

/// Exhaustive sum-closure check over all cycle types of n <= max_n with
/// uniform measure, all subsets, all realized threshold pairs.
pub fn sweep_sum_closure(max_n: usize) -> Result<SweepReport> {
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for n in 1..=max_n {
        for ct in partitions(n) {
            let mps = FiniteMPS::from_cycle_type(&ct)?;
            for bits in 1u32..(1 << n) {
                let a = subset_from_bits(n, bits);
                let nu = mps.measure(&a);
                let g = correlation(&mps, &a, &a);
                // Realized gamma thresholds: 1 - c/nu(A) for correlation
                // values c, clipped to (0, 1).
                let mut gammas: Vec<Rat> = g
                    .values
                    .iter()
                    .map(|c| Rat::one() - c / &nu)
                    .filter(|x| x.is_positive() && *x < Rat::one())
                    .collect();
                gammas.push(rat(1, 4));
                gammas.sort();
                gammas.dedup();
                for e in &gammas {
                    for gm in &gammas {
                        if e.clone() + gm >= Rat::one() {
                            continue;
                        }
                        checked += 1;
                        let rep = lemma_sum_check(&mps, &a, e, gm)?;
                        if !rep.closure_ok {
                            counterexamples
                                .push(format!("type {ct:?} A bits {bits:b} eps {e} gamma {gm}"));
                        }
                    }
                }
            }
        }
    }
    Ok(SweepReport { checked, counterexamples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(n: usize, xs: &[usize]) -> Vec<bool> {
        let mut v = vec![false; n];
        for &x in xs {
            v[x] = true;
        }
        v
    }

    #[test]
    fn correlation_examples() {
        let m6 = FiniteMPS::rotation(6).unwrap();
        let a = bits(6, &[0, 3]);
        let g = correlation(&m6, &a, &a);
        assert_eq!(g.period, 6);
        assert_eq!(
            g.values,
            vec![rat(1, 3), rat(0, 1), rat(0, 1), rat(1, 3), rat(0, 1), rat(0, 1)]
        );

        let all = bits(6, &[0, 1, 2, 3, 4, 5]);
        assert!(correlation(&m6, &all, &all).values.iter().all(|v| v.is_one()));

        let m4 = FiniteMPS::rotation(4).unwrap();
        let a = bits(4, &[0, 1]);
        let g = correlation(&m4, &a, &a);
        assert_eq!(g.values, vec![rat(1, 2), rat(1, 4), rat(0, 1), rat(1, 4)]);
    }

    #[test]
    fn return_set_examples() {
        let m6 = FiniteMPS::rotation(6).unwrap();
        let a = bits(6, &[0, 3]);
        let r = return_set(&m6, &a);
        assert_eq!(r, EventuallyPeriodicSet::multiples(3).unwrap());
        assert_eq!(arith::densities(&r).upper, rat(1, 3));

        let m4 = FiniteMPS::rotation(4).unwrap();
        let a = bits(4, &[0, 1]);
        let rd = return_set_delta(&m4, &a, &rat(1, 100)).unwrap();
        assert_eq!(arith::densities(&rd).upper, rat(3, 4));
        assert!(rd.contains(0) && rd.contains(1) && !rd.contains(2) && rd.contains(3));

        // gamma near 1 includes every positive correlation.
        let rg = return_set_gamma(&m4, &a, &rat(99, 100)).unwrap();
        let r = return_set(&m4, &a);
        assert!(r.is_subset_of(&rg));
    }

    #[test]
    fn return_sets_contain_zero_and_nest() {
        let m = FiniteMPS::from_cycle_type(&[4, 2]).unwrap();
        let a = bits(6, &[0, 4]);
        assert!(return_set(&m, &a).contains(0));
        // R^delta nonincreasing in delta, R_gamma nondecreasing in gamma.
        let mut prev: Option<EventuallyPeriodicSet> = None;
        for d in [rat(1, 10), rat(1, 2), rat(2, 1)] {
            let rd = return_set_delta(&m, &a, &d).unwrap();
            if let Some(p) = &prev {
                assert!(rd.is_subset_of(p));
            }
            prev = Some(rd);
        }
        let mut prev: Option<EventuallyPeriodicSet> = None;
        for g in [rat(1, 10), rat(1, 2), rat(9, 10)] {
            let rg = return_set_gamma(&m, &a, &g).unwrap();
            if let Some(p) = &prev {
                assert!(p.is_subset_of(&rg));
            }
            prev = Some(rg);
        }
    }

    #[test]
    fn mean_ergodic_lower_bound() {
        // d(R) >= nu(A) for every fixture.
        let fixtures: Vec<(FiniteMPS, Vec<bool>)> = vec![
            (FiniteMPS::rotation(6).unwrap(), bits(6, &[0, 3])),
            (FiniteMPS::rotation(4).unwrap(), bits(4, &[0, 1])),
            (FiniteMPS::from_cycle_type(&[3, 2]).unwrap(), bits(5, &[0, 3])),
            (FiniteMPS::two_cycles(3, 5).unwrap(), bits(8, &[0, 3])),
        ];
        for (m, a) in &fixtures {
            let d = arith::densities(&return_set(m, a)).lower;
            assert!(d >= m.measure(a));
        }
    }

    #[test]
    fn kneser_examples() {
        let (k, res) = kneser_min_period(&EventuallyPeriodicSet::multiples(3).unwrap()).unwrap();
        assert_eq!((k, res), (3, vec![0]));

        let ck = kneser_cyclic(8, &[0, 1]).unwrap();
        assert_eq!(ck.sumset, vec![0, 1, 2]);
        assert_eq!(ck.stabilizer, vec![0]);
        assert!(ck.bound_holds);

        let full: Vec<usize> = (0..5).collect();
        let ck = kneser_cyclic(5, &full).unwrap();
        assert_eq!(ck.stabilizer, full.clone());
        assert_eq!(ck.sumset, full);

        assert!(kneser_cyclic(5, &[]).is_err());
    }

    #[test]
    fn thm_partition_examples() {
        let m6 = FiniteMPS::rotation(6).unwrap();
        let rep = verify_thm_partition(&m6, &bits(6, &[0, 3])).unwrap();
        assert!(rep.hypothesis_equal);
        assert_eq!(rep.k, Some(3));
        assert_eq!(rep.shift_partition_ok, Some(true));
        assert!(rep.orbit_hypothesis);
        assert_eq!(rep.orbit_k, Some(3));
        assert_eq!(rep.orbit_partition_ok, Some(true));

        let m4 = FiniteMPS::rotation(4).unwrap();
        let rep = verify_thm_partition(&m4, &bits(4, &[0, 1])).unwrap();
        assert!(!rep.hypothesis_equal);
        assert!(rep.k.is_none());

        for k in 2..=6 {
            let m = FiniteMPS::rotation(k).unwrap();
            let rep = verify_thm_partition(&m, &bits(k, &[0])).unwrap();
            assert_eq!(rep.k, Some(k));
            assert_eq!(rep.shift_partition_ok, Some(true));
        }
    }

    #[test]
    fn non_ergodic_coprime_cycles() {
        // Two coprime cycles: the orbit branch must not apply, and R can be
        // denser than a single residue class.
        let m = FiniteMPS::two_cycles(2, 3).unwrap();
        let a = bits(5, &[0, 2]);
        let rep = verify_thm_partition(&m, &a).unwrap();
        assert!(!rep.ergodic);
        assert!(!rep.orbit_hypothesis);
    }

    #[test]
    fn appendix_examples() {
        let m4 = FiniteMPS::rotation(4).unwrap();
        let a = bits(4, &[0]);
        let g = correlation(&m4, &a, &a);
        let nu = m4.measure(&a);
        let normalized: Vec<Rat> = g.values.iter().map(|v| v / (&nu * &nu)).collect();
        let dgrid = threshold_grid(&normalized);
        let ggrid = vec![rat(1, 4), rat(1, 2), rat(3, 4)];
        let rep = verify_appendix(&m4, &a, &rat(0, 1), &dgrid, &ggrid).unwrap();
        assert!(rep.hypothesis && rep.heavy_bound_ok && rep.double_bound_ok);
        assert_eq!(rep.extracted_period, Some(4));

        let m6 = FiniteMPS::rotation(6).unwrap();
        let a = bits(6, &[0, 3]);
        let g = correlation(&m6, &a, &a);
        let nu = m6.measure(&a);
        let normalized: Vec<Rat> = g.values.iter().map(|v| v / (&nu * &nu)).collect();
        let rep =
            verify_appendix(&m6, &a, &rat(0, 1), &threshold_grid(&normalized), &ggrid).unwrap();
        assert!(rep.hypothesis && rep.heavy_bound_ok && rep.double_bound_ok);
        assert_eq!(rep.extracted_period, Some(3));

        assert!(verify_appendix(&m6, &a, &rat(1, 5), &dgrid, &ggrid).is_err());
        let nonerg = FiniteMPS::two_cycles(2, 3).unwrap();
        assert!(verify_appendix(&nonerg, &bits(5, &[0]), &rat(0, 1), &dgrid, &ggrid).is_err());
    }

    #[test]
    fn r_m_delta_example() {
        // Z/3, A={0}: the triple correlation is 1/3 on m, n both multiples
        // of 3, so R_0^{delta} = 3N for small delta.
        let m3 = FiniteMPS::rotation(3).unwrap();
        let a = bits(3, &[0]);
        let r = return_set_m_delta(&m3, &a, 0, &rat(1, 2)).unwrap();
        assert_eq!(r, EventuallyPeriodicSet::multiples(3).unwrap());
        assert!(arith::densities(&r).lower >= rat(1, 2) * rat(1, 3));
    }

    #[test]
    fn sum_check_examples() {
        let m6 = FiniteMPS::rotation(6).unwrap();
        let a = bits(6, &[0, 3]);
        let rep = lemma_sum_check(&m6, &a, &rat(1, 4), &rat(1, 4)).unwrap();
        assert!(rep.closure_ok);
        assert!(rep.densities_checked);
        assert_eq!(rep.densities_ok, Some(true));

        let m4 = FiniteMPS::rotation(4).unwrap();
        let a = bits(4, &[0, 1]);
        let rep = lemma_sum_check(&m4, &a, &rat(3, 10), &rat(3, 10)).unwrap();
        assert!(rep.closure_ok);
        assert!(!rep.densities_checked);

        assert!(lemma_sum_check(&m4, &a, &rat(1, 2), &rat(1, 2)).is_err());
    }

    #[test]
    fn sumset_matches_brute_force() {
        let a = EventuallyPeriodicSet::multiples(3).unwrap();
        let b = EventuallyPeriodicSet::from_elements(&[1, 4], 6).unwrap();
        let s = sumset(&a, &b).unwrap();
        for n in 0..60 {
            let direct = (0..=n).any(|x| a.contains(x) && b.contains(n - x));
            assert_eq!(s.contains(n), direct, "n={n}");
        }
        let kn = sumset(&a, &a).unwrap();
        assert_eq!(kn, a);
    }

    #[test]
    fn transfer_probe_examples() {
        let m6 = FiniteMPS::rotation(6).unwrap();
        let a = bits(6, &[0, 3]);
        let rep = transfer_inequality_probe(&m6, &a, &a, &a).unwrap();
        assert_eq!(rep.lhs, rep.rhs);
        assert!(rep.holds);

        let all = bits(6, &[0, 1, 2, 3, 4, 5]);
        let rep = transfer_inequality_probe(&m6, &all, &all, &all).unwrap();
        assert_eq!(rep.lhs, rat(1, 1));
        assert!(rep.holds);

        let m4 = FiniteMPS::rotation(4).unwrap();
        let rep =
            transfer_inequality_probe(&m4, &bits(4, &[0, 1]), &bits(4, &[0]), &bits(4, &[2]))
                .unwrap();
        assert!(rep.lhs.is_positive() || rep.lhs.is_zero());
        let _ = rep.holds;
    }

    #[test]
    fn small_sweeps_clean() {
        let rep = sweep_shift_partition(6).unwrap();
        assert!(rep.counterexamples.is_empty());
        assert!(rep.checked > 0);

        let rep = sweep_kneser(6).unwrap();
        assert!(rep.counterexamples.is_empty());

        let rep = sweep_sum_closure(5).unwrap();
        assert!(rep.counterexamples.is_empty());
        assert!(rep.checked > 0);

        let rep = sweep_mean_ergodic(7).unwrap();
        assert!(rep.counterexamples.is_empty());
        // Cross-check the bit path against the rational path on one system.
        let mps = FiniteMPS::from_cycle_type(&[3, 2]).unwrap();
        let a = bits(5, &[0, 3]);
        let d = arith::densities(&return_set(&mps, &a)).lower;
        assert!(d >= mps.measure(&a));
    }

    #[test]
    fn partitions_count() {
        assert_eq!(partitions(4).len(), 5);
        assert_eq!(partitions(10).len(), 42);
    }

    #[test]
    fn invalid_systems_rejected() {
        assert!(FiniteMPS::new(vec![0, 0], vec![rat(1, 2), rat(1, 2)]).is_err());
        assert!(FiniteMPS::new(vec![1, 0], vec![rat(3, 4), rat(1, 4)]).is_err());
        assert!(FiniteMPS::new(vec![1, 0], vec![rat(1, 2), rat(1, 2)]).is_ok());
    }
}
