//! Eventually periodic sequences and subsets of the naturals.

use crate::rational::{rat_string, Rat};
use crate::{Error, Result};

/// An infinite sequence that is eventually periodic: read from `preperiod`
/// while the index is within it, then cycle through `period`.
///
/// Always kept canonical (minimal period, then minimal preperiod), so
/// structural equality coincides with extensional equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodic<T> {
    preperiod: Vec<T>,
    period: Vec<T>,
}

impl<T: Clone + Eq> EventuallyPeriodic<T> {
    pub fn new(preperiod: Vec<T>, period: Vec<T>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidParameter("period must be nonempty".into()));
        }
        let mut seq = Self { preperiod, period };
        seq.canonicalize();
        Ok(seq)
    }

    /// Builds the canonical representation of `n -> f(n)` assuming the
    /// sequence is periodic with the given period beyond `pre_len`.
    pub fn from_fn(pre_len: usize, period_len: usize, f: impl Fn(usize) -> T) -> Self {
        assert!(period_len >= 1);
        let preperiod = (0..pre_len).map(&f).collect();
        let period = (pre_len..pre_len + period_len).map(&f).collect();
        let mut seq = Self { preperiod, period };
        seq.canonicalize();
        seq
    }

    pub fn get(&self, n: usize) -> &T {
        if n < self.preperiod.len() {
            &self.preperiod[n]
        } else {
            &self.period[(n - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn preperiod(&self) -> &[T] {
        &self.preperiod
    }

    pub fn period(&self) -> &[T] {
        &self.period
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    pub fn preperiod_len(&self) -> usize {
        self.preperiod.len()
    }

    /// Shifts the sequence left by `m`: the result reads `n -> self(n + m)`.
    pub fn shift(&self, m: usize) -> Self {
        Self::from_fn(
            self.preperiod.len().saturating_sub(m),
            self.period.len(),
            |n| self.get(n + m).clone(),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> + '_ {
        (0..).map(move |n| self.get(n))
    }

    // Minimal period first (the valid period lengths of a periodic tail form
    // the multiples of the minimal one, so it suffices to scan divisors),
    // then absorb trailing preperiod entries that already agree with the
    // cycle.
    fn canonicalize(&mut self) {
        let len = self.period.len();
        for d in 1..=len {
            if len % d == 0 && (0..len).all(|i| self.period[i] == self.period[i % d]) {
                self.period.truncate(d);
                break;
            }
        }
        while let Some(last) = self.preperiod.last() {
            if *last == self.period[self.period.len() - 1] {
                self.preperiod.pop();
                self.period.rotate_right(1);
            } else {
                break;
            }
        }
    }
}

/// A subset of the naturals given by an eventually periodic membership
/// sequence. Supports exact densities and set algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodicSet(EventuallyPeriodic<bool>);

impl EventuallyPeriodicSet {
    pub fn new(preperiod: Vec<bool>, period: Vec<bool>) -> Result<Self> {
        Ok(Self(EventuallyPeriodic::new(preperiod, period)?))
    }

    pub fn from_fn(pre_len: usize, period_len: usize, f: impl Fn(usize) -> bool) -> Self {
        Self(EventuallyPeriodic::from_fn(pre_len, period_len, f))
    }

    pub fn empty() -> Self {
        Self::from_fn(0, 1, |_| false)
    }

    pub fn full() -> Self {
        Self::from_fn(0, 1, |_| true)
    }

    /// The multiples of k: `{0, k, 2k, ...}`.
    pub fn multiples(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("multiples of 0".into()));
        }
        Ok(Self::from_fn(0, k, |n| n % k == 0))
    }

    /// `kN \ mN`.
    pub fn multiples_minus(k: usize, m: usize) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::InvalidParameter("multiples of 0".into()));
        }
        let p = num::integer::lcm(k, m);
        Ok(Self::from_fn(0, p, |n| n % k == 0 && n % m != 0))
    }

    pub fn from_elements(elements: &[usize], period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidParameter("period must be positive".into()));
        }
        Ok(Self::from_fn(0, period, |n| {
            elements.contains(&(n % period))
        }))
    }

    pub fn contains(&self, n: usize) -> bool {
        *self.0.get(n)
    }

    pub fn inner(&self) -> &EventuallyPeriodic<bool> {
        &self.0
    }

    pub fn preperiod_len(&self) -> usize {
        self.0.preperiod_len()
    }

    pub fn period_len(&self) -> usize {
        self.0.period_len()
    }

    /// Number of members per period (within the periodic part).
    pub fn ones_per_period(&self) -> usize {
        self.0.period.iter().filter(|b| **b).count()
    }

    /// True when only finitely many members exist.
    pub fn is_finite(&self) -> bool {
        self.ones_per_period() == 0
    }

    pub fn is_empty(&self) -> bool {
        self.is_finite() && !self.0.preperiod.iter().any(|b| *b)
    }

    pub fn complement(&self) -> Self {
        Self::from_fn(self.preperiod_len(), self.period_len(), |n| {
            !self.contains(n)
        })
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let pre = self.preperiod_len().max(other.preperiod_len());
        let p = num::integer::lcm(self.period_len(), other.period_len());
        Self::from_fn(pre, p, |n| self.contains(n) && other.contains(n))
    }

    pub fn union(&self, other: &Self) -> Self {
        let pre = self.preperiod_len().max(other.preperiod_len());
        let p = num::integer::lcm(self.period_len(), other.period_len());
        Self::from_fn(pre, p, |n| self.contains(n) || other.contains(n))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intersect(other) == *self
    }

    /// `E - m = { n : n + m in E }`.
    pub fn shift_back(&self, m: usize) -> Self {
        Self(self.0.shift(m))
    }

    /// Exact limit density (exists for eventually periodic sets).
    pub fn density(&self) -> Rat {
        Rat::new(
            (self.ones_per_period() as i64).into(),
            (self.period_len() as i64).into(),
        )
    }

    /// Members below `bound`.
    pub fn members_below(&self, bound: usize) -> Vec<usize> {
        (0..bound).filter(|&n| self.contains(n)).collect()
    }

    /// Residues mod `k` met by the periodic part (infinitely often).
    pub fn residues_mod(&self, k: usize) -> Vec<usize> {
        assert!(k >= 1);
        let pre = self.preperiod_len();
        let span = num::integer::lcm(self.period_len(), k);
        let mut out: Vec<usize> = (pre..pre + span)
            .filter(|&n| self.contains(n))
            .map(|n| n % k)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn describe(&self) -> String {
        format!(
            "pre={:?} per={:?} density={}",
            self.0.preperiod,
            self.0.period,
            rat_string(&self.density())
        )
    }
}
