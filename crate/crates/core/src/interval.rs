use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A real interval with possibly infinite endpoints. Infinite endpoints are
/// always open; `lo < hi` is enforced on construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T: Real> {
    pub lo: T,
    pub hi: T,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidInput(format!(
                "interval endpoints must satisfy lo < hi, got [{lo}, {hi}]"
            )));
        }
        let lo_closed = lo_closed && lo.is_finite();
        let hi_closed = hi_closed && hi.is_finite();
        Ok(Interval { lo, hi, lo_closed, hi_closed })
    }

    pub fn closed(lo: T, hi: T) -> Self {
        Self::new(lo, hi, true, true).expect("closed interval")
    }

    /// `[0, 1]`
    pub fn unit() -> Self {
        Self::closed(T::zero(), T::one())
    }

    /// `[0, +inf)`
    pub fn nonneg() -> Self {
        Self::new(T::zero(), T::infinity(), true, false).expect("half-line")
    }

    /// `(-inf, +inf)`
    pub fn real_line() -> Self {
        Self::new(T::neg_infinity(), T::infinity(), false, false).expect("real line")
    }

    pub fn contains(&self, x: T) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below && x.is_finite()
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// True when `other` is contained in `self`.
    pub fn covers(&self, other: &Interval<T>) -> bool {
        let lo_ok = self.lo < other.lo
            || (self.lo == other.lo && (self.lo_closed || !other.lo_closed));
        let hi_ok = self.hi > other.hi
            || (self.hi == other.hi && (self.hi_closed || !other.hi_closed));
        lo_ok && hi_ok
    }

    /// Clip to a bounded window, used when sampling over unbounded domains.
    pub fn window(&self, lo: T, hi: T) -> Self {
        let a = if self.lo > lo { self.lo } else { lo };
        let b = if self.hi < hi { self.hi } else { hi };
        Self::new(a, b, true, true).expect("window")
    }

    /// Uniform grid of `m >= 2` points over a bounded interval.
    pub fn grid(&self, m: usize) -> Vec<T> {
        assert!(self.is_bounded() && m >= 2);
        let step = (self.hi - self.lo) / T::from_index(m - 1);
        (0..m).map(|i| self.lo + step * T::from_index(i)).collect()
    }
}

impl<T: Real> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}
