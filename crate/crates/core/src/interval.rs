//! Occurrence intervals and the five basic multiplicities.
//!
//! An [`Interval`] is a nonempty set of consecutive naturals `[lo; hi]` where
//! `hi` may be unbounded. Shape graphs only ever store a [`Multiplicity`], but
//! the statistics gathered from typed graphs keep exact intervals, since the
//! inference arithmetic needs raw counts rather than values clipped to the
//! basic ones.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("empty occurrence set")]
    EmptyOccurrenceSet,
    #[error("invalid interval: lower bound {lo} exceeds upper bound {hi}")]
    Inverted { lo: u64, hi: u64 },
}

/// Upper end of an interval; `None` stands for infinity.
pub type Upper = Option<u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    lo: u64,
    hi: Upper,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0, hi: Some(0) };

    pub fn new(lo: u64, hi: Upper) -> Result<Self, IntervalError> {
        match hi {
            Some(h) if h < lo => Err(IntervalError::Inverted { lo, hi: h }),
            _ => Ok(Interval { lo, hi }),
        }
    }

    pub fn exact(n: u64) -> Self {
        Interval { lo: n, hi: Some(n) }
    }

    pub fn at_least(n: u64) -> Self {
        Interval { lo: n, hi: None }
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> Upper {
        self.hi
    }

    pub fn is_unbounded(&self) -> bool {
        self.hi.is_none()
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.lo && self.hi.is_none_or(|h| n <= h)
    }

    /// Point-wise sum; infinity absorbs.
    pub fn add(&self, other: &Interval) -> Interval {
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Interval {
            lo: self.lo + other.lo,
            hi,
        }
    }

    /// `self ⊆ other` as sets of naturals.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        if other.lo > self.lo {
            return false;
        }
        match (self.hi, other.hi) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        }
    }

    /// Smallest interval covering both operands.
    pub fn hull(&self, other: &Interval) -> Interval {
        let hi = match (self.hi, other.hi) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        Interval {
            lo: self.lo.min(other.lo),
            hi,
        }
    }

    /// The smallest interval containing every count.
    pub fn fit<I: IntoIterator<Item = u64>>(counts: I) -> Result<Interval, IntervalError> {
        let mut it = counts.into_iter();
        let first = it.next().ok_or(IntervalError::EmptyOccurrenceSet)?;
        let (lo, hi) = it.fold((first, first), |(lo, hi), c| (lo.min(c), hi.max(c)));
        Ok(Interval { lo, hi: Some(hi) })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) => write!(f, "[{};{}]", self.lo, h),
            None => write!(f, "[{};inf]", self.lo),
        }
    }
}

/// The basic multiplicities `⟨0⟩ ⟨?⟩ ⟨1⟩ ⟨+⟩ ⟨*⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Multiplicity {
    Zero,
    Opt,
    One,
    Plus,
    Star,
}

impl Multiplicity {
    pub const ALL: [Multiplicity; 5] = [
        Multiplicity::Zero,
        Multiplicity::Opt,
        Multiplicity::One,
        Multiplicity::Plus,
        Multiplicity::Star,
    ];

    // Zero and One first: they are minimal, and neither contains the other.
    const BY_SIZE: [Multiplicity; 5] = [
        Multiplicity::Zero,
        Multiplicity::One,
        Multiplicity::Opt,
        Multiplicity::Plus,
        Multiplicity::Star,
    ];

    pub fn interval(self) -> Interval {
        match self {
            Multiplicity::Zero => Interval::exact(0),
            Multiplicity::Opt => Interval { lo: 0, hi: Some(1) },
            Multiplicity::One => Interval::exact(1),
            Multiplicity::Plus => Interval::at_least(1),
            Multiplicity::Star => Interval::at_least(0),
        }
    }

    /// Exact inverse of [`Multiplicity::interval`].
    pub fn from_interval(interval: Interval) -> Option<Multiplicity> {
        Self::ALL.into_iter().find(|m| m.interval() == interval)
    }

    /// Build from a minimum in `{0, 1}` and a maximum in `{0, 1, inf}`.
    pub fn from_bounds(min: u64, max: Upper) -> Option<Multiplicity> {
        Interval::new(min, max).ok().and_then(Self::from_interval)
    }

    /// Least basic multiplicity whose interval contains `interval`.
    pub fn smallest_containing(interval: Interval) -> Multiplicity {
        Self::BY_SIZE
            .into_iter()
            .find(|m| interval.is_subset_of(&m.interval()))
            .unwrap_or(Multiplicity::Star)
    }

    pub fn fit<I: IntoIterator<Item = u64>>(counts: I) -> Result<Multiplicity, IntervalError> {
        Interval::fit(counts).map(Self::smallest_containing)
    }

    pub fn min(self) -> u64 {
        self.interval().lo()
    }

    pub fn max(self) -> Upper {
        self.interval().hi()
    }

    pub fn is_unbounded(self) -> bool {
        self.max().is_none()
    }

    /// Suffix used by the schema text format; `⟨1⟩` has none and `⟨0⟩` is
    /// never written.
    pub fn suffix(self) -> &'static str {
        match self {
            Multiplicity::Zero => "{0}",
            Multiplicity::Opt => "?",
            Multiplicity::One => "",
            Multiplicity::Plus => "+",
            Multiplicity::Star => "*",
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Multiplicity::Zero => "0",
            Multiplicity::Opt => "?",
            Multiplicity::One => "1",
            Multiplicity::Plus => "+",
            Multiplicity::Star => "*",
        };
        f.write_str(s)
    }
}
