use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]`; `hi` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() {
            return Err(Error::InvalidSupport(format!("left endpoint {lo} must be finite")));
        }
        if hi.is_nan() || hi == f64::NEG_INFINITY || hi < lo {
            return Err(Error::InvalidSupport(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

/// A finite union of disjoint closed intervals, sorted by left endpoint.
///
/// Only the last piece may be unbounded. Pieces of zero length are dropped
/// since they carry no measure; touching pieces are merged.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SupportSet {
    pieces: Vec<Interval>,
}

impl SupportSet {
    pub fn empty() -> Self {
        SupportSet { pieces: Vec::new() }
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::from_intervals(vec![Interval::new(lo, hi)?])
    }

    pub fn half_line(lo: f64) -> Result<Self> {
        Self::interval(lo, f64::INFINITY)
    }

    /// Builds a set from arbitrary (possibly overlapping) intervals.
    pub fn from_intervals(mut pieces: Vec<Interval>) -> Result<Self> {
        for p in &pieces {
            Interval::new(p.lo, p.hi)?;
        }
        pieces.retain(|p| p.hi > p.lo);
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match out.last_mut() {
                Some(last) if p.lo <= last.hi => last.hi = last.hi.max(p.hi),
                _ => out.push(p),
            }
        }
        Ok(SupportSet { pieces: out })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let pieces = pairs.iter().map(|&(a, b)| Interval::new(a, b)).collect::<Result<Vec<_>>>()?;
        Self::from_intervals(pieces)
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.pieces.last().is_none_or(|p| p.is_bounded())
    }

    pub fn measure(&self) -> f64 {
        self.pieces.iter().map(Interval::len).sum()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.pieces.iter().any(|p| p.contains(t))
    }

    /// Smallest and largest points, if non-empty.
    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.pieces.first()?.lo, self.pieces.last()?.hi))
    }

    /// All finite endpoints, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.pieces.iter().flat_map(|p| [p.lo, p.hi]).filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    pub fn intersect(&self, other: &SupportSet) -> SupportSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.pieces.len() && j < other.pieces.len() {
            let a = self.pieces[i];
            let b = other.pieces[j];
            let lo = a.lo.max(b.lo);
            let hi = a.hi.min(b.hi);
            if hi > lo {
                out.push(Interval { lo, hi });
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        SupportSet { pieces: out }
    }

    pub fn union(&self, other: &SupportSet) -> SupportSet {
        let mut all = self.pieces.clone();
        all.extend_from_slice(&other.pieces);
        SupportSet::from_intervals(all).expect("union of valid sets is valid")
    }

    /// Set difference up to measure zero.
    pub fn difference(&self, other: &SupportSet) -> SupportSet {
        let mut out = Vec::new();
        for a in &self.pieces {
            let mut lo = a.lo;
            let mut done = false;
            for b in &other.pieces {
                if b.hi <= lo || b.lo >= a.hi {
                    continue;
                }
                if b.lo > lo {
                    out.push(Interval { lo, hi: b.lo });
                }
                if b.hi >= a.hi {
                    done = true;
                    break;
                }
                lo = lo.max(b.hi);
            }
            if !done && a.hi > lo {
                out.push(Interval { lo, hi: a.hi });
            }
        }
        SupportSet { pieces: out }
    }

    /// Splits every piece at the given sorted cut points.
    pub fn split_at(&self, cuts: &[f64]) -> Vec<Interval> {
        let mut out = Vec::new();
        for p in &self.pieces {
            let mut lo = p.lo;
            for &c in cuts {
                if c > lo && c < p.hi {
                    out.push(Interval { lo, hi: c });
                    lo = c;
                }
            }
            out.push(Interval { lo, hi: p.hi });
        }
        out
    }

    pub(crate) fn cmp_key(&self, other: &SupportSet) -> Ordering {
        for (a, b) in self.pieces.iter().zip(&other.pieces) {
            let c = a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi));
            if c != Ordering::Equal {
                return c;
            }
        }
        self.pieces.len().cmp(&other.pieces.len())
    }
}

impl fmt::Display for SupportSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "∅");
        }
        for (k, p) in self.pieces.iter().enumerate() {
            if k > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "[{}, {}]", p.lo, p.hi)?;
        }
        Ok(())
    }
}

/// Intersection of optional windows, `None` meaning the whole line.
pub(crate) fn meet(a: Option<&SupportSet>, b: Option<&SupportSet>) -> Option<SupportSet> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(x.intersect(y)),
    }
}
