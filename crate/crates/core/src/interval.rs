//! Finite unions of closed rational intervals in canonical form.

use std::fmt;
use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, Rational};

/// Default bound on the number of intervals an operation may produce.
pub const DEFAULT_MAX_INTERVALS: usize = 1_000_000;

/// Interval cap, overridable once per process through `HAARLAB_MAX_INTERVALS`.
pub fn max_intervals() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("HAARLAB_MAX_INTERVALS")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_INTERVALS)
    })
}

fn check_cap(count: usize) -> Result<()> {
    let cap = max_intervals();
    if count > cap {
        Err(Error::CapacityExceeded { count, cap })
    } else {
        Ok(())
    }
}

/// A closed interval `[lo, hi]`, possibly a single point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "crate::numeric::rational_str")]
    pub lo: Rational,
    #[serde(with = "crate::numeric::rational_str")]
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::MalformedInterval { lo: format_rational(&lo), hi: format_rational(&hi) });
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Sorted, pairwise disjoint, non-touching closed intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalUnion {
    intervals: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion::default()
    }

    pub fn single(lo: Rational, hi: Rational) -> Result<Self> {
        Ok(IntervalUnion { intervals: vec![Interval::new(lo, hi)?] })
    }

    pub fn point(x: Rational) -> Self {
        IntervalUnion { intervals: vec![Interval::point(x)] }
    }

    /// Canonical form of an arbitrary list of closed intervals.
    pub fn normalize<I>(raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let raw = raw.into_iter().map(|(lo, hi)| Interval::new(lo, hi)).collect::<Result<Vec<_>>>()?;
        check_cap(raw.len())?;
        Ok(Self::from_intervals(raw))
    }

    /// Canonical form of already validated intervals.
    pub fn from_intervals(mut raw: Vec<Interval>) -> Self {
        raw.sort_unstable_by(|a, b| a.lo.cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(raw.len());
        for iv in raw {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        IntervalUnion { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn into_intervals(self) -> Vec<Interval> {
        self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn has_interior(&self) -> bool {
        self.intervals.iter().any(|iv| iv.lo < iv.hi)
    }

    pub fn inf(&self) -> Option<&Rational> {
        self.intervals.first().map(|iv| &iv.lo)
    }

    pub fn sup(&self) -> Option<&Rational> {
        self.intervals.last().map(|iv| &iv.hi)
    }

    pub fn total_length(&self) -> Rational {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        let idx = self.intervals.partition_point(|iv| &iv.hi < x);
        self.intervals.get(idx).is_some_and(|iv| iv.contains(x))
    }

    /// Whether `other` is a subset of `self`.
    pub fn contains(&self, other: &IntervalUnion) -> bool {
        other.intervals.iter().all(|iv| {
            let idx = self.intervals.partition_point(|s| s.hi < iv.lo);
            self.intervals.get(idx).is_some_and(|s| s.lo <= iv.lo && iv.hi <= s.hi)
        })
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].lo.clone().max(b[j].lo.clone());
            let hi = a[i].hi.clone().min(b[j].hi.clone());
            if lo <= hi {
                out.push(Interval { lo, hi });
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalUnion { intervals: out }
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut all = self.intervals.clone();
        all.extend(other.intervals.iter().cloned());
        Self::from_intervals(all)
    }

    pub fn translate(&self, t: &Rational) -> IntervalUnion {
        IntervalUnion {
            intervals: self.intervals.iter().map(|iv| Interval { lo: &iv.lo + t, hi: &iv.hi + t }).collect(),
        }
    }

    pub fn negate(&self) -> IntervalUnion {
        IntervalUnion {
            intervals: self.intervals.iter().rev().map(|iv| Interval { lo: -&iv.hi, hi: -&iv.lo }).collect(),
        }
    }

    /// Multiplication by a positive rational.
    pub fn scale(&self, factor: &Rational) -> IntervalUnion {
        assert!(factor.is_positive(), "scale factor must be positive");
        IntervalUnion {
            intervals: self.intervals.iter().map(|iv| Interval { lo: &iv.lo * factor, hi: &iv.hi * factor }).collect(),
        }
    }

    /// `{u - v : u in self, v in other}`.
    pub fn minkowski_diff(&self, other: &IntervalUnion) -> Result<IntervalUnion> {
        check_cap(self.len().saturating_mul(other.len()))?;
        let mut raw = Vec::with_capacity(self.len() * other.len());
        for u in &self.intervals {
            for v in &other.intervals {
                raw.push(Interval { lo: &u.lo - &v.hi, hi: &u.hi - &v.lo });
            }
        }
        Ok(Self::from_intervals(raw))
    }

    /// `self + [0, eps]`.
    pub fn pad(&self, eps: &Rational) -> Result<IntervalUnion> {
        if eps.is_negative() {
            return Err(Error::Precondition("pad width must be non-negative".into()));
        }
        Ok(Self::from_intervals(
            self.intervals.iter().map(|iv| Interval { lo: iv.lo.clone(), hi: &iv.hi + eps }).collect(),
        ))
    }

    /// One step of the IFS `U -> union over offsets of (U + offset) / ratio`.
    pub fn ifs_step(&self, ratio: &Rational, offsets: &[Rational]) -> Result<IntervalUnion> {
        if offsets.is_empty() {
            return Err(Error::Precondition("IFS needs at least one offset".into()));
        }
        if *ratio <= Rational::from_integer(1.into()) {
            return Err(Error::Precondition("IFS ratio must exceed 1".into()));
        }
        check_cap(self.len().saturating_mul(offsets.len()))?;
        let inv = ratio.recip();
        let mut raw = Vec::with_capacity(self.len() * offsets.len());
        for off in offsets {
            for iv in &self.intervals {
                raw.push(Interval { lo: (&iv.lo + off) * &inv, hi: (&iv.hi + off) * &inv });
            }
        }
        Ok(Self::from_intervals(raw))
    }

    /// Smallest distance between consecutive intervals.
    pub fn min_gap(&self) -> Option<Rational> {
        self.intervals.windows(2).map(|w| &w[1].lo - &w[0].hi).min()
    }

    /// Whether `[-eps, eps]` lies in the union.
    pub fn contains_zero_neighborhood(&self, eps: &Rational) -> bool {
        let eps = eps.abs();
        let idx = self.intervals.partition_point(|iv| iv.hi < -eps.clone());
        self.intervals.get(idx).is_some_and(|iv| iv.lo <= -eps.clone() && eps <= iv.hi)
    }

    /// `inf {|u - v|}`, or `None` when either side is empty.
    pub fn distance(&self, other: &IntervalUnion) -> Option<Rational> {
        if self.is_empty() || other.is_empty() {
            return None;
        }
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut best: Option<Rational> = None;
        while i < a.len() && j < b.len() {
            let d = if a[i].hi < b[j].lo {
                &b[j].lo - &a[i].hi
            } else if b[j].hi < a[i].lo {
                &a[i].lo - &b[j].hi
            } else {
                return Some(Rational::zero());
            };
            if best.as_ref().is_none_or(|b| &d < b) {
                best = Some(d);
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        best
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " u ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn iu(v: &[(i64, i64, i64, i64)]) -> IntervalUnion {
        IntervalUnion::normalize(v.iter().map(|&(a, b, c, d)| (rat(a, b), rat(c, d)))).unwrap()
    }

    fn cantor1() -> IntervalUnion {
        iu(&[(0, 1, 1, 3), (2, 3, 1, 1)])
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(iu(&[(0, 1, 1, 3), (1, 3, 1, 1)]), iu(&[(0, 1, 1, 1)]));
        assert!(iu(&[]).is_empty());
        assert_eq!(iu(&[(0, 1, 1, 2), (1, 4, 3, 4)]), iu(&[(0, 1, 3, 4)]));
        let bad = IntervalUnion::normalize([(rat(1, 2), rat(0, 1))]);
        assert!(matches!(bad, Err(Error::MalformedInterval { .. })));
    }

    #[test]
    fn intersect_examples() {
        let c = cantor1();
        assert_eq!(c.intersect(&iu(&[(0, 1, 1, 1)])), c);
        assert_eq!(c.intersect(&c.translate(&rat(-4, 9))), iu(&[(2, 9, 1, 3)]));
        assert!(iu(&[(0, 1, 1, 4)]).intersect(&iu(&[(1, 2, 1, 1)])).is_empty());
    }

    #[test]
    fn translate_and_negate_examples() {
        let c = cantor1();
        assert_eq!(c.translate(&rat(0, 1)), c);
        assert_eq!(c.negate().negate(), c);
        assert_eq!(iu(&[(0, 1, 1, 9)]).translate(&rat(2, 9)), iu(&[(2, 9, 3, 9)]));
    }

    #[test]
    fn minkowski_examples() {
        let unit = iu(&[(0, 1, 1, 1)]);
        assert_eq!(unit.minkowski_diff(&unit).unwrap(), iu(&[(-1, 1, 1, 1)]));
        assert_eq!(cantor1().minkowski_diff(&cantor1()).unwrap(), iu(&[(-1, 1, 1, 1)]));
        assert!(IntervalUnion::empty().minkowski_diff(&unit).unwrap().is_empty());
    }

    #[test]
    fn pad_examples() {
        let u = iu(&[(0, 1, 1, 9), (1, 3, 4, 9)]);
        assert_eq!(u.pad(&rat(0, 1)).unwrap(), u);
        assert_eq!(IntervalUnion::point(rat(0, 1)).pad(&rat(1, 9)).unwrap(), iu(&[(0, 1, 1, 9)]));
        assert_eq!(u.pad(&rat(1, 9)).unwrap(), iu(&[(0, 1, 2, 9), (1, 3, 5, 9)]));
        assert!(u.pad(&rat(-1, 9)).is_err());
    }

    #[test]
    fn ifs_examples() {
        let sym = iu(&[(-1, 1, 1, 1)]);
        let offs = [rat(-2, 1), rat(0, 1), rat(2, 1)];
        assert_eq!(sym.ifs_step(&rat(3, 1), &offs).unwrap(), sym);
        assert!(IntervalUnion::empty().ifs_step(&rat(3, 1), &offs).unwrap().is_empty());
        let step = iu(&[(0, 1, 1, 1)]).ifs_step(&rat(3, 1), &[rat(0, 1), rat(2, 1)]).unwrap();
        assert_eq!(step, cantor1());
        assert!(sym.ifs_step(&rat(3, 1), &[]).is_err());
    }

    #[test]
    fn query_examples() {
        assert_eq!(cantor1().min_gap(), Some(rat(1, 3)));
        assert_eq!(iu(&[(0, 1, 1, 1)]).min_gap(), None);
        assert!(!IntervalUnion::point(rat(1, 2)).has_interior());
        assert!(iu(&[(-1, 1, 1, 1)]).contains_zero_neighborhood(&rat(1, 2)));
        assert!(!iu(&[(0, 1, 1, 1)]).contains_zero_neighborhood(&rat(1, 100)));
        assert_eq!(cantor1().distance(&iu(&[(1, 2, 1, 2)])), Some(rat(1, 6)));
        assert!(cantor1().contains(&iu(&[(0, 1, 1, 9), (7, 9, 8, 9)])));
        assert!(!cantor1().contains(&iu(&[(0, 1, 1, 2)])));
    }
}
