//! Open intervals of ℚ (possibly unbounded) and closed bounded intervals.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Open interval `(lower, upper)`; `None` stands for −∞ / +∞.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval", into = "RawInterval")]
pub struct Interval {
    lower: Option<Rational>,
    upper: Option<Rational>,
}

#[derive(Serialize, Deserialize)]
struct RawInterval {
    lower: Option<Rational>,
    upper: Option<Rational>,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;
    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.lower, raw.upper)
    }
}

impl From<Interval> for RawInterval {
    fn from(i: Interval) -> Self {
        RawInterval {
            lower: i.lower,
            upper: i.upper,
        }
    }
}

impl Interval {
    pub fn new(lower: Option<Rational>, upper: Option<Rational>) -> Result<Self> {
        if let (Some(a), Some(b)) = (&lower, &upper) {
            if a >= b {
                return Err(Error::InvalidInterval(format!("({a}, {b}) is empty")));
            }
        }
        Ok(Interval { lower, upper })
    }

    /// Bounded open interval `(a, b)`; panics if `a >= b`.
    pub fn open(a: Rational, b: Rational) -> Self {
        Interval::new(Some(a), Some(b)).expect("open interval must be nonempty")
    }

    pub fn whole_line() -> Self {
        Interval {
            lower: None,
            upper: None,
        }
    }

    pub fn lower(&self) -> Option<&Rational> {
        self.lower.as_ref()
    }

    pub fn upper(&self) -> Option<&Rational> {
        self.upper.as_ref()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|a| a < q) && self.upper.as_ref().is_none_or(|b| q < b)
    }

    /// `[c.lo, c.hi] ⊆ self`.
    pub fn contains_closed(&self, c: &ClosedInterval) -> bool {
        self.contains(&c.lo) && self.contains(&c.hi)
    }

    /// `self ⊆ other`, both open.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lower_ok = match (&other.lower, &self.lower) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(o), Some(s)) => o <= s,
        };
        let upper_ok = match (&other.upper, &self.upper) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(o), Some(s)) => s <= o,
        };
        lower_ok && upper_ok
    }

    /// Both endpoints finite, as a pair.
    pub fn bounds(&self) -> Option<(&Rational, &Rational)> {
        Some((self.lower.as_ref()?, self.upper.as_ref()?))
    }

    /// Closed hull `[a, b]` of a bounded interval.
    pub fn closure(&self) -> Option<ClosedInterval> {
        let (a, b) = self.bounds()?;
        Some(ClosedInterval::new(a.clone(), b.clone()))
    }

    /// A bounded subinterval used when a search needs finite endpoints:
    /// `(u - 1, u)`, `(l, l + 1)`, or `(0, 1)` for the whole line.
    pub fn bounded_part(&self) -> (Rational, Rational) {
        match (&self.lower, &self.upper) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            (Some(a), None) => (a.clone(), a + &Rational::one()),
            (None, Some(b)) => (b - &Rational::one(), b.clone()),
            (None, None) => (Rational::zero(), Rational::one()),
        }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lower {
            Some(a) => write!(f, "({a}, ")?,
            None => write!(f, "(-inf, ")?,
        }
        match &self.upper {
            Some(b) => write!(f, "{b})"),
            None => write!(f, "+inf)"),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Closed bounded interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClosedInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl ClosedInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "closed interval [{lo}, {hi}] is empty");
        ClosedInterval { lo, hi }
    }

    pub fn point(p: Rational) -> Self {
        ClosedInterval {
            lo: p.clone(),
            hi: p,
        }
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn overlaps(&self, other: &ClosedInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_subset_of_open(&self, i: &Interval) -> bool {
        i.contains_closed(self)
    }
}

impl fmt::Debug for ClosedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Sort closed intervals and merge the ones that overlap.
pub fn merge_closed(mut items: Vec<ClosedInterval>) -> Vec<ClosedInterval> {
    items.sort();
    let mut out: Vec<ClosedInterval> = Vec::with_capacity(items.len());
    for c in items {
        match out.last_mut() {
            Some(last) if c.lo <= last.hi => {
                if c.hi > last.hi {
                    last.hi = c.hi;
                }
            }
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn rejects_empty() {
        assert!(Interval::new(Some(q(1, 1)), Some(q(1, 1))).is_err());
        assert!(Interval::new(Some(q(2, 1)), Some(q(1, 1))).is_err());
        assert!(Interval::new(None, Some(q(1, 1))).is_ok());
    }

    #[test]
    fn containment() {
        let i = Interval::open(q(0, 1), q(1, 1));
        assert!(i.contains(&q(1, 2)));
        assert!(!i.contains(&q(0, 1)));
        assert!(Interval::whole_line().contains(&q(-100, 1)));
        assert!(i.is_subset_of(&Interval::whole_line()));
        assert!(!Interval::whole_line().is_subset_of(&i));
        assert!(Interval::open(q(1, 3), q(2, 3)).is_subset_of(&i));
    }

    #[test]
    fn merge() {
        let m = merge_closed(vec![
            ClosedInterval::new(q(3, 1), q(4, 1)),
            ClosedInterval::new(q(0, 1), q(1, 1)),
            ClosedInterval::new(q(1, 2), q(2, 1)),
        ]);
        assert_eq!(
            m,
            vec![
                ClosedInterval::new(q(0, 1), q(2, 1)),
                ClosedInterval::new(q(3, 1), q(4, 1))
            ]
        );
    }

    #[test]
    fn json_shape() {
        let i = Interval::new(None, Some(q(1, 2))).unwrap();
        assert_eq!(
            serde_json::to_string(&i).unwrap(),
            r#"{"lower":null,"upper":"1/2"}"#
        );
        let bad: std::result::Result<Interval, _> =
            serde_json::from_str(r#"{"lower":"1","upper":"1"}"#);
        assert!(bad.is_err());
    }
}
