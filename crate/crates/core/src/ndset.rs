//! Finitely presented nowhere-dense subsets of ℚ.
//!
//! An [`NdSet`] is a finite set of points together with finitely many
//! geometric tails `limit + coeff·ratio^k` (`k ≥ head_drop`). Its closure
//! adds exactly the tail limits. The class is closed under union and under
//! images by piecewise-linear automorphisms, because near a tail's limit such
//! a map is a single linear piece.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{proportion, CoprimeBase};
use crate::interval::{ClosedInterval, Interval};
use crate::plmap::PlMap;
use crate::rational::Rational;

/// Largest period / search length before `subset_of_closure` gives up.
const SEARCH_CAP: u64 = 100_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTail", into = "RawTail")]
pub struct GeomTail {
    limit: Rational,
    coeff: Rational,
    ratio: Rational,
    head_drop: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawTail {
    limit: Rational,
    coeff: Rational,
    ratio: Rational,
    head_drop: u64,
}

impl TryFrom<RawTail> for GeomTail {
    type Error = Error;
    fn try_from(raw: RawTail) -> Result<Self> {
        GeomTail::new(raw.limit, raw.coeff, raw.ratio, raw.head_drop)
    }
}

impl From<GeomTail> for RawTail {
    fn from(t: GeomTail) -> Self {
        RawTail {
            limit: t.limit,
            coeff: t.coeff,
            ratio: t.ratio,
            head_drop: t.head_drop,
        }
    }
}

impl GeomTail {
    pub fn new(limit: Rational, coeff: Rational, ratio: Rational, head_drop: u64) -> Result<Self> {
        if coeff.is_zero() {
            return Err(Error::InvalidSet("tail coefficient must be nonzero".into()));
        }
        if !ratio.is_positive() || ratio >= Rational::one() {
            return Err(Error::InvalidSet(format!(
                "tail ratio {ratio} not in (0, 1)"
            )));
        }
        Ok(GeomTail {
            limit,
            coeff,
            ratio,
            head_drop,
        })
    }

    pub fn limit(&self) -> &Rational {
        &self.limit
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn ratio(&self) -> &Rational {
        &self.ratio
    }

    pub fn head_drop(&self) -> u64 {
        self.head_drop
    }

    /// Terms approach the limit from above.
    pub fn from_above(&self) -> bool {
        self.coeff.is_positive()
    }

    pub fn term(&self, k: u64) -> Rational {
        &self.limit + &(&self.coeff * &self.ratio.pow(k))
    }

    /// Terms `(k, term_k)` for `k ≥ head_drop`, in order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, Rational)> + '_ {
        let mut k = self.head_drop;
        let mut offset = &self.coeff * &self.ratio.pow(k);
        std::iter::from_fn(move || {
            let out = (k, &self.limit + &offset);
            k += 1;
            offset = &offset * &self.ratio;
            Some(out)
        })
    }

    /// The index `k ≥ head_drop` with `term_k = q`, if any.
    pub fn index_of(&self, q: &Rational) -> Option<u64> {
        let t = (q - &self.limit) / self.coeff.clone();
        if !t.is_positive() {
            return None;
        }
        // ratio = a/b in lowest terms, so ratio^k = a^k / b^k is reduced too
        let a = self.ratio.numer();
        let b = self.ratio.denom();
        let mut den = t.denom().clone();
        let mut k = 0u64;
        while !den.is_one() {
            let (quot, rem) = den.div_rem(b);
            if !rem.is_zero() {
                return None;
            }
            den = quot;
            k += 1;
        }
        if *t.numer() != num_traits::pow::pow(a.clone(), k as usize) {
            return None;
        }
        (k >= self.head_drop).then_some(k)
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.index_of(q).is_some()
    }

    /// Same set with `head_drop = 0`.
    fn normalized(self) -> GeomTail {
        if self.head_drop == 0 {
            return self;
        }
        GeomTail {
            coeff: &self.coeff * &self.ratio.pow(self.head_drop),
            head_drop: 0,
            limit: self.limit,
            ratio: self.ratio,
        }
    }

    /// First term of the presented sequence.
    fn coeff_term(&self) -> Rational {
        self.term(self.head_drop)
    }

    /// Mirror image under `x ↦ -x`.
    fn reflect(&self) -> GeomTail {
        GeomTail {
            limit: -&self.limit,
            coeff: -&self.coeff,
            ratio: self.ratio.clone(),
            head_drop: self.head_drop,
        }
    }

    /// `min { x ∈ closure : x ≥ q }`.
    fn closure_min_geq(&self, q: &Rational) -> Option<Rational> {
        if self.from_above() {
            if &self.limit >= q {
                return Some(self.limit.clone());
            }
            // decreasing terms: the last one still ≥ q
            let mut best = None;
            for (_, t) in self.terms() {
                if &t < q {
                    break;
                }
                best = Some(t);
            }
            best
        } else {
            if &self.limit < q {
                return None;
            }
            if &self.limit == q {
                return Some(self.limit.clone());
            }
            // increasing terms toward a limit above q: the first one ≥ q
            self.terms().map(|(_, t)| t).find(|t| t >= q)
        }
    }

    fn closure_max_leq(&self, q: &Rational) -> Option<Rational> {
        self.reflect().closure_min_geq(&-q).map(|x| -x)
    }

    /// Terms of the tail strictly inside `(lo, hi)` when only finitely many
    /// are; `None` if the tail accumulates inside the interval.
    fn finite_terms_in(&self, lo: &Rational, hi: &Rational) -> Option<Vec<Rational>> {
        let l = &self.limit;
        let mut out = Vec::new();
        if self.from_above() {
            if l >= hi {
                return Some(out);
            }
            if l >= lo {
                return None;
            }
            for (_, t) in self.terms() {
                if &t <= lo {
                    break;
                }
                if &t < hi {
                    out.push(t);
                }
            }
        } else {
            if l <= lo {
                return Some(out);
            }
            if l <= hi {
                return None;
            }
            for (_, t) in self.terms() {
                if &t >= hi {
                    break;
                }
                if &t > lo {
                    out.push(t);
                }
            }
        }
        Some(out)
    }

    /// First consecutive pair of terms both inside `(lo, hi)`.
    fn consecutive_pair_in(&self, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let inside = |t: &Rational| lo < t && t < hi;
        let mut prev: Option<Rational> = None;
        for (_, t) in self.terms() {
            if let Some(p) = prev.take() {
                if inside(&p) && inside(&t) {
                    return if p < t { (p, t) } else { (t, p) };
                }
            }
            prev = Some(t);
        }
        unreachable!("terms iterator is infinite")
    }

    /// Image under `f`: the head terms before the limit-side linear piece of
    /// `f` as points, and the rest as a tail.
    fn image(&self, f: &PlMap) -> (Vec<Rational>, GeomTail) {
        let piece = if self.from_above() {
            f.piece_right_of(&self.limit)
        } else {
            f.piece_left_of(&self.limit)
        };
        let in_piece = |t: &Rational| match &piece.end {
            None => true,
            Some(e) if self.from_above() => t <= e,
            Some(e) => t >= e,
        };
        let mut head = Vec::new();
        let mut first_inside = self.head_drop;
        for (k, t) in self.terms() {
            if in_piece(&t) {
                first_inside = k;
                break;
            }
            head.push(f.apply(&t));
        }
        let tail = GeomTail {
            limit: f.apply(&self.limit),
            coeff: &piece.slope * &self.coeff,
            ratio: self.ratio.clone(),
            head_drop: first_inside,
        };
        (head, tail)
    }

    /// A term moved by `f`, if any.
    fn moved_term(&self, f: &PlMap) -> Option<Rational> {
        let piece = if self.from_above() {
            f.piece_right_of(&self.limit)
        } else {
            f.piece_left_of(&self.limit)
        };
        let identity_near_limit = piece.slope.is_one() && f.apply(&self.limit) == self.limit;
        let mut inside_checked = 0;
        for (_, t) in self.terms() {
            let inside = match &piece.end {
                None => true,
                Some(e) if self.from_above() => &t <= e,
                Some(e) => &t >= e,
            };
            if inside {
                if identity_near_limit {
                    return None;
                }
                // a non-identity affine piece fixes at most one point
                inside_checked += 1;
            }
            if f.apply(&t) != t {
                return Some(t);
            }
            debug_assert!(inside_checked < 2);
        }
        unreachable!("terms iterator is infinite")
    }
}

impl fmt::Debug for GeomTail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Tail({} + {}·({})^k, k≥{})",
            self.limit, self.coeff, self.ratio, self.head_drop
        )
    }
}

/// Three-valued answer for closure containment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Containment {
    Yes,
    /// A point of the smaller set outside the closure of the larger one.
    No(Rational),
    Unknown(String),
}

impl Containment {
    pub fn is_yes(&self) -> bool {
        matches!(self, Containment::Yes)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "RawNdSet", into = "RawNdSet")]
pub struct NdSet {
    points: BTreeSet<Rational>,
    tails: Vec<GeomTail>,
}

#[derive(Serialize, Deserialize)]
struct RawNdSet {
    points: Vec<Rational>,
    tails: Vec<GeomTail>,
}

impl TryFrom<RawNdSet> for NdSet {
    type Error = Error;
    fn try_from(raw: RawNdSet) -> Result<Self> {
        Ok(NdSet::from_parts(raw.points, raw.tails))
    }
}

impl From<NdSet> for RawNdSet {
    fn from(e: NdSet) -> Self {
        RawNdSet {
            points: e.points.into_iter().collect(),
            tails: e.tails,
        }
    }
}

impl NdSet {
    pub fn empty() -> Self {
        NdSet::default()
    }

    pub fn singleton(p: Rational) -> Self {
        NdSet::from_points([p])
    }

    pub fn from_points(points: impl IntoIterator<Item = Rational>) -> Self {
        NdSet::from_parts(points, Vec::new())
    }

    pub fn from_tail(tail: GeomTail) -> Self {
        NdSet::from_parts([], vec![tail])
    }

    /// Canonicalizes. Each tail is renormalized to `head_drop = 0` and
    /// extended backwards over points lying on its preceding term; tails
    /// contained in another tail are dropped; points lying on a tail are
    /// dropped. Equal sets built from the same tails up to re-indexing get
    /// equal presentations.
    pub fn from_parts(points: impl IntoIterator<Item = Rational>, tails: Vec<GeomTail>) -> Self {
        let mut points: BTreeSet<Rational> = points.into_iter().collect();
        let mut tails: Vec<GeomTail> = tails
            .into_iter()
            .map(|t| {
                let mut t = t.normalized();
                loop {
                    let prev = &t.limit + &(&t.coeff / &t.ratio);
                    if !points.remove(&prev) {
                        break;
                    }
                    t.coeff = &t.coeff / &t.ratio;
                }
                t
            })
            .collect();
        tails.sort();
        tails.dedup();
        let kept: Vec<GeomTail> = tails
            .iter()
            .enumerate()
            .filter(|(i, t)| {
                !tails.iter().enumerate().any(|(j, other)| {
                    j != *i
                        && other.limit == t.limit
                        && other.ratio == t.ratio
                        && other.contains(&t.coeff_term())
                })
            })
            .map(|(_, t)| t.clone())
            .collect();
        points.retain(|p| !kept.iter().any(|t| t.contains(p)));
        NdSet {
            points,
            tails: kept,
        }
    }

    pub fn points(&self) -> &BTreeSet<Rational> {
        &self.points
    }

    pub fn tails(&self) -> &[GeomTail] {
        &self.tails
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.tails.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.tails.is_empty()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.points.contains(q) || self.tails.iter().any(|t| t.contains(q))
    }

    pub fn closure_contains(&self, q: &Rational) -> bool {
        self.contains(q) || self.tails.iter().any(|t| &t.limit == q)
    }

    /// Pointwise image `f``E`.
    pub fn image(&self, f: &PlMap) -> NdSet {
        let mut points: Vec<Rational> = self.points.iter().map(|p| f.apply(p)).collect();
        let mut tails = Vec::with_capacity(self.tails.len());
        for t in &self.tails {
            let (head, tail) = t.image(f);
            points.extend(head);
            tails.push(tail);
        }
        NdSet::from_parts(points, tails)
    }

    pub fn union(&self, other: &NdSet) -> NdSet {
        let points = self.points.iter().chain(&other.points).cloned();
        let tails = self.tails.iter().chain(&other.tails).cloned().collect();
        NdSet::from_parts(points, tails)
    }

    /// `f` fixes every element of the set.
    pub fn fixed_pointwise_by(&self, f: &PlMap) -> bool {
        self.moved_by(f).is_none()
    }

    /// An element of the set that `f` moves, if any.
    pub fn moved_by(&self, f: &PlMap) -> Option<Rational> {
        self.points
            .iter()
            .find(|p| &f.apply(p) != *p)
            .cloned()
            .or_else(|| self.tails.iter().find_map(|t| t.moved_term(f)))
    }

    /// `min { x ∈ closure : x ≥ q }`.
    pub fn closure_min_geq(&self, q: &Rational) -> Option<Rational> {
        let from_points = self.points.range(q.clone()..).next().cloned();
        from_points
            .into_iter()
            .chain(self.tails.iter().filter_map(|t| t.closure_min_geq(q)))
            .min()
    }

    /// `max { x ∈ closure : x ≤ q }`.
    pub fn closure_max_leq(&self, q: &Rational) -> Option<Rational> {
        let from_points = self.points.range(..=q.clone()).next_back().cloned();
        from_points
            .into_iter()
            .chain(self.tails.iter().filter_map(|t| t.closure_max_leq(q)))
            .max()
    }

    /// Some closure point inside `[c.lo, c.hi]`, the least one.
    pub fn closure_meets(&self, c: &ClosedInterval) -> Option<Rational> {
        self.closure_min_geq(&c.lo).filter(|x| x <= &c.hi)
    }

    /// A bounded open interval `J = (a, b)` with `[a, b] ⊆ I` and
    /// `[a, b]` disjoint from the closure.
    ///
    /// Deterministic: accumulating tails are cut away by restricting to the
    /// span of their first pair of consecutive terms inside the current
    /// window, then the leftmost closure-free segment of the window is taken
    /// and its middle third returned.
    pub fn find_gap(&self, interval: &Interval) -> Interval {
        let (mut lo, mut hi) = interval.bounded_part();
        'narrow: loop {
            let mut obstacles: Vec<Rational> = Vec::new();
            for t in &self.tails {
                match t.finite_terms_in(&lo, &hi) {
                    Some(terms) => obstacles.extend(terms),
                    None => {
                        (lo, hi) = t.consecutive_pair_in(&lo, &hi);
                        continue 'narrow;
                    }
                }
                if lo < t.limit && t.limit < hi {
                    obstacles.push(t.limit.clone());
                }
            }
            obstacles.extend(
                self.points
                    .range(lo.clone()..hi.clone())
                    .filter(|p| **p != lo)
                    .cloned(),
            );
            let first = obstacles.into_iter().min().unwrap_or_else(|| hi.clone());
            let a = Rational::lerp(&lo, &first, 1, 3);
            let b = Rational::lerp(&lo, &first, 2, 3);
            return Interval::open(a, b);
        }
    }

    /// Whether every element of `self` lies in the closure of `other`.
    pub fn subset_of_closure(&self, other: &NdSet) -> Containment {
        for p in &self.points {
            if !other.closure_contains(p) {
                return Containment::No(p.clone());
            }
        }
        for t in &self.tails {
            match tail_in_closure(t, other) {
                Containment::Yes => {}
                verdict => return verdict,
            }
        }
        Containment::Yes
    }

    /// Elements of the presentation for extensional spot checks: points,
    /// tail limits and the first `terms_per_tail` terms of each tail.
    pub fn sample_closure_points(&self, terms_per_tail: usize) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.points.iter().cloned().collect();
        for t in &self.tails {
            out.push(t.limit.clone());
            out.extend(t.terms().take(terms_per_tail).map(|(_, x)| x));
        }
        out
    }
}

/// Arithmetic data of one candidate covering tail `s` for the terms of `t`.
struct Cover<'a> {
    tail: &'a GeomTail,
    period: u64,
    threshold: u64,
}

fn tail_in_closure(t: &GeomTail, other: &NdSet) -> Containment {
    // Tails of `other` with the same limit on the same side are the only ones
    // that can contain infinitely many terms of `t`. For such `s`,
    // coeff_t·r^k / coeff_s = s^j has integer solutions j(k) = α + kλ, which
    // are periodic in k once j(k) clears s.head_drop.
    let mut covers = Vec::new();
    for s in &other.tails {
        if s.limit != t.limit || s.from_above() != t.from_above() {
            continue;
        }
        let cd = &t.coeff / &s.coeff;
        let base = CoprimeBase::for_rationals(&[&t.ratio, &s.ratio, &cd]);
        let vr = base.vector(&t.ratio);
        let vs = base.vector(&s.ratio);
        let vcd = base.vector(&cd);
        let (Some((lp, lq)), Some((ap, aq))) = (proportion(&vr, &vs), proportion(&vcd, &vs)) else {
            continue;
        };
        // j(k) = ap/aq + k·lp/lq ≥ head_drop(s)  ⇔  k ≥ (h·aq - ap)·lq / (aq·lp)
        let h = BigInt::from(s.head_drop);
        let need = (&h * &aq - &ap) * &lq;
        let per = &aq * &lp;
        let bound = need.div_ceil(&per);
        let threshold = if bound.is_negative() {
            0
        } else {
            match bound.to_u64() {
                Some(b) if b <= SEARCH_CAP => b,
                _ => return Containment::Unknown("covering threshold too large".into()),
            }
        };
        let period = match lq.to_u64() {
            Some(p) if p <= SEARCH_CAP => p,
            _ => return Containment::Unknown("covering period too large".into()),
        };
        covers.push(Cover {
            tail: s,
            period,
            threshold,
        });
    }
    let mut period = 1u64;
    for c in &covers {
        period = period.lcm(&c.period);
        if period > SEARCH_CAP {
            return Containment::Unknown("combined covering period too large".into());
        }
    }
    let start = covers
        .iter()
        .map(|c| c.threshold)
        .max()
        .unwrap_or(0)
        .max(t.head_drop);
    for residue in 0..period {
        let k = start + residue;
        let term = t.term(k);
        if covers.iter().any(|c| c.tail.contains(&term)) {
            continue;
        }
        // Residue class never lies on a covering tail; everything else in the
        // closure meets this class finitely often, so a witness turns up.
        let mut idx = k;
        for _ in 0..SEARCH_CAP {
            let x = t.term(idx);
            if !other.closure_contains(&x) {
                return Containment::No(x);
            }
            idx += period;
        }
        return Containment::Unknown(format!("no witness found in residue class of {k}"));
    }
    for (k, x) in t.terms() {
        if k >= start {
            break;
        }
        if !other.closure_contains(&x) {
            return Containment::No(x);
        }
    }
    Containment::Yes
}

impl fmt::Debug for NdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.points.iter())
            .entries(self.tails.iter())
            .finish()
    }
}
