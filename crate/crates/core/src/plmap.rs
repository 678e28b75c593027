//! Piecewise-linear order automorphisms of (ℚ, <) with rational data.
//!
//! A map is a strictly increasing list of breakpoints `(x_i, y_i)` plus the
//! slopes of the two unbounded end pieces. Between breakpoints the map
//! interpolates linearly. Every constructor canonicalizes: breakpoints that
//! are collinear with their neighbours are dropped, and a map with no
//! remaining breakpoint keeps one nominal breakpoint at input 0. Two maps are
//! therefore equal as functions iff they are equal as values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{ClosedInterval, Interval};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawPlMap", into = "RawPlMap")]
pub struct PlMap {
    breakpoints: Vec<(Rational, Rational)>,
    left_slope: Rational,
    right_slope: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawPlMap {
    breakpoints: Vec<(Rational, Rational)>,
    left_slope: Rational,
    right_slope: Rational,
}

impl TryFrom<RawPlMap> for PlMap {
    type Error = Error;
    fn try_from(raw: RawPlMap) -> Result<Self> {
        PlMap::new(raw.breakpoints, raw.left_slope, raw.right_slope)
    }
}

impl From<PlMap> for RawPlMap {
    fn from(f: PlMap) -> Self {
        RawPlMap {
            breakpoints: f.breakpoints,
            left_slope: f.left_slope,
            right_slope: f.right_slope,
        }
    }
}

/// The linear piece of a map around a point, on one side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub slope: Rational,
    /// Far end of the piece (next breakpoint input on that side), if any.
    pub end: Option<Rational>,
}

impl PlMap {
    /// Validates and canonicalizes. An empty breakpoint list with equal
    /// slopes `s` denotes `x ↦ s·x`.
    pub fn new(
        breakpoints: Vec<(Rational, Rational)>,
        left_slope: Rational,
        right_slope: Rational,
    ) -> Result<Self> {
        if !left_slope.is_positive() || !right_slope.is_positive() {
            return Err(Error::InvalidMap(format!(
                "end slopes must be positive, got {left_slope} and {right_slope}"
            )));
        }
        for w in breakpoints.windows(2) {
            if w[0].0 >= w[1].0 || w[0].1 >= w[1].1 {
                return Err(Error::InvalidMap(format!(
                    "breakpoints ({}, {}) and ({}, {}) are not strictly increasing",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        let breakpoints = if breakpoints.is_empty() {
            if left_slope != right_slope {
                return Err(Error::InvalidMap(
                    "a map without breakpoints needs equal end slopes".into(),
                ));
            }
            vec![(Rational::zero(), Rational::zero())]
        } else {
            breakpoints
        };
        Ok(PlMap::canonical(breakpoints, left_slope, right_slope))
    }

    /// Caller guarantees validity.
    fn canonical(
        breakpoints: Vec<(Rational, Rational)>,
        left_slope: Rational,
        right_slope: Rational,
    ) -> Self {
        let n = breakpoints.len();
        let slopes: Vec<Rational> = breakpoints
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect();
        let mut kept = Vec::with_capacity(n);
        for (i, bp) in breakpoints.iter().enumerate() {
            let incoming = if i == 0 { &left_slope } else { &slopes[i - 1] };
            let outgoing = if i + 1 == n { &right_slope } else { &slopes[i] };
            if incoming != outgoing {
                kept.push(bp.clone());
            }
        }
        if kept.is_empty() {
            // affine: x ↦ y0 + s (x - x0), nominal breakpoint at 0
            let (x0, y0) = &breakpoints[0];
            let at_zero = y0 - &(&left_slope * x0);
            kept.push((Rational::zero(), at_zero));
        }
        PlMap {
            breakpoints: kept,
            left_slope,
            right_slope,
        }
    }

    pub fn identity() -> Self {
        PlMap::affine(Rational::one(), Rational::zero())
    }

    /// `x ↦ x + c`.
    pub fn translation(c: Rational) -> Self {
        PlMap::affine(Rational::one(), c)
    }

    /// `x ↦ slope·x + offset`; panics unless `slope > 0`.
    pub fn affine(slope: Rational, offset: Rational) -> Self {
        assert!(slope.is_positive(), "affine slope must be positive");
        PlMap {
            breakpoints: vec![(Rational::zero(), offset)],
            left_slope: slope.clone(),
            right_slope: slope,
        }
    }

    /// Map through the given points with slope 1 at both ends.
    pub fn through_points(points: Vec<(Rational, Rational)>) -> Result<Self> {
        PlMap::new(points, Rational::one(), Rational::one())
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.breakpoints
    }

    pub fn left_slope(&self) -> &Rational {
        &self.left_slope
    }

    pub fn right_slope(&self) -> &Rational {
        &self.right_slope
    }

    pub fn is_identity(&self) -> bool {
        *self == PlMap::identity()
    }

    pub fn apply(&self, q: &Rational) -> Rational {
        eval(
            &self.breakpoints,
            &self.left_slope,
            &self.right_slope,
            q,
            false,
        )
    }

    /// `f⁻¹(q)` without building the inverse.
    pub fn apply_inverse(&self, q: &Rational) -> Rational {
        eval(
            &self.breakpoints,
            &self.left_slope,
            &self.right_slope,
            q,
            true,
        )
    }

    /// `self ∘ g`, i.e. `q ↦ self(g(q))`.
    pub fn compose(&self, g: &PlMap) -> PlMap {
        let mut inputs: Vec<Rational> = g.breakpoints.iter().map(|(x, _)| x.clone()).collect();
        inputs.extend(self.breakpoints.iter().map(|(x, _)| g.apply_inverse(x)));
        inputs.sort();
        inputs.dedup();
        let points = inputs
            .into_iter()
            .map(|x| {
                let y = self.apply(&g.apply(&x));
                (x, y)
            })
            .collect();
        PlMap::canonical(
            points,
            &self.left_slope * &g.left_slope,
            &self.right_slope * &g.right_slope,
        )
    }

    pub fn invert(&self) -> PlMap {
        let points = self
            .breakpoints
            .iter()
            .map(|(x, y)| (y.clone(), x.clone()))
            .collect();
        PlMap::canonical(points, self.left_slope.recip(), self.right_slope.recip())
    }

    /// `self⁻¹ ∘ f ∘ self`.
    pub fn conjugate_of(&self, f: &PlMap) -> PlMap {
        self.invert().compose(&f.compose(self))
    }

    /// The linear piece on `(x, x + ε)`.
    pub fn piece_right_of(&self, x: &Rational) -> Piece {
        let bps = &self.breakpoints;
        let idx = bps.partition_point(|(bx, _)| bx <= x);
        if idx == bps.len() {
            Piece {
                slope: self.right_slope.clone(),
                end: None,
            }
        } else if idx == 0 {
            Piece {
                slope: self.left_slope.clone(),
                end: Some(bps[0].0.clone()),
            }
        } else {
            Piece {
                slope: segment_slope(&bps[idx - 1], &bps[idx]),
                end: Some(bps[idx].0.clone()),
            }
        }
    }

    /// The linear piece on `(x - ε, x)`.
    pub fn piece_left_of(&self, x: &Rational) -> Piece {
        let bps = &self.breakpoints;
        let idx = bps.partition_point(|(bx, _)| bx < x);
        if idx == 0 {
            Piece {
                slope: self.left_slope.clone(),
                end: None,
            }
        } else if idx == bps.len() {
            Piece {
                slope: self.right_slope.clone(),
                end: Some(bps[idx - 1].0.clone()),
            }
        } else {
            Piece {
                slope: segment_slope(&bps[idx - 1], &bps[idx]),
                end: Some(bps[idx - 1].0.clone()),
            }
        }
    }
}

fn segment_slope(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&b.1 - &a.1) / (&b.0 - &a.0)
}

/// Evaluate the map (or its inverse, by swapping coordinates).
fn eval(
    bps: &[(Rational, Rational)],
    left: &Rational,
    right: &Rational,
    q: &Rational,
    inverse: bool,
) -> Rational {
    type Coord = fn(&(Rational, Rational)) -> &Rational;
    let (inp, out): (Coord, Coord) = if inverse {
        (|p| &p.1, |p| &p.0)
    } else {
        (|p| &p.0, |p| &p.1)
    };
    let idx = bps.partition_point(|p| inp(p) <= q);
    if idx == 0 {
        let first = &bps[0];
        let slope = if inverse { left.recip() } else { left.clone() };
        return out(first) + &(slope * (q - inp(first)));
    }
    let prev = &bps[idx - 1];
    if inp(prev) == q {
        return out(prev).clone();
    }
    if idx == bps.len() {
        let slope = if inverse {
            right.recip()
        } else {
            right.clone()
        };
        return out(prev) + &(slope * (q - inp(prev)));
    }
    let next = &bps[idx];
    let t = (q - inp(prev)) / (inp(next) - inp(prev));
    out(prev) + &(t * (out(next) - out(prev)))
}

impl fmt::Debug for PlMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlMap[{}|", self.left_slope)?;
        for (i, (x, y)) in self.breakpoints.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}->{y}")?;
        }
        write!(f, "|{}]", self.right_slope)
    }
}

/// Builds an increasing map that is the identity outside `cover`, maps
/// `cover` onto itself, and sends each blocked interval into the middle third
/// of its paired gap. A degenerate blocked interval `[c, c]` goes to the
/// gap's midpoint. When every blocked interval already sits inside its gap
/// the identity is returned.
pub fn squeeze_map(cover: &Interval, targets: &[(ClosedInterval, Interval)]) -> Result<PlMap> {
    let (lo, hi) = cover
        .bounds()
        .ok_or_else(|| Error::InconsistentTargets(format!("cover {cover} is unbounded")))?;
    if targets.iter().all(|(b, g)| b.is_subset_of_open(g)) {
        return Ok(PlMap::identity());
    }
    let mut points = vec![(lo.clone(), lo.clone())];
    for (blocked, gap) in targets {
        if !cover.contains_closed(blocked) || !gap.is_subset_of(cover) {
            return Err(Error::InconsistentTargets(format!(
                "{blocked:?} or {gap} is not inside cover {cover}"
            )));
        }
        let (g0, g1) = gap.bounds().expect("gap inside a bounded cover is bounded");
        if blocked.lo == blocked.hi {
            points.push((blocked.lo.clone(), Rational::midpoint(g0, g1)));
        } else {
            points.push((blocked.lo.clone(), Rational::lerp(g0, g1, 1, 3)));
            points.push((blocked.hi.clone(), Rational::lerp(g0, g1, 2, 3)));
        }
    }
    points.push((hi.clone(), hi.clone()));
    PlMap::through_points(points).map_err(|e| Error::InconsistentTargets(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn two_x_on_unit() -> PlMap {
        // breakpoints (0,0),(1,2), slope 1 outside
        PlMap::through_points(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(2, 1))]).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(PlMap::identity().apply(&q(7, 3)), q(7, 3));
        assert_eq!(PlMap::translation(q(1, 1)).apply(&q(1, 2)), q(3, 2));
        // hand interpolation: 0 + (1/4 - 0)/(1 - 0) * (2 - 0) = 1/2
        assert_eq!(two_x_on_unit().apply(&q(1, 4)), q(1, 2));
        // left piece slope 1 through (0,0); right piece slope 1 through (1,2)
        assert_eq!(two_x_on_unit().apply(&q(-3, 1)), q(-3, 1));
        assert_eq!(two_x_on_unit().apply(&q(5, 1)), q(6, 1));
    }

    #[test]
    fn compose_examples() {
        let f = two_x_on_unit();
        assert_eq!(f.compose(&PlMap::identity()), f);
        assert_eq!(
            PlMap::translation(q(1, 1)).compose(&PlMap::translation(q(2, 1))),
            PlMap::translation(q(3, 1))
        );
        // f(x) = 2x, g through (0,0),(1,3): g(1/2) = 3/2, f(3/2) = 3
        let double = PlMap::affine(q(2, 1), q(0, 1));
        let g = PlMap::through_points(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(3, 1))]).unwrap();
        assert_eq!(double.compose(&g).apply(&q(1, 2)), q(3, 1));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(PlMap::identity().invert(), PlMap::identity());
        assert_eq!(
            PlMap::translation(q(1, 1)).invert(),
            PlMap::translation(q(-1, 1))
        );
        let inv = two_x_on_unit().invert();
        assert_eq!(inv.breakpoints(), &[(q(0, 1), q(0, 1)), (q(2, 1), q(1, 1))]);
        assert_eq!(two_x_on_unit().compose(&inv), PlMap::identity());
        assert_eq!(inv.compose(&two_x_on_unit()), PlMap::identity());
    }

    #[test]
    fn canonical_form_drops_collinear_points() {
        let f = PlMap::through_points(vec![
            (q(0, 1), q(0, 1)),
            (q(1, 1), q(1, 1)),
            (q(2, 1), q(2, 1)),
        ])
        .unwrap();
        assert!(f.is_identity());
        let g = PlMap::new(vec![(q(1, 1), q(3, 1))], q(2, 1), q(2, 1)).unwrap();
        assert_eq!(g, PlMap::affine(q(2, 1), q(1, 1)));
        let h = PlMap::new(vec![], q(3, 1), q(3, 1)).unwrap();
        assert_eq!(h.apply(&q(1, 1)), q(3, 1));
    }

    #[test]
    fn rejects_invalid_maps() {
        assert!(PlMap::new(vec![], q(1, 1), q(2, 1)).is_err());
        assert!(PlMap::new(vec![(q(0, 1), q(0, 1))], q(0, 1), q(1, 1)).is_err());
        assert!(PlMap::through_points(vec![(q(0, 1), q(1, 1)), (q(1, 1), q(1, 1))]).is_err());
        assert!(PlMap::through_points(vec![(q(1, 1), q(0, 1)), (q(0, 1), q(1, 1))]).is_err());
    }

    #[test]
    fn pieces() {
        let f = two_x_on_unit();
        assert_eq!(
            f.piece_right_of(&q(0, 1)),
            Piece {
                slope: q(2, 1),
                end: Some(q(1, 1))
            }
        );
        assert_eq!(
            f.piece_left_of(&q(0, 1)),
            Piece {
                slope: q(1, 1),
                end: None
            }
        );
        assert_eq!(
            f.piece_left_of(&q(1, 1)),
            Piece {
                slope: q(2, 1),
                end: Some(q(0, 1))
            }
        );
        assert_eq!(
            f.piece_right_of(&q(1, 1)),
            Piece {
                slope: q(1, 1),
                end: None
            }
        );
    }

    #[test]
    fn squeeze_examples() {
        let cover = Interval::open(q(0, 1), q(10, 1));
        assert!(squeeze_map(&cover, &[]).unwrap().is_identity());

        let blocked = ClosedInterval::new(q(4, 1), q(6, 1));
        let gap = Interval::open(q(1, 1), q(2, 1));
        let g = squeeze_map(&cover, &[(blocked.clone(), gap.clone())]).unwrap();
        // hand-built: (0,0) (4,4/3) (6,5/3) (10,10)
        assert_eq!(
            g.breakpoints(),
            &[
                (q(0, 1), q(0, 1)),
                (q(4, 1), q(4, 3)),
                (q(6, 1), q(5, 3)),
                (q(10, 1), q(10, 1))
            ]
        );
        assert!(g.apply(&q(4, 1)) >= q(1, 1));
        assert!(g.apply(&q(6, 1)) <= q(2, 1));
        assert_eq!(g.apply(&q(-5, 1)), q(-5, 1));
        assert_eq!(g.apply(&q(11, 1)), q(11, 1));

        let inside = ClosedInterval::new(q(5, 4), q(3, 2));
        assert!(squeeze_map(&cover, &[(inside, gap)]).unwrap().is_identity());
    }

    #[test]
    fn squeeze_rejects_crossed_targets() {
        let cover = Interval::open(q(0, 1), q(10, 1));
        let targets = [
            (
                ClosedInterval::new(q(2, 1), q(3, 1)),
                Interval::open(q(7, 1), q(8, 1)),
            ),
            (
                ClosedInterval::new(q(5, 1), q(6, 1)),
                Interval::open(q(1, 1), q(2, 1)),
            ),
        ];
        assert!(matches!(
            squeeze_map(&cover, &targets),
            Err(Error::InconsistentTargets(_))
        ));
        let outside = [(
            ClosedInterval::new(q(9, 1), q(11, 1)),
            Interval::open(q(1, 1), q(2, 1)),
        )];
        assert!(squeeze_map(&cover, &outside).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let text = r#"{"breakpoints":[["0","0"],["1","2"]],"leftSlope":"1","rightSlope":"1"}"#;
        let f: PlMap = serde_json::from_str(text).unwrap();
        assert_eq!(f, two_x_on_unit());
        assert_eq!(serde_json::to_string(&f).unwrap(), text);
    }
}
