//! Seeded generators for maps, sets, values and stabilizer elements.
//!
//! Everything takes an explicit RNG so a seed fixes every sample.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::hfa::HfaValue;
use crate::interval::Interval;
use crate::ndset::{GeomTail, NdSet};
use crate::plmap::PlMap;
use crate::rational::Rational;

/// Rational with numerator in `[-max_num, max_num]`, denominator in
/// `[1, max_den]`.
pub fn rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    Rational::new(
        rng.gen_range(-max_num..=max_num),
        rng.gen_range(1..=max_den),
    )
}

fn positive_slope<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(1..=6i64), rng.gen_range(1..=4i64))
}

/// `count` distinct sorted rationals.
fn sorted_distinct<R: Rng>(rng: &mut R, count: usize, max_num: i64, max_den: i64) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(count);
    while out.len() < count {
        let x = rational(rng, max_num, max_den);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out.sort();
    out
}

/// Random PL automorphism with up to `max_breaks` breakpoints.
pub fn plmap<R: Rng>(rng: &mut R, max_breaks: usize) -> PlMap {
    let k = rng.gen_range(0..=max_breaks);
    if k == 0 {
        return PlMap::affine(positive_slope(rng), rational(rng, 8, 4));
    }
    let xs = sorted_distinct(rng, k, 12, 4);
    let ys = sorted_distinct(rng, k, 12, 4);
    PlMap::new(
        xs.into_iter().zip(ys).collect(),
        positive_slope(rng),
        positive_slope(rng),
    )
    .expect("sorted distinct coordinates give a valid map")
}

pub fn geom_tail<R: Rng>(rng: &mut R) -> GeomTail {
    const RATIOS: [(i64, i64); 6] = [(1, 2), (1, 3), (2, 3), (1, 4), (3, 5), (1, 2)];
    let (rn, rd) = *RATIOS.choose(rng).expect("nonempty");
    let mut coeff = Rational::new(rng.gen_range(1..=4i64), rng.gen_range(1..=3i64));
    if rng.gen_bool(0.5) {
        coeff = -coeff;
    }
    GeomTail::new(
        rational(rng, 6, 3),
        coeff,
        Rational::new(rn, rd),
        rng.gen_range(0..3),
    )
    .expect("valid tail parameters")
}

/// Up to `max_points` points and `max_tails` tails.
pub fn ndset<R: Rng>(rng: &mut R, max_points: usize, max_tails: usize) -> NdSet {
    let np = rng.gen_range(0..=max_points);
    let nt = rng.gen_range(0..=max_tails);
    let points: Vec<Rational> = (0..np).map(|_| rational(rng, 10, 6)).collect();
    let tails = (0..nt).map(|_| geom_tail(rng)).collect();
    NdSet::from_parts(points, tails)
}

/// Open interval, unbounded on a side with small probability.
pub fn interval<R: Rng>(rng: &mut R) -> Interval {
    let a = rational(rng, 10, 6);
    let mut b = rational(rng, 10, 6);
    while b == a {
        b = rational(rng, 10, 6);
    }
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let lower = (!rng.gen_bool(0.05)).then_some(a);
    let upper = (!rng.gen_bool(0.05)).then_some(b);
    Interval::new(lower, upper).expect("a < b")
}

/// Random hereditarily finite value of rank at most `depth`.
pub fn hfa<R: Rng>(rng: &mut R, depth: usize) -> HfaValue {
    if depth == 0 || rng.gen_bool(0.35) {
        return HfaValue::atom(rational(rng, 8, 4));
    }
    let n = rng.gen_range(0..=3);
    let items: Vec<HfaValue> = (0..n).map(|_| hfa(rng, depth - 1)).collect();
    if rng.gen_bool(0.5) {
        HfaValue::set(items)
    } else {
        HfaValue::seq(items)
    }
}

/// Random element of `Fix(support)`: a composition of up to three bumps,
/// each the identity outside a closure-free gap of `support`.
pub fn fix_element<R: Rng>(rng: &mut R, support: &NdSet) -> PlMap {
    let bumps = rng.gen_range(0..=3);
    let mut f = PlMap::identity();
    for _ in 0..bumps {
        let gap = support.find_gap(&interval(rng));
        let (a, b) = gap.bounds().expect("gaps are bounded");
        let x = Rational::lerp(a, b, rng.gen_range(1..8), 8);
        let y = Rational::lerp(a, b, rng.gen_range(1..8), 8);
        let bump =
            PlMap::through_points(vec![(a.clone(), a.clone()), (x, y), (b.clone(), b.clone())])
                .expect("bump is increasing");
        f = bump.compose(&f);
    }
    f
}

/// An element of `Fix(support)` moving `q`, when `q` lies off the closure.
pub fn fix_element_moving(support: &NdSet, q: &Rational) -> Option<PlMap> {
    if support.closure_contains(q) {
        return None;
    }
    let lo = support
        .closure_max_leq(q)
        .unwrap_or_else(|| q - &Rational::one());
    let hi = support
        .closure_min_geq(q)
        .unwrap_or_else(|| q + &Rational::one());
    let target = Rational::midpoint(q, &hi);
    Some(
        PlMap::through_points(vec![
            (lo.clone(), lo),
            (q.clone(), target),
            (hi.clone(), hi),
        ])
        .expect("increasing"),
    )
}
