//! Brute-force oracles and fixtures shared by the integration tests. Nothing
//! here calls the library's own closure or interpolation routines.

#![allow(dead_code)]

use std::path::PathBuf;

use num_integer::Integer;
use shiftdc::enumerate::rational_at;
use shiftdc::{q, EStream, GeomTail, NdSet, PlMap, Rational};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn dense_singletons(len: usize) -> EStream {
    EStream::new((0..len).map(|i| NdSet::singleton(rational_at(i))).collect())
}

pub fn geometric_start(singletons: usize) -> EStream {
    let mut increments = vec![NdSet::from_tail(
        GeomTail::new(q(0, 1), q(1, 1), q(1, 2), 0).unwrap(),
    )];
    increments.extend((1..=singletons).map(|i| NdSet::singleton(rational_at(i))));
    EStream::new(increments)
}

/// Terms of `t` lying in `[a, b]`, assuming the limit is outside.
fn tail_terms_in(t: &GeomTail, a: &Rational, b: &Rational) -> Vec<Rational> {
    let limit = t.limit();
    let dist = if limit < a { a - limit } else { limit - b };
    let mut out = Vec::new();
    let mut offset = t.coeff() * &t.ratio().pow(t.head_drop());
    loop {
        if offset.abs() < dist {
            return out;
        }
        let x = limit + &offset;
        if &x >= a && &x <= b {
            out.push(x);
        }
        offset = &offset * t.ratio();
    }
}

/// Least closure point of `e` in `[a, b]`, computed by walking tail terms.
pub fn closure_point_in(e: &NdSet, a: &Rational, b: &Rational) -> Option<Rational> {
    let mut hits: Vec<Rational> = e
        .points()
        .iter()
        .filter(|p| *p >= a && *p <= b)
        .cloned()
        .collect();
    for t in e.tails() {
        if t.limit() >= a && t.limit() <= b {
            hits.push(t.limit().clone());
        } else {
            hits.extend(tail_terms_in(t, a, b));
        }
    }
    hits.into_iter().min()
}

/// Closure membership by the tail formula `limit + coeff·ratio^k`.
pub fn in_closure(e: &NdSet, x: &Rational) -> bool {
    closure_point_in(e, x, x).is_some()
}

/// Every rational in the open interval `(a, b)` with denominator at most
/// `max_den`.
pub fn rationals_between(a: &Rational, b: &Rational, max_den: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    for d in 1..=max_den {
        let dd = Rational::int(d);
        let lo = (a * &dd).as_big().floor().to_integer();
        let hi = (b * &dd).as_big().ceil().to_integer();
        let mut n = lo;
        while n <= hi {
            if n.gcd(&d.into()) == 1.into() {
                let x = Rational::new(n.clone(), d);
                if &x > a && &x < b {
                    out.push(x);
                }
            }
            n += 1;
        }
    }
    out
}

/// Independent evaluation of a PL map from its raw data.
pub fn eval(f: &PlMap, x: &Rational) -> Rational {
    let bps = f.breakpoints();
    let (x0, y0) = &bps[0];
    let (xn, yn) = &bps[bps.len() - 1];
    if x <= x0 {
        return y0 - &(f.left_slope() * &(x0 - x));
    }
    if x >= xn {
        return yn + &(f.right_slope() * &(x - xn));
    }
    for w in bps.windows(2) {
        let ((xa, ya), (xb, yb)) = (&w[0], &w[1]);
        if x >= xa && x <= xb {
            return ya + &((yb - ya) * &(x - xa) / (xb - xa));
        }
    }
    unreachable!("x lies within the breakpoint range")
}

/// A replacement for `pis[n]` that moves a point `p` of `shifted` (the set
/// `σ_n``E_n`) while every later map is the identity near `p`. Then the later
/// maps commute with the perturbation, and only the step-`n` membership can
/// change.
pub fn isolated_mutation(pis: &[PlMap], shifted: &NdSet, n: usize) -> Option<PlMap> {
    let mut candidates: Vec<Rational> = shifted.points().iter().cloned().collect();
    for t in shifted.tails() {
        candidates.extend(t.terms().take(3).map(|(_, x)| x));
    }
    'points: for p in candidates {
        let mut radius = Rational::one();
        for later in &pis[n + 1..] {
            if later.apply(&p) != p {
                continue 'points;
            }
            for piece in [later.piece_left_of(&p), later.piece_right_of(&p)] {
                if !piece.slope.is_one() {
                    continue 'points;
                }
                if let Some(end) = piece.end {
                    let d = (&end - &p).abs();
                    if d.is_zero() {
                        continue 'points;
                    }
                    radius = radius.min(d);
                }
            }
        }
        let half = &radius / &Rational::int(2);
        let bump = PlMap::through_points(vec![
            (&p - &half, &p - &half),
            (p.clone(), &p + &(&half / &Rational::int(2))),
            (&p + &half, &p + &half),
        ])
        .ok()?;
        return Some(bump.compose(&pis[n]));
    }
    None
}
