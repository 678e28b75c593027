//! Fixed enumerations of ℚ and of the open intervals with rational endpoints.
//!
//! Positive rationals are listed by walking the diagonals `p + q = s` of the
//! `(p, q)` grid, `s = 2, 3, …`, ascending in `p` on odd `s` and descending
//! on even `s`, skipping non-reduced fractions. ℚ is then
//! `0, r₁, −r₁, r₂, −r₂, …`. Intervals come from the diagonal pairing of
//! indices.

use num_integer::Integer;

use crate::interval::Interval;
use crate::rational::Rational;

/// Positive rationals in zig-zag order, starting `1, 1/2, 2, 3, 1/3, …`.
pub fn positive_rationals() -> impl Iterator<Item = Rational> {
    (2u64..)
        .flat_map(|s| {
            let ascending = s % 2 == 1;
            (1..s).map(move |i| {
                let p = if ascending { i } else { s - i };
                (p, s - p)
            })
        })
        .filter(|(p, q)| p.gcd(q) == 1)
        .map(|(p, q)| Rational::new(p, q))
}

/// All of ℚ: `0, r₁, −r₁, r₂, −r₂, …`.
pub fn rationals() -> impl Iterator<Item = Rational> {
    std::iter::once(Rational::zero()).chain(positive_rationals().flat_map(|r| [r.clone(), -r]))
}

/// The `i`-th rational of [`rationals`].
pub fn rational_at(i: usize) -> Rational {
    rationals().nth(i).expect("enumeration is infinite")
}

/// Inverse of the Cantor pairing `(i, j) ↦ (i + j)(i + j + 1)/2 + j`.
pub fn unpair(n: u64) -> (u64, u64) {
    let mut w = (((8.0 * n as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while w * (w + 1) / 2 > n {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= n {
        w += 1;
    }
    let j = n - w * (w + 1) / 2;
    (w - j, j)
}

/// The `n`-th open interval: between the rationals at the unpaired indices,
/// or `(q, q + 1)` when both indices name the same rational.
pub fn canonical_interval(n: u64) -> Interval {
    let (i, j) = unpair(n);
    let a = rational_at(i as usize);
    let b = rational_at(j as usize);
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Interval::open(a, b),
        std::cmp::Ordering::Greater => Interval::open(b, a),
        std::cmp::Ordering::Equal => {
            let up = &a + &Rational::one();
            Interval::open(a, up)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use std::collections::HashSet;

    #[test]
    fn zigzag_prefix() {
        let first: Vec<Rational> = positive_rationals().take(9).collect();
        assert_eq!(
            first,
            vec![
                q(1, 1),
                q(1, 2),
                q(2, 1),
                q(3, 1),
                q(1, 3),
                q(1, 4),
                q(2, 3),
                q(3, 2),
                q(4, 1)
            ]
        );
        let all: Vec<Rational> = rationals().take(5).collect();
        assert_eq!(all, vec![q(0, 1), q(1, 1), q(-1, 1), q(1, 2), q(-1, 2)]);
    }

    #[test]
    fn enumeration_is_injective_on_prefix() {
        let prefix: Vec<Rational> = rationals().take(2000).collect();
        let set: HashSet<&Rational> = prefix.iter().collect();
        assert_eq!(set.len(), prefix.len());
    }

    #[test]
    fn pairing_round_trip() {
        for n in 0..5000u64 {
            let (i, j) = unpair(n);
            assert_eq!((i + j) * (i + j + 1) / 2 + j, n);
        }
        assert_eq!(unpair(0), (0, 0));
    }

    #[test]
    fn first_interval() {
        assert_eq!(canonical_interval(0), Interval::open(q(0, 1), q(1, 1)));
    }

    #[test]
    fn small_intervals_are_covered() {
        // every (a, b) with a < b and |num|, den ≤ 3 appears among indices 0..10000
        let mut wanted = Vec::new();
        for an in -3..=3i64 {
            for ad in 1..=3i64 {
                for bn in -3..=3i64 {
                    for bd in 1..=3i64 {
                        let (a, b) = (q(an, ad), q(bn, bd));
                        if a < b {
                            wanted.push(Interval::open(a, b));
                        }
                    }
                }
            }
        }
        let seen: HashSet<Interval> = (0..10_000).map(canonical_interval).collect();
        for w in &wanted {
            assert!(seen.contains(w), "{w} missing");
        }
    }
}
