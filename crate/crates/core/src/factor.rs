//! Multiplicative exponent vectors over a coprime base.
//!
//! Given a handful of positive rationals, refine their numerators and
//! denominators into pairwise coprime integers by repeated gcd splitting.
//! Each input then has a unique integer exponent vector over that base, so
//! questions like "is `r` a rational power of `s`" reduce to linear algebra
//! on small integer vectors. No primality testing is needed.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone)]
pub struct CoprimeBase {
    base: Vec<BigUint>,
}

impl CoprimeBase {
    /// Base covering the numerators and denominators of `values` (signs are
    /// ignored; zero is not allowed).
    pub fn for_rationals(values: &[&Rational]) -> Self {
        let mut nums: Vec<BigUint> = Vec::new();
        for v in values {
            assert!(!v.is_zero(), "zero has no exponent vector");
            nums.push(v.numer().magnitude().clone());
            nums.push(v.denom().magnitude().clone());
        }
        CoprimeBase { base: refine(nums) }
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Exponent vector of `|v|`. `v` must be built from this base's inputs.
    pub fn vector(&self, v: &Rational) -> Vec<BigInt> {
        let num = self.int_vector(v.numer().magnitude());
        let den = self.int_vector(v.denom().magnitude());
        num.into_iter().zip(den).map(|(a, b)| a - b).collect()
    }

    fn int_vector(&self, n: &BigUint) -> Vec<BigInt> {
        let mut rest = n.clone();
        let out = self
            .base
            .iter()
            .map(|b| {
                let mut e = 0u64;
                loop {
                    let (quot, rem) = rest.div_rem(b);
                    if !rem.is_zero() {
                        break;
                    }
                    rest = quot;
                    e += 1;
                }
                BigInt::from(e)
            })
            .collect();
        assert!(rest.is_one(), "{n} does not factor over the base");
        out
    }
}

fn refine(nums: Vec<BigUint>) -> Vec<BigUint> {
    let mut list: Vec<BigUint> = nums.into_iter().filter(|n| *n > BigUint::one()).collect();
    list.sort();
    list.dedup();
    'outer: loop {
        for i in 0..list.len() {
            for j in (i + 1)..list.len() {
                let g = list[i].gcd(&list[j]);
                if !g.is_one() {
                    let a = &list[i] / &g;
                    let b = &list[j] / &g;
                    list.swap_remove(j);
                    list.swap_remove(i);
                    list.extend([g, a, b].into_iter().filter(|n| *n > BigUint::one()));
                    list.sort();
                    list.dedup();
                    continue 'outer;
                }
            }
        }
        return list;
    }
}

/// If `v = λ·w` for a rational `λ` (with `w ≠ 0`), return `λ` as
/// `(numerator, positive denominator)` in lowest terms.
pub fn proportion(v: &[BigInt], w: &[BigInt]) -> Option<(BigInt, BigInt)> {
    let pivot = w.iter().position(|x| !x.is_zero())?;
    let (num, den) = (v[pivot].clone(), w[pivot].clone());
    let parallel = v.iter().zip(w).all(|(vi, wi)| vi * &den == wi * &num);
    if !parallel {
        return None;
    }
    let g = num.gcd(&den);
    let (mut num, mut den) = if g.is_zero() {
        (BigInt::zero(), BigInt::one())
    } else {
        (num / &g, den / &g)
    };
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    Some((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn base_is_pairwise_coprime() {
        let base = CoprimeBase::for_rationals(&[&q(12, 35), &q(18, 1), &q(1, 10)]);
        for (i, a) in base.base.iter().enumerate() {
            for b in &base.base[i + 1..] {
                assert!(a.gcd(b).is_one(), "{a} and {b}");
            }
        }
    }

    #[test]
    fn power_relations() {
        let half = q(1, 2);
        let quarter = q(1, 4);
        let third = q(1, 3);
        let base = CoprimeBase::for_rationals(&[&half, &quarter, &third]);
        let vh = base.vector(&half);
        let vq = base.vector(&quarter);
        let vt = base.vector(&third);
        assert_eq!(proportion(&vq, &vh), Some((2.into(), 1.into())));
        assert_eq!(proportion(&vh, &vq), Some((1.into(), 2.into())));
        assert_eq!(proportion(&vt, &vh), None);
    }

    #[test]
    fn composite_bases_without_primes() {
        // 6 and 36 share a base element; 8/27 = (2/3)^3 is parallel to 4/9
        let a = q(8, 27);
        let b = q(4, 9);
        let base = CoprimeBase::for_rationals(&[&a, &b, &q(1, 6)]);
        assert_eq!(
            proportion(&base.vector(&a), &base.vector(&b)),
            Some((3.into(), 2.into()))
        );
    }
}
