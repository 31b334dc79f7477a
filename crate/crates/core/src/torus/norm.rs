//! The homogeneous quasi-norm `|x_1| + |x_2|^(1/2) + ... + |x_d|^(1/d)`.
//!
//! Under the dilation `(t x_1, t^2 x_2, ..., t^d x_d)` it scales by `|t|`,
//! and it satisfies the triangle inequality.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use super::interval::IntervalValue;

/// Bounds on `q^(1/j)` for `q >= 0`, each endpoint within `2^-bits` of the
/// true root. Exact (`lo == hi`) whenever `q` is a perfect `j`-th power.
pub fn nth_root_bounds(q: &BigRational, j: u32, bits: u32) -> (BigRational, BigRational) {
    assert!(j >= 1, "root index must be positive");
    assert!(!q.is_negative(), "root of negative value {q}");
    if j == 1 || q.is_zero() {
        return (q.clone(), q.clone());
    }
    // (a/b)^(1/j) = (a * b^(j-1))^(1/j) / b
    let a = q.numer().magnitude().clone();
    let b = q.denom().magnitude().clone();
    let radicand: BigUint = (&a * Pow::pow(&b, j - 1)) << (j as usize * bits as usize);
    let root = radicand.nth_root(j);
    let exact = Pow::pow(&root, j) == radicand;
    let den = BigInt::from(b) << bits as usize;
    let lo = BigRational::new(BigInt::from(root.clone()), den.clone());
    let hi = if exact {
        lo.clone()
    } else {
        BigRational::new(BigInt::from(root) + BigInt::one(), den)
    };
    (lo, hi)
}

/// Certified quasi-norm of a rational vector, with roots taken to 96 bits.
pub fn hom_norm(v: &[BigRational]) -> IntervalValue {
    let abs: Vec<BigRational> = v.iter().map(|x| x.abs()).collect();
    hom_norm_bounds(&abs, &abs, 96)
}

/// Quasi-norm bounds when each `|x_j|` is only known to lie in
/// `[abs_lo[j], abs_hi[j]]`.
pub fn hom_norm_bounds(abs_lo: &[BigRational], abs_hi: &[BigRational], bits: u32) -> IntervalValue {
    debug_assert_eq!(abs_lo.len(), abs_hi.len());
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    for (j, (l, h)) in abs_lo.iter().zip(abs_hi).enumerate() {
        let index = j as u32 + 1;
        lo += nth_root_bounds(l, index, bits).0;
        hi += nth_root_bounds(h, index, bits).1;
    }
    IntervalValue::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zero_vector() {
        assert_eq!(hom_norm(&[q(0, 1), q(0, 1), q(0, 1)]), IntervalValue::zero());
    }

    #[test]
    fn half_and_quarter() {
        assert_eq!(hom_norm(&[q(1, 2), q(1, 4)]), IntervalValue::exact(q(1, 1)));
    }

    #[test]
    fn dilation_identity() {
        // (4, 16) = dilation of (1, 1) by t = 4
        assert_eq!(hom_norm(&[q(4, 1), q(16, 1)]), IntervalValue::exact(q(8, 1)));
        assert_eq!(hom_norm(&[q(1, 1), q(1, 1)]), IntervalValue::exact(q(2, 1)));
    }

    #[test]
    fn sign_ignored() {
        assert_eq!(hom_norm(&[q(-1, 2), q(-1, 4)]), IntervalValue::exact(q(1, 1)));
    }

    #[test]
    fn cube_root_bounds() {
        let (lo, hi) = nth_root_bounds(&q(8, 27), 3, 40);
        assert_eq!(lo, q(2, 3));
        assert_eq!(hi, q(2, 3));
        let (lo, hi) = nth_root_bounds(&q(2, 1), 3, 40);
        let c = 2f64.cbrt();
        assert!(crate::wire::ratio_to_f64(&lo) <= c && c <= crate::wire::ratio_to_f64(&hi));
        assert!(&hi - &lo <= q(1, 1 << 40));
    }
}
