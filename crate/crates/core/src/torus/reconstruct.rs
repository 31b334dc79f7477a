use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::TorusCoord;

/// The rational with least denominator in the closed interval `[lo, hi]`.
///
/// Walks the continued-fraction expansion shared by both endpoints; the
/// answer is always a convergent or semiconvergent of them.
pub fn simplest_in_interval(lo: &BigRational, hi: &BigRational) -> BigRational {
    assert!(lo <= hi, "empty interval [{lo}, {hi}]");
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return BigRational::zero();
    }
    if hi.is_negative() {
        return -simplest_in_interval(&-hi, &-lo);
    }
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + BigRational::one();
    if &next <= hi {
        return next;
    }
    // lo, hi both in (fl, fl + 1): recurse on reciprocals of the fractional parts.
    let inner = simplest_in_interval(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Reconstruct a small-denominator rational for a torus coordinate.
///
/// Returns the rational of least denominator within `tol` of the midpoint
/// of the coordinate's enclosure, reduced into `[0, 1)`, provided that
/// denominator is at most `max_den`. When `tol < 1 / (2 max_den^2)` at most
/// one rational with denominator `<= max_den` is that close, so the answer
/// is also the nearest one. `None` if the enclosure cannot be made narrower
/// than `tol` or no denominator qualifies.
pub fn rational_reconstruct(c: &TorusCoord, max_den: &BigInt, tol: &BigRational) -> Option<BigRational> {
    if let TorusCoord::Rational(q) = c {
        if q.denom() <= max_den {
            return Some(q.clone());
        }
    }
    let mut bits = 64u32;
    let enclosure = loop {
        let e = c.enclose(bits);
        if e.width() <= *tol || !c.is_refinable() || bits >= super::DEFAULT_PRECISION_CAP {
            break e;
        }
        bits *= 2;
    };
    if enclosure.width() > *tol {
        return None;
    }
    let mid = enclosure.midpoint();
    let found = simplest_in_interval(&(&mid - tol), &(&mid + tol));
    if found.denom() > max_den {
        return None;
    }
    Some(&found - found.floor())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn simplest_basics() {
        assert_eq!(simplest_in_interval(&q(1, 3), &q(1, 2)), q(1, 2));
        assert_eq!(simplest_in_interval(&q(3, 10), &q(4, 10)), q(1, 3));
        assert_eq!(simplest_in_interval(&q(-1, 10), &q(1, 10)), q(0, 1));
        assert_eq!(simplest_in_interval(&q(5, 2), &q(5, 2)), q(5, 2));
        assert_eq!(simplest_in_interval(&q(-7, 10), &q(-6, 10)), q(-2, 3));
        assert_eq!(simplest_in_interval(&q(31, 10), &q(42, 10)), q(4, 1));
    }

    #[test]
    fn reconstruct_one_third() {
        // 0.333333 +- 1e-6
        let c = TorusCoord::literal(q(333_333, 1_000_000), q(1, 1_000_000)).unwrap();
        let got = rational_reconstruct(&c, &BigInt::from(100), &q(1, 10_000));
        assert_eq!(got, Some(q(1, 3)));
    }

    #[test]
    fn reconstruct_exact_half() {
        let c = TorusCoord::rational(1, 2).unwrap();
        let got = rational_reconstruct(&c, &BigInt::from(2), &q(0, 1));
        assert_eq!(got, Some(q(1, 2)));
    }

    #[test]
    fn reconstruct_pi_fraction_fails_small_den() {
        // 0.1415926 +- 1e-7: 1/7 is 1.26e-3 away, no denominator <= 10 within 1e-4.
        let c = TorusCoord::literal(q(1_415_926, 10_000_000), q(1, 10_000_000)).unwrap();
        assert_eq!(rational_reconstruct(&c, &BigInt::from(10), &q(1, 10_000)), None);
        // brute-force confirmation over all denominators <= 10
        let x = q(1_415_926, 10_000_000);
        for den in 1..=10i64 {
            for num in 0..=den {
                assert!((q(num, den) - &x).abs() > q(1, 10_000));
            }
        }
    }

    #[test]
    fn reconstruct_wraps_near_one() {
        let c = TorusCoord::rational(999_999, 1_000_000).unwrap();
        assert_eq!(rational_reconstruct(&c, &BigInt::from(10), &q(1, 1000)), Some(q(0, 1)));
    }
}
