use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::wire;

/// Certified bounds `lo <= value <= hi` on a non-negative quantity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalValue {
    #[serde(with = "wire::ratio")]
    pub lo: BigRational,
    #[serde(with = "wire::ratio")]
    pub hi: BigRational,
}

impl IntervalValue {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(!lo.is_negative(), "negative lower bound {lo}");
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        IntervalValue { lo, hi }
    }

    pub fn exact(value: BigRational) -> Self {
        IntervalValue::new(value.clone(), value)
    }

    pub fn zero() -> Self {
        IntervalValue::exact(BigRational::zero())
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigInt::from(2)
    }

    pub fn contains(&self, value: &BigRational) -> bool {
        &self.lo <= value && value <= &self.hi
    }

    pub fn overlaps(&self, other: &IntervalValue) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Componentwise maximum, i.e. bounds on `max(a, b)`.
    pub fn max(&self, other: &IntervalValue) -> IntervalValue {
        IntervalValue::new(
            (&self.lo).max(&other.lo).clone(),
            (&self.hi).max(&other.hi).clone(),
        )
    }

    /// Bounds on `min(a, b)`.
    pub fn min(&self, other: &IntervalValue) -> IntervalValue {
        IntervalValue::new(
            (&self.lo).min(&other.lo).clone(),
            (&self.hi).min(&other.hi).clone(),
        )
    }

    pub fn add(&self, other: &IntervalValue) -> IntervalValue {
        IntervalValue::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn to_f64(&self) -> f64 {
        wire::ratio_to_f64(&self.midpoint())
    }

    /// Compare against a threshold.
    pub fn certify_leq(&self, threshold: &BigRational) -> Certainty {
        if &self.hi <= threshold {
            Certainty::CertifiedLeq
        } else if &self.lo > threshold {
            Certainty::CertifiedGt
        } else {
            Certainty::Unknown
        }
    }
}

impl fmt::Display for IntervalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Certainty {
    CertifiedLeq,
    CertifiedGt,
    Unknown,
}

/// A signed real enclosure `[lo, hi]` of a torus coordinate's representative,
/// normalized so that `0 <= lo < 1`. `hi` may exceed 1 when the enclosure
/// straddles the wrap point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        let shift = lo.floor();
        Enclosure {
            lo: lo - &shift,
            hi: hi - shift,
        }
    }

    pub fn exact(value: BigRational) -> Self {
        Enclosure::new(value.clone(), value)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigInt::from(2)
    }

    /// Bounds on the distance to the nearest integer over the enclosure.
    pub fn dist_to_zero(&self) -> IntervalValue {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let upper = if self.width() >= BigRational::one() || contains_half_integer(&self.lo, &self.hi)
        {
            half
        } else {
            nearest_int_dist(&self.lo).max(nearest_int_dist(&self.hi))
        };
        let lower = if contains_integer(&self.lo, &self.hi) {
            BigRational::zero()
        } else {
            nearest_int_dist(&self.lo).min(nearest_int_dist(&self.hi))
        };
        IntervalValue::new(lower, upper)
    }

    /// Nearest-integer lift into `(-1/2, 1/2]`, as a signed enclosure.
    pub fn centered(&self) -> (BigRational, BigRational) {
        let mid = self.midpoint();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let shift = (&mid - &half).ceil();
        (&self.lo - &shift, &self.hi - shift)
    }
}

fn nearest_int_dist(x: &BigRational) -> BigRational {
    let frac = x - x.floor();
    let other = BigRational::one() - &frac;
    frac.min(other)
}

fn contains_integer(lo: &BigRational, hi: &BigRational) -> bool {
    &lo.ceil() <= hi
}

fn contains_half_integer(lo: &BigRational, hi: &BigRational) -> bool {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let shifted_lo = lo - &half;
    let shifted_hi = hi - &half;
    contains_integer(&shifted_lo, &shifted_hi)
}

/// Integer interval `[lo, hi] / 2^scale`.
#[derive(Debug, Clone)]
pub(crate) struct Dyadic {
    pub lo: BigInt,
    pub hi: BigInt,
    pub scale: u32,
}

impl Dyadic {
    pub fn zero(scale: u32) -> Self {
        Dyadic {
            lo: BigInt::zero(),
            hi: BigInt::zero(),
            scale,
        }
    }

    /// Outward rounding of a rational to `scale` fractional bits.
    pub fn from_ratio(q: &BigRational, scale: u32) -> Self {
        let scaled = q * BigRational::from_integer(BigInt::one() << scale as usize);
        Dyadic {
            lo: scaled.floor().to_integer(),
            hi: scaled.ceil().to_integer(),
            scale,
        }
    }

    pub fn rescale(&self, scale: u32) -> Self {
        debug_assert!(scale >= self.scale);
        let shift = (scale - self.scale) as usize;
        Dyadic {
            lo: &self.lo << shift,
            hi: &self.hi << shift,
            scale,
        }
    }

    pub fn add_assign(&mut self, other: &Dyadic) {
        debug_assert_eq!(self.scale, other.scale);
        self.lo += &other.lo;
        self.hi += &other.hi;
    }

    /// `m * [lo, hi]`, flipping endpoints for negative `m`.
    pub fn mul_int(&self, m: &BigInt) -> Self {
        let a = &self.lo * m;
        let b = &self.hi * m;
        let (lo, hi) = if m.is_negative() { (b, a) } else { (a, b) };
        Dyadic {
            lo,
            hi,
            scale: self.scale,
        }
    }

    pub fn into_enclosure(self) -> Enclosure {
        let unit = BigInt::one() << self.scale as usize;
        let k = self.lo.div_floor(&unit);
        let shift = &k * &unit;
        let den = unit;
        Enclosure {
            lo: BigRational::new(&self.lo - &shift, den.clone()),
            hi: BigRational::new(&self.hi - &shift, den),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn dist_over_plain_enclosure() {
        let e = Enclosure::new(q(1, 10), q(2, 10));
        assert_eq!(e.dist_to_zero(), IntervalValue::new(q(1, 10), q(2, 10)));
        let e = Enclosure::new(q(4, 10), q(7, 10));
        assert_eq!(e.dist_to_zero(), IntervalValue::new(q(3, 10), q(1, 2)));
    }

    #[test]
    fn dist_across_wrap() {
        let e = Enclosure::new(q(19, 20), q(21, 20));
        assert_eq!(e.dist_to_zero(), IntervalValue::new(q(0, 1), q(1, 20)));
    }

    #[test]
    fn enclosure_normalizes_negative() {
        let e = Enclosure::exact(q(-1, 5));
        assert_eq!(e.lo, q(4, 5));
    }

    #[test]
    fn centered_lift() {
        assert_eq!(Enclosure::exact(q(3, 4)).centered().0, q(-1, 4));
        assert_eq!(Enclosure::exact(q(1, 2)).centered().0, q(1, 2));
        assert_eq!(Enclosure::exact(q(1, 4)).centered().0, q(1, 4));
    }

    #[test]
    fn dyadic_rounds_outward() {
        let d = Dyadic::from_ratio(&q(1, 3), 4);
        assert_eq!(d.lo, BigInt::from(5));
        assert_eq!(d.hi, BigInt::from(6));
        let e = d.mul_int(&BigInt::from(-1)).into_enclosure();
        assert!(e.lo <= q(2, 3) && q(2, 3) <= e.hi);
    }

    #[test]
    fn certify_threshold() {
        let iv = IntervalValue::new(q(1, 10), q(2, 10));
        assert_eq!(iv.certify_leq(&q(1, 4)), Certainty::CertifiedLeq);
        assert_eq!(iv.certify_leq(&q(1, 20)), Certainty::CertifiedGt);
        assert_eq!(iv.certify_leq(&q(3, 20)), Certainty::Unknown);
    }
}
