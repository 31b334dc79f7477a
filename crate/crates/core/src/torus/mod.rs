//! Arithmetic on the torus `T^d = R^d / Z^d`.
//!
//! Coordinates are exact reduced rationals, refinable combinations of
//! built-in surds, or decimal literals with a stated radius. Every distance
//! comes back as certified bounds; rationals are always exact. The torus norm
//! is the max over coordinates of the distance to the nearest integer.

mod grammar;
mod interval;
mod norm;
mod oracle;
mod reconstruct;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use grammar::parse_decimal;
pub use interval::{Certainty, Enclosure, IntervalValue};
pub use norm::{hom_norm, hom_norm_bounds, nth_root_bounds};
pub use oracle::{Oracle, Surd};
pub use reconstruct::{rational_reconstruct, simplest_in_interval};

use crate::error::{Error, Result};
use interval::Dyadic;

/// Working precision, in bits below the binary point, for enclosures.
pub const DEFAULT_PRECISION: u32 = 64;

/// Ceiling for automatic precision doubling.
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

#[derive(Clone, Debug)]
pub enum TorusCoord {
    /// Reduced `num/den` with `0 <= num < den`.
    Rational(BigRational),
    Refinable(Refinable),
    Literal(Literal),
}

/// `sum(m_i * surd_i) + offset (mod 1)`.
#[derive(Clone, Debug)]
pub struct Refinable {
    terms: Vec<Term>,
    offset: BigRational,
}

#[derive(Clone, Debug)]
struct Term {
    multiplier: BigInt,
    oracle: Arc<Oracle>,
}

/// A decimal value known only to within `radius`; cannot be refined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Literal {
    center: BigRational,
    radius: BigRational,
}

fn reduce_mod_one(q: BigRational) -> BigRational {
    let fl = q.floor();
    q - fl
}

impl TorusCoord {
    pub fn zero() -> Self {
        TorusCoord::Rational(BigRational::zero())
    }

    /// Any rational, canonicalized into `[0, 1)`.
    pub fn from_ratio(q: BigRational) -> Self {
        TorusCoord::Rational(reduce_mod_one(q))
    }

    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        Ok(TorusCoord::from_ratio(BigRational::new(num.into(), den)))
    }

    pub fn surd(surd: Surd) -> Self {
        TorusCoord::Refinable(Refinable {
            terms: vec![Term {
                multiplier: BigInt::one(),
                oracle: Arc::new(Oracle::new(surd)),
            }],
            offset: BigRational::zero(),
        })
    }

    /// `sqrt(n) mod 1`; a perfect square collapses to the rational 0.
    pub fn sqrt(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("sqrt:0 is not a positive integer"));
        }
        if oracle::is_square(n) {
            return Ok(TorusCoord::zero());
        }
        Ok(TorusCoord::surd(Surd::sqrt(n)?))
    }

    pub fn phi() -> Self {
        TorusCoord::surd(Surd::Phi)
    }

    pub fn literal(center: BigRational, radius: BigRational) -> Result<Self> {
        if radius.is_negative() {
            return Err(Error::invalid("negative literal radius"));
        }
        Ok(TorusCoord::Literal(Literal {
            center: reduce_mod_one(center),
            radius,
        }))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, TorusCoord::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            TorusCoord::Rational(q) => Some(q),
            _ => None,
        }
    }

    /// Whether arbitrarily tight enclosures are available.
    pub fn is_refinable(&self) -> bool {
        !matches!(self, TorusCoord::Literal(_))
    }

    /// Certified enclosure of width at most `2^-bits` (exact for rationals,
    /// `2 * radius` for literals).
    pub fn enclose(&self, bits: u32) -> Enclosure {
        match self {
            TorusCoord::Rational(q) => Enclosure::exact(q.clone()),
            TorusCoord::Refinable(r) => r.enclose(bits),
            TorusCoord::Literal(l) => Enclosure::new(&l.center - &l.radius, &l.center + &l.radius),
        }
    }

    pub fn dist_to_zero(&self) -> IntervalValue {
        self.dist_to_zero_at(DEFAULT_PRECISION)
    }

    pub fn dist_to_zero_at(&self, bits: u32) -> IntervalValue {
        self.enclose(bits).dist_to_zero()
    }

    /// `n * self (mod 1)`.
    pub fn scalar_mul(&self, n: &BigInt) -> Result<TorusCoord> {
        if n.is_zero() {
            return Ok(TorusCoord::zero());
        }
        Ok(match self {
            TorusCoord::Rational(q) => {
                let den = q.denom();
                let reduced = n.mod_floor(den);
                let num = (reduced * q.numer()).mod_floor(den);
                TorusCoord::Rational(BigRational::new(num, den.clone()))
            }
            TorusCoord::Refinable(r) => TorusCoord::Refinable(Refinable {
                terms: r
                    .terms
                    .iter()
                    .map(|t| Term {
                        multiplier: &t.multiplier * n,
                        oracle: Arc::clone(&t.oracle),
                    })
                    .collect(),
                offset: reduce_mod_one(&r.offset * n),
            }),
            TorusCoord::Literal(l) => {
                let radius = &l.radius * BigRational::from_integer(n.abs());
                if radius > BigRational::new(BigInt::one(), BigInt::from(4)) {
                    return Err(Error::PrecisionExhausted(format!(
                        "literal radius {} times {} exceeds 1/4",
                        l.radius, n
                    )));
                }
                TorusCoord::Literal(Literal {
                    center: reduce_mod_one(&l.center * n),
                    radius,
                })
            }
        })
    }

    pub fn scalar_mul_u128(&self, n: u128) -> Result<TorusCoord> {
        self.scalar_mul(&BigInt::from(n))
    }

    /// `self + other (mod 1)`.
    pub fn add(&self, other: &TorusCoord) -> TorusCoord {
        use TorusCoord::*;
        match (self, other) {
            (Rational(a), Rational(b)) => TorusCoord::from_ratio(a + b),
            (Rational(q), Refinable(r)) | (Refinable(r), Rational(q)) => {
                TorusCoord::Refinable(self::Refinable {
                    terms: r.terms.clone(),
                    offset: reduce_mod_one(&r.offset + q),
                })
            }
            (Refinable(a), Refinable(b)) => {
                let mut terms = a.terms.clone();
                for t in &b.terms {
                    match terms.iter_mut().find(|u| u.oracle.surd() == t.oracle.surd()) {
                        Some(u) => u.multiplier += &t.multiplier,
                        None => terms.push(t.clone()),
                    }
                }
                terms.retain(|t| !t.multiplier.is_zero());
                let offset = reduce_mod_one(&a.offset + &b.offset);
                if terms.is_empty() {
                    TorusCoord::Rational(offset)
                } else {
                    TorusCoord::Refinable(self::Refinable { terms, offset })
                }
            }
            (Literal(l), x) | (x, Literal(l)) => {
                let e = x.enclose(2 * DEFAULT_PRECISION);
                let half_width = e.width() / BigInt::from(2);
                TorusCoord::Literal(self::Literal {
                    center: reduce_mod_one(&l.center + e.midpoint()),
                    radius: &l.radius + half_width,
                })
            }
        }
    }

    /// Midpoint of a 64-bit enclosure as a float, for diagnostics only.
    pub fn to_f64(&self) -> f64 {
        let e = self.enclose(DEFAULT_PRECISION);
        let mid = e.midpoint();
        let v = crate::wire::ratio_to_f64(&(&mid - mid.floor()));
        if v >= 1.0 {
            0.0
        } else {
            v
        }
    }
}

impl PartialEq for TorusCoord {
    fn eq(&self, other: &Self) -> bool {
        use TorusCoord::*;
        match (self, other) {
            (Rational(a), Rational(b)) => a == b,
            (Refinable(a), Refinable(b)) => {
                a.offset == b.offset
                    && a.terms.len() == b.terms.len()
                    && a.terms.iter().all(|t| {
                        b.terms.iter().any(|u| {
                            u.oracle.surd() == t.oracle.surd() && u.multiplier == t.multiplier
                        })
                    })
            }
            (Literal(a), Literal(b)) => a == b,
            _ => false,
        }
    }
}

impl Refinable {
    /// Sum of outward-rounded term enclosures; total width at most `2^-bits`.
    pub fn enclose(&self, bits: u32) -> Enclosure {
        let slack = (usize::BITS - self.terms.len().leading_zeros()) + 1;
        let mut parts: Vec<Dyadic> = self
            .terms
            .iter()
            .map(|t| {
                let mbits = t.multiplier.bits() as u32;
                let scale = bits + mbits + slack;
                let f = t.oracle.floor_scaled(scale);
                let unit = Dyadic {
                    hi: &f + 1,
                    lo: f,
                    scale,
                };
                unit.mul_int(&t.multiplier)
            })
            .collect();
        let scale = parts.iter().map(|d| d.scale).max().unwrap_or(bits + slack);
        parts.push(Dyadic::from_ratio(&self.offset, scale));
        let mut total = Dyadic::zero(scale);
        for p in &parts {
            total.add_assign(&p.rescale(scale));
        }
        total.into_enclosure()
    }

    /// The single surd this coordinate equals, if it is exactly `surd mod 1`.
    pub fn as_plain_surd(&self) -> Option<Surd> {
        match self.terms.as_slice() {
            [t] if t.multiplier.is_one() && self.offset.is_zero() => Some(t.oracle.surd()),
            _ => None,
        }
    }
}

impl Literal {
    pub fn center(&self) -> &BigRational {
        &self.center
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }
}

/// A point of `T^d`, `d >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    coords: Vec<TorusCoord>,
}

impl TorusPoint {
    pub fn new(coords: Vec<TorusCoord>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("torus point needs at least one coordinate"));
        }
        Ok(TorusPoint { coords })
    }

    pub fn zero(dim: usize) -> Self {
        TorusPoint {
            coords: vec![TorusCoord::zero(); dim.max(1)],
        }
    }

    pub fn from_ratios(values: &[BigRational]) -> Result<Self> {
        TorusPoint::new(values.iter().cloned().map(TorusCoord::from_ratio).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[TorusCoord] {
        &self.coords
    }

    pub fn coord(&self, j: usize) -> &TorusCoord {
        &self.coords[j]
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().all(TorusCoord::is_rational)
    }

    pub fn is_refinable(&self) -> bool {
        self.coords.iter().all(TorusCoord::is_refinable)
    }

    /// All coordinates as exact rationals, if the point is rational.
    pub fn rationals(&self) -> Option<Vec<BigRational>> {
        self.coords
            .iter()
            .map(|c| c.as_rational().cloned())
            .collect()
    }

    /// The same scalar on every coordinate.
    pub fn scale(&self, n: &BigInt) -> Result<TorusPoint> {
        let coords = self
            .coords
            .iter()
            .map(|c| c.scalar_mul(n))
            .collect::<Result<_>>()?;
        Ok(TorusPoint { coords })
    }

    pub fn truncate(&self, dim: usize) -> Result<TorusPoint> {
        TorusPoint::new(self.coords[..dim.min(self.coords.len())].to_vec())
    }

    pub fn dist_per_coord(&self, bits: u32) -> Vec<IntervalValue> {
        self.coords.iter().map(|c| c.dist_to_zero_at(bits)).collect()
    }
}

/// Coordinate-wise `(k_1 x_1, ..., k_d x_d)`.
pub fn vec_mul(k: &[BigInt], x: &TorusPoint) -> Result<TorusPoint> {
    if k.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: k.len(),
        });
    }
    let coords = k
        .iter()
        .zip(x.coords())
        .map(|(n, c)| c.scalar_mul(n))
        .collect::<Result<_>>()?;
    TorusPoint::new(coords)
}

/// Bounds on `max_j ||x_j||_T` at the default precision.
pub fn torus_dist(x: &TorusPoint) -> IntervalValue {
    torus_dist_at(x, DEFAULT_PRECISION)
}

pub fn torus_dist_at(x: &TorusPoint, bits: u32) -> IntervalValue {
    max_interval(&x.dist_per_coord(bits))
}

pub(crate) fn max_interval(values: &[IntervalValue]) -> IntervalValue {
    values
        .iter()
        .fold(IntervalValue::zero(), |acc, v| acc.max(v))
}

/// Outcome of certifying `torus_dist(x) <= eps` with precision doubling.
#[derive(Debug, Clone)]
pub struct DistCertificate {
    pub per_coord: Vec<IntervalValue>,
    pub certainty: Certainty,
    pub bits: u32,
}

impl DistCertificate {
    pub fn max(&self) -> IntervalValue {
        max_interval(&self.per_coord)
    }
}

/// Decide `torus_dist(x) <= eps`, doubling precision from `start_bits` up to
/// `cap` while the answer is undecided. Only literal inputs or an exhausted
/// cap leave the outcome `Unknown`.
pub fn certify_dist(x: &TorusPoint, eps: &BigRational, start_bits: u32, cap: u32) -> DistCertificate {
    let mut bits = start_bits.max(1).min(cap.max(1));
    loop {
        let per_coord = x.dist_per_coord(bits);
        let certainty = max_interval(&per_coord).certify_leq(eps);
        if certainty != Certainty::Unknown || !x.is_refinable() || bits >= cap {
            return DistCertificate {
                per_coord,
                certainty,
                bits,
            };
        }
        bits = (bits * 2).min(cap);
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn rat(n: i64, d: i64) -> TorusCoord {
        TorusCoord::rational(n, d).unwrap()
    }

    #[test]
    fn dist_of_fifths() {
        assert_eq!(rat(1, 5).dist_to_zero(), IntervalValue::exact(q(1, 5)));
        assert_eq!(rat(4, 5).dist_to_zero(), IntervalValue::exact(q(1, 5)));
    }

    #[test]
    fn negative_canonicalized() {
        assert_eq!(rat(-1, 5), rat(4, 5));
        assert_eq!(rat(7, 5), rat(2, 5));
        assert_eq!(rat(3, 3), TorusCoord::zero());
    }

    #[test]
    fn scalar_mul_rational_cases() {
        assert_eq!(rat(1, 12).scalar_mul_u128(12).unwrap(), TorusCoord::zero());
        assert_eq!(rat(2, 5).scalar_mul_u128(7).unwrap(), rat(4, 5));
        assert_eq!(rat(2, 5).scalar_mul_u128(0).unwrap(), TorusCoord::zero());
    }

    #[test]
    fn vec_mul_cases() {
        let x = TorusPoint::new(vec![rat(1, 4), rat(1, 9)]).unwrap();
        let k = [BigInt::from(2), BigInt::from(3)];
        let y = vec_mul(&k, &x).unwrap();
        assert_eq!(y, TorusPoint::new(vec![rat(1, 2), rat(1, 3)]).unwrap());

        let ones = [BigInt::one(), BigInt::one()];
        assert_eq!(vec_mul(&ones, &x).unwrap(), x);

        let x = TorusPoint::new(vec![rat(1, 5), rat(1, 5)]).unwrap();
        let k = [BigInt::from(6), BigInt::from(36)];
        assert_eq!(vec_mul(&k, &x).unwrap(), x);

        assert!(matches!(
            vec_mul(&[BigInt::one()], &x),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn torus_dist_rational() {
        assert_eq!(torus_dist(&TorusPoint::zero(2)), IntervalValue::zero());
        let x = TorusPoint::new(vec![rat(1, 5), rat(2, 5)]).unwrap();
        assert_eq!(torus_dist(&x), IntervalValue::exact(q(2, 5)));
    }

    #[test]
    fn literal_radius_guard() {
        let lit = TorusCoord::literal(q(1, 3), q(1, 1000)).unwrap();
        assert!(lit.scalar_mul_u128(250).is_ok());
        assert!(matches!(
            lit.scalar_mul_u128(251),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn refinable_sum_cancels_to_rational() {
        let a = TorusCoord::sqrt(2).unwrap().add(&rat(1, 3));
        let b = TorusCoord::sqrt(2)
            .unwrap()
            .scalar_mul(&BigInt::from(-1))
            .unwrap();
        assert_eq!(a.add(&b), rat(1, 3));
    }

    #[test]
    fn sqrt_of_square_is_zero() {
        assert_eq!(TorusCoord::sqrt(49).unwrap(), TorusCoord::zero());
    }

    #[test]
    fn certify_with_doubling() {
        let x = TorusPoint::new(vec![TorusCoord::sqrt(2).unwrap()]).unwrap();
        let d = torus_dist(&x).midpoint();
        let cert = certify_dist(&x, &d, 8, 4096);
        // Threshold equals a 64-bit midpoint: decided once precision passes it.
        assert_ne!(cert.certainty, Certainty::Unknown);
        assert!(cert.bits > 64);
    }
}
