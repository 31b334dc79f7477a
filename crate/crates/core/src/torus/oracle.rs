//! Refinable real sources.
//!
//! Every source answers one question exactly: `floor(value * 2^bits)`. The
//! true value then lies in `[f, f + 1] / 2^bits`, and because
//! `floor(floor(x * 2^B) / 2^(B - b)) = floor(x * 2^b)` a cached answer at
//! a higher precision can serve any lower one without breaking nesting.

use std::fmt;
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;

use crate::error::{Error, Result};

/// The built-in irrational constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Surd {
    /// Square root of a positive non-square integer.
    Sqrt(u64),
    /// The golden ratio (1 + sqrt 5) / 2.
    Phi,
}

impl Surd {
    pub fn sqrt(n: u64) -> Result<Self> {
        if n == 0 || is_square(n) {
            return Err(Error::invalid(format!("sqrt:{n} is rational")));
        }
        Ok(Surd::Sqrt(n))
    }

    /// `floor(value * 2^bits)`, computed from an exact integer square root.
    pub fn floor_scaled(self, bits: u32) -> BigInt {
        match self {
            Surd::Sqrt(n) => {
                let scaled = BigUint::from(n) << (2 * bits as usize);
                BigInt::from(scaled.sqrt())
            }
            Surd::Phi => {
                // floor((2^b + sqrt(5 * 4^b)) / 2) = (2^b + isqrt(5 * 4^b)) >> 1
                let root = (BigUint::from(5u32) << (2 * bits as usize)).sqrt();
                BigInt::from((root + (BigUint::from(1u32) << bits as usize)) >> 1usize)
            }
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Surd::Sqrt(n) => write!(f, "sqrt:{n}"),
            Surd::Phi => write!(f, "phi"),
        }
    }
}

pub(crate) fn is_square(n: u64) -> bool {
    let r = n.sqrt();
    r * r == n
}

/// A surd together with its best cached expansion.
///
/// The cache only ever moves to higher precision, so readers never observe
/// an interval that is not nested inside an earlier one.
pub struct Oracle {
    surd: Surd,
    cache: RwLock<Option<(u32, BigInt)>>,
}

impl Oracle {
    pub fn new(surd: Surd) -> Self {
        Oracle {
            surd,
            cache: RwLock::new(None),
        }
    }

    pub fn surd(&self) -> Surd {
        self.surd
    }

    pub fn floor_scaled(&self, bits: u32) -> BigInt {
        {
            let guard = self.cache.read().expect("oracle cache poisoned");
            if let Some((cached_bits, mantissa)) = guard.as_ref() {
                if *cached_bits >= bits {
                    return mantissa >> (cached_bits - bits) as usize;
                }
            }
        }
        let mantissa = self.surd.floor_scaled(bits);
        let mut guard = self.cache.write().expect("oracle cache poisoned");
        match guard.as_ref() {
            Some((cached_bits, _)) if *cached_bits >= bits => {}
            _ => *guard = Some((bits, mantissa.clone())),
        }
        mantissa
    }

    /// Precision of the cached expansion, if any.
    pub fn cached_bits(&self) -> Option<u32> {
        self.cache
            .read()
            .expect("oracle cache poisoned")
            .as_ref()
            .map(|(b, _)| *b)
    }
}

impl fmt::Debug for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Oracle")
            .field("surd", &self.surd)
            .field("cached_bits", &self.cached_bits())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_leading_bits() {
        // floor(sqrt2 * 2^10) = floor(1448.15...) = 1448
        assert_eq!(Surd::Sqrt(2).floor_scaled(10), BigInt::from(1448));
    }

    #[test]
    fn phi_leading_bits() {
        // floor(phi * 2^20) = floor(1696631.15...)
        let expected = (1.618_033_988_749_895_f64 * (1u64 << 20) as f64).floor() as i64;
        assert_eq!(Surd::Phi.floor_scaled(20), BigInt::from(expected));
    }

    #[test]
    fn perfect_squares_rejected() {
        assert!(Surd::sqrt(49).is_err());
        assert!(Surd::sqrt(0).is_err());
        assert!(Surd::sqrt(50).is_ok());
    }

    #[test]
    fn cache_serves_lower_precision() {
        let oracle = Oracle::new(Surd::Sqrt(3));
        let hi = oracle.floor_scaled(200);
        assert_eq!(oracle.cached_bits(), Some(200));
        for bits in [1, 17, 64, 199] {
            assert_eq!(oracle.floor_scaled(bits), Surd::Sqrt(3).floor_scaled(bits));
            assert_eq!(oracle.floor_scaled(bits), &hi >> (200 - bits) as usize);
        }
        oracle.floor_scaled(50);
        assert_eq!(oracle.cached_bits(), Some(200));
    }
}
