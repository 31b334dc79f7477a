//! Bohr-recurrence witnesses for `{P(k s) : k in K, s in Sigma}` and the
//! escape phenomena of points with rationally independent coordinates.

mod engine;
mod escape;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{Certainty, IntervalValue, DEFAULT_PRECISION_CAP};
use crate::wire;

pub use engine::{
    brute_search, run_search, structured_search, verify_witness, BestSoFar, SearchControl, SearchOutcome,
    SearchProblem, SearchState, Stage, Strategy, StructuredConfig,
};
pub use escape::{check_residues, escape_infimum, ResidueReport};

/// `c_1 n + c_2 n^2 + ... + c_r n^r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntPolynomial {
    #[serde(with = "wire::decimal_vec")]
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::invalid("polynomial has no nonzero coefficient"));
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `coeffs()[j - 1]` is the coefficient of `n^j`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval(&self, n: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| (acc + c) * n)
    }
}

impl FromStr for IntPolynomial {
    type Err = Error;

    /// Comma-separated `c_1,...,c_r`: `"1,1"` is `n + n^2`.
    fn from_str(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|c| BigInt::from_str(c.trim()).map_err(|e| Error::parse(s, e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        IntPolynomial::new(coeffs)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(BigInt::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// A finite truncation of a multiplier family containing multiples of every
/// positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum KFamily {
    Factorials { bound: u32 },
    LcmPrefix { bound: u32 },
    Explicit {
        #[serde(with = "wire::decimal_vec")]
        values: Vec<BigInt>,
    },
}

impl KFamily {
    /// Distinct members in increasing order.
    pub fn members(&self) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = match self {
            KFamily::Factorials { bound } => (1..=*bound)
                .scan(BigInt::one(), |acc, k| {
                    *acc *= k;
                    Some(acc.clone())
                })
                .collect(),
            KFamily::LcmPrefix { bound } => (1..=*bound)
                .scan(BigInt::one(), |acc, k| {
                    *acc = acc.lcm(&BigInt::from(k));
                    Some(acc.clone())
                })
                .collect(),
            KFamily::Explicit { values } => values.clone(),
        };
        out.sort();
        out.dedup();
        out
    }

    /// Largest `b` such that every integer `<= b` divides some member.
    pub fn covered_bound(&self) -> u32 {
        match self {
            KFamily::Factorials { bound } | KFamily::LcmPrefix { bound } => *bound,
            KFamily::Explicit { values } => {
                let mut b = 0u32;
                while values.iter().any(|v| (v % BigInt::from(b + 1)).is_zero()) {
                    b += 1;
                    if b == u32::MAX {
                        break;
                    }
                }
                b
            }
        }
    }
}

impl FromStr for KFamily {
    type Err = Error;

    /// `factorials:12`, `lcm:12` or `explicit:7,14`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(s, "expected kind:value"))?;
        let bound = || {
            rest.trim()
                .parse::<u32>()
                .map_err(|e| Error::parse(s, e.to_string()))
        };
        let family = match kind.trim() {
            "factorials" => KFamily::Factorials { bound: bound()? },
            "lcm" => KFamily::LcmPrefix { bound: bound()? },
            "explicit" => KFamily::Explicit {
                values: rest
                    .split(',')
                    .map(|v| BigInt::from_str(v.trim()).map_err(|e| Error::parse(s, e.to_string())))
                    .collect::<Result<_>>()?,
            },
            other => return Err(Error::parse(s, format!("unknown family {other:?}"))),
        };
        match &family {
            KFamily::Factorials { bound: 0 } | KFamily::LcmPrefix { bound: 0 } => {
                Err(Error::parse(s, "bound must be positive"))
            }
            KFamily::Explicit { values } if values.iter().any(|v| !v.is_positive()) => {
                Err(Error::parse(s, "members must be positive"))
            }
            _ => Ok(family),
        }
    }
}

impl fmt::Display for KFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KFamily::Factorials { bound } => write!(f, "factorials:{bound}"),
            KFamily::LcmPrefix { bound } => write!(f, "lcm:{bound}"),
            KFamily::Explicit { values } => {
                let parts: Vec<String> = values.iter().map(BigInt::to_string).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Largest semigroup element considered.
    #[serde(with = "wire::decimal")]
    pub max_s: u128,
    /// Number of leading members of `K` considered.
    pub max_k_index: usize,
    #[serde(skip)]
    pub wall_clock: Option<Duration>,
    pub precision_cap: u32,
    /// Candidate pairs per parallel shard.
    pub shard_size: usize,
}

impl SearchBudget {
    pub fn new(max_s: u128) -> Self {
        SearchBudget {
            max_s,
            max_k_index: usize::MAX,
            wall_clock: None,
            precision_cap: DEFAULT_PRECISION_CAP,
            shard_size: 256,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_s == 0 || self.max_k_index == 0 || self.precision_cap == 0 || self.shard_size == 0 {
            return Err(Error::invalid("budget fields must be positive"));
        }
        if self.wall_clock.is_some_and(|d| d.is_zero()) {
            return Err(Error::invalid("wall-clock budget must be positive"));
        }
        Ok(())
    }
}

/// A certified pair `(k, s)` with `||P(k s) alpha||_T <= eps`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(with = "wire::decimal")]
    pub k: BigInt,
    #[serde(with = "wire::decimal")]
    pub s: BigInt,
    #[serde(with = "wire::decimal")]
    pub r_value: BigInt,
    pub distances: Vec<IntervalValue>,
    pub certainty: Certainty,
    pub bits: u32,
    pub strategy: Strategy,
    /// `s` was drawn from the elements congruent to 1 mod this.
    pub modulus: Option<u64>,
    /// Candidate pairs evaluated before and including this one.
    pub examined: u64,
}

impl Witness {
    pub fn max_distance(&self) -> IntervalValue {
        self.distances
            .iter()
            .fold(IntervalValue::zero(), |acc, d| acc.max(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_eval_and_grammar() {
        let p: IntPolynomial = "1,1".parse().unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(&BigInt::from(3)), BigInt::from(12));
        assert_eq!(p.to_string(), "1,1");
        let q: IntPolynomial = "0,-2,0".parse().unwrap();
        assert_eq!(q.degree(), 2);
        assert_eq!(q.eval(&BigInt::from(5)), BigInt::from(-50));
        assert!("0,0".parse::<IntPolynomial>().is_err());
        assert!("".parse::<IntPolynomial>().is_err());
    }

    #[test]
    fn k_families() {
        let f: KFamily = "factorials:5".parse().unwrap();
        let got: Vec<u64> = f.members().iter().map(|m| m.try_into().unwrap()).collect();
        assert_eq!(got, [1, 2, 6, 24, 120]);
        let l: KFamily = "lcm:7".parse().unwrap();
        let got: Vec<u64> = l.members().iter().map(|m| m.try_into().unwrap()).collect();
        assert_eq!(got, [1, 2, 6, 12, 60, 420]);
        let e: KFamily = "explicit:14,7,7".parse().unwrap();
        assert_eq!(e.members(), vec![BigInt::from(7), BigInt::from(14)]);
        assert_eq!(e.covered_bound(), 2);
        assert_eq!(f.to_string(), "factorials:5");
        assert!("factorials:0".parse::<KFamily>().is_err());
        assert!("explicit:0".parse::<KFamily>().is_err());
        assert!("primes:3".parse::<KFamily>().is_err());
    }

    #[test]
    fn families_contain_multiples() {
        for family in [KFamily::Factorials { bound: 12 }, KFamily::LcmPrefix { bound: 12 }] {
            let members = family.members();
            for n in 1..=12u32 {
                assert!(members.iter().any(|m| (m % BigInt::from(n)).is_zero()));
            }
        }
    }
}
