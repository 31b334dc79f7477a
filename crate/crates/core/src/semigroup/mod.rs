//! Finitely generated multiplicative sub-semigroups of the positive integers.

mod factor;
mod stream;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

pub use factor::{factorize, is_prime, pow_mod, totient};
pub use stream::SemigroupStream;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentMode {
    /// Every nonempty product of generators.
    #[default]
    AllProducts,
    /// Products in which every generator appears at least once.
    PositiveExponents,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SemigroupSpec {
    generators: Vec<u64>,
    mode: ExponentMode,
}

impl SemigroupSpec {
    /// Generators are sorted and deduplicated; each must be at least 2.
    pub fn new(mut generators: Vec<u64>, mode: ExponentMode) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::invalid("semigroup needs at least one generator"));
        }
        if let Some(g) = generators.iter().find(|&&g| g < 2) {
            return Err(Error::invalid(format!("generator {g} is below 2")));
        }
        generators.sort_unstable();
        generators.dedup();
        Ok(SemigroupSpec { generators, mode })
    }

    pub fn all_products(generators: &[u64]) -> Result<Self> {
        SemigroupSpec::new(generators.to_vec(), ExponentMode::AllProducts)
    }

    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    pub fn mode(&self) -> ExponentMode {
        self.mode
    }

    pub fn min_generator(&self) -> u64 {
        self.generators[0]
    }

    pub fn stream(&self) -> SemigroupStream {
        SemigroupStream::new(self)
    }
}

impl FromStr for SemigroupSpec {
    type Err = Error;

    /// `gens=2,3;mode=all` or `gens=2,3;mode=pos`; a bare `2,3` means `mode=all`.
    fn from_str(s: &str) -> Result<Self> {
        let mut generators = None;
        let mut mode = ExponentMode::AllProducts;
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').unwrap_or(("gens", part));
            match key.trim() {
                "gens" => generators = Some(parse_generators(value)?),
                "mode" => {
                    mode = match value.trim() {
                        "all" => ExponentMode::AllProducts,
                        "pos" => ExponentMode::PositiveExponents,
                        other => return Err(Error::parse(s, format!("unknown mode {other:?}"))),
                    }
                }
                other => return Err(Error::parse(s, format!("unknown key {other:?}"))),
            }
        }
        let generators = generators.ok_or_else(|| Error::parse(s, "missing gens="))?;
        SemigroupSpec::new(generators, mode)
    }
}

pub fn parse_generators(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|g| {
            g.trim()
                .parse::<u64>()
                .map_err(|_| Error::parse(s, format!("bad generator {g:?}")))
        })
        .collect()
}

impl fmt::Display for SemigroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(u64::to_string).collect();
        let mode = match self.mode {
            ExponentMode::AllProducts => "all",
            ExponentMode::PositiveExponents => "pos",
        };
        write!(f, "gens={};mode={mode}", gens.join(","))
    }
}

/// True iff no `a, b >= 1` give `p^a = q^b`.
///
/// Decided exactly from the factorizations: `p` and `q` are dependent iff
/// they share the same prime support with parallel exponent vectors.
/// Inputs below 2 are never independent.
pub fn is_multiplicatively_independent(p: u64, q: u64) -> bool {
    if p < 2 || q < 2 {
        return false;
    }
    let fp = factorize(p);
    let fq = factorize(q);
    if !fp.keys().eq(fq.keys()) {
        return true;
    }
    let mut pairs = fp.values().zip(fq.values());
    let (&a0, &b0) = pairs.next().expect("p >= 2 has a prime factor");
    !pairs.all(|(&a, &b)| a as u64 * b0 as u64 == b as u64 * a0 as u64)
}

/// Some pair of generators is multiplicatively independent.
pub fn is_nonlacunary(spec: &SemigroupSpec) -> bool {
    let g = spec.generators();
    (0..g.len()).any(|i| (i + 1..g.len()).any(|j| is_multiplicatively_independent(g[i], g[j])))
}

/// All elements `<= horizon`, increasing.
pub fn enumerate(spec: &SemigroupSpec, horizon: u128) -> Vec<u128> {
    SemigroupStream::bounded(spec, horizon).collect()
}

/// The first `count` elements (fewer only if `u128` is exhausted).
pub fn first_n(spec: &SemigroupSpec, count: usize) -> Vec<u128> {
    spec.stream().take(count).collect()
}

/// `max (s_{n+1} / s_n - 1)` over consecutive elements with
/// `from < s_{n+1} <= horizon`, exactly.
pub fn ratio_gap(spec: &SemigroupSpec, from: u128, horizon: u128) -> Result<BigRational> {
    if horizon <= from {
        return Err(Error::invalid(format!("horizon {horizon} must exceed {from}")));
    }
    let elements = enumerate(spec, horizon);
    let mut best: Option<(u128, u128)> = None;
    for pair in elements.windows(2) {
        let (prev, next) = (pair[0], pair[1]);
        if next <= from {
            continue;
        }
        // compare next/prev against best_next/best_prev without dividing
        let better = match best {
            None => true,
            Some((bp, bn)) => BigInt::from(next) * bp > BigInt::from(bn) * prev,
        };
        if better {
            best = Some((prev, next));
        }
    }
    let (prev, next) = best.ok_or(Error::EmptyWindow {
        lo: from,
        hi: horizon,
    })?;
    Ok(BigRational::new(BigInt::from(next - prev), BigInt::from(prev)))
}

/// Least `t >= 1` with `g^t = 1 (mod m)`.
pub fn multiplicative_order(g: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    if m == 1 {
        return Ok(1);
    }
    if g.gcd(&m) != 1 {
        return Err(Error::NotCoprime {
            generator: g,
            modulus: m,
        });
    }
    let phi = totient(m);
    let mut order = phi;
    for (p, _) in factorize(phi) {
        while order % p == 0 && pow_mod(g, order / p, m) == 1 {
            order /= p;
        }
    }
    Ok(order)
}

/// Generators `g^ord_m(g)`: a sub-semigroup of `Sigma ∩ (mZ + 1)` that is
/// non-lacunary whenever `spec` is.
pub fn congruence_subsemigroup(spec: &SemigroupSpec, m: u64) -> Result<SemigroupSpec> {
    let mut generators = Vec::with_capacity(spec.generators().len());
    for &g in spec.generators() {
        let order = multiplicative_order(g, m)?;
        let power = u32::try_from(order)
            .ok()
            .and_then(|e| g.checked_pow(e))
            .ok_or_else(|| Error::Overflow(format!("{g}^{order} exceeds 64 bits")))?;
        generators.push(power);
    }
    SemigroupSpec::new(generators, spec.mode())
}

/// Whether `gcd(den, g) = 1` for every generator (so for every element).
pub fn coprime_to_generators(den: &BigInt, spec: &SemigroupSpec) -> bool {
    spec.generators()
        .iter()
        .all(|&g| den.gcd(&BigInt::from(g)) == BigInt::from(1u8))
}
