use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semigroup::{pow_mod, ExponentMode, SemigroupSpec, SemigroupStream};
use crate::torus::{IntervalValue, TorusPoint};

/// `min_{s in Sigma, s <= n} ||s x||_T` and the smallest minimizing `s`.
///
/// Minimizers are ranked by the upper bound of their enclosure; the returned
/// interval encloses the true minimum.
pub fn escape_infimum(x: &TorusPoint, spec: &SemigroupSpec, n: u128) -> Result<(IntervalValue, u128)> {
    let mut lo_min: Option<IntervalValue> = None;
    let mut best: Option<(IntervalValue, u128)> = None;
    for s in SemigroupStream::bounded(spec, n) {
        let d = crate::torus::torus_dist(&x.scale(&s.into())?);
        lo_min = Some(match lo_min {
            Some(m) => m.min(&d),
            None => d.clone(),
        });
        if best.as_ref().map_or(true, |(b, _)| d.hi < b.hi) {
            best = Some((d, s));
        }
    }
    let (_, argmin) = best.ok_or_else(|| Error::invalid(format!("no semigroup element <= {n}")))?;
    Ok((lo_min.expect("nonempty"), argmin))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueReport {
    pub modulus: u64,
    /// From the residue orbits of the generators, closed under products.
    pub closure: BTreeSet<u64>,
    /// From every exponent vector with entries `<= exponent_horizon`.
    pub brute_force: BTreeSet<u64>,
    pub exponent_horizon: u32,
    pub agree: bool,
}

fn product_closure(seeds: &[u64], m: u64) -> BTreeSet<u64> {
    let mut set: BTreeSet<u64> = seeds.iter().map(|g| g % m).collect();
    let mut frontier: Vec<u64> = set.iter().copied().collect();
    while let Some(x) = frontier.pop() {
        for &g in seeds {
            let y = ((x as u128 * g as u128) % m as u128) as u64;
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set
}

/// `{ s mod m : s in Sigma }`, with a brute-force cross-check.
pub fn check_residues(spec: &SemigroupSpec, m: u64, exponent_horizon: u32) -> Result<ResidueReport> {
    if m < 2 {
        return Err(Error::invalid("modulus must be at least 2"));
    }
    let gens = spec.generators();
    let closure = match spec.mode() {
        ExponentMode::AllProducts => product_closure(gens, m),
        ExponentMode::PositiveExponents => {
            let base = gens
                .iter()
                .fold(1u64, |acc, &g| ((acc as u128 * g as u128) % m as u128) as u64);
            let mut with_one = product_closure(gens, m);
            with_one.insert(1 % m);
            with_one
                .into_iter()
                .map(|r| ((r as u128 * base as u128) % m as u128) as u64)
                .collect()
        }
    };

    let min_exp = match spec.mode() {
        ExponentMode::AllProducts => 0,
        ExponentMode::PositiveExponents => 1,
    };
    let mut brute_force = BTreeSet::new();
    let mut exps = vec![min_exp; gens.len()];
    loop {
        if exps.iter().any(|&e| e > 0) {
            let r = gens.iter().zip(&exps).fold(1u64, |acc, (&g, &e)| {
                ((acc as u128 * pow_mod(g, e as u64, m) as u128) % m as u128) as u64
            });
            brute_force.insert(r);
        }
        let Some(i) = exps.iter().position(|&e| e < exponent_horizon) else {
            break;
        };
        exps[i] += 1;
        exps[..i].iter_mut().for_each(|e| *e = min_exp);
    }
    let agree = closure == brute_force;
    Ok(ResidueReport {
        modulus: m,
        closure,
        brute_force,
        exponent_horizon,
        agree,
    })
}
