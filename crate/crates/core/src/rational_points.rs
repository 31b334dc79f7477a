//! Rational points in orbit closures of `{(s^l_1, ..., s^l_d) : s in Sigma}`.
//!
//! The closure of an orbit always contains a rational point whose
//! denominators are coprime to the semigroup. Finite samples can only
//! provide evidence, so a candidate here means "recurs at least
//! `evidence_threshold` times within the tolerance schedule". Rational bases
//! have finite orbits on a fixed grid and are handled exactly.
//!
//! [`slice_and_recurse`] follows the induction on dimension: fix a rational
//! value `y = a/m` of the last coordinate, pass to the sub-semigroup
//! `Sigma_m` of elements congruent to 1 mod `m` (which fixes `y`), keep the
//! samples sitting over `y`, and recurse on the remaining coordinates.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semigroup::{self, SemigroupSpec};
use crate::torus::{rational_reconstruct, TorusCoord, TorusPoint};
use crate::wire;

#[derive(Debug, Clone)]
pub struct OrbitSpec {
    pub base: TorusPoint,
    pub exponents: Vec<u32>,
    pub spec: SemigroupSpec,
}

impl OrbitSpec {
    pub fn new(base: TorusPoint, exponents: Vec<u32>, spec: SemigroupSpec) -> Result<Self> {
        if exponents.len() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: exponents.len(),
            });
        }
        if exponents.contains(&0) {
            return Err(Error::invalid("orbit exponents must be positive"));
        }
        Ok(OrbitSpec {
            base,
            exponents,
            spec,
        })
    }

    /// Exponents all equal to 1.
    pub fn diagonal(base: TorusPoint, spec: SemigroupSpec) -> Self {
        let exponents = vec![1; base.dim()];
        OrbitSpec {
            base,
            exponents,
            spec,
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }
}

/// `(s^l_1 x_1, ..., s^l_d x_d)`.
pub fn act(s: &BigInt, exponents: &[u32], x: &TorusPoint) -> Result<TorusPoint> {
    let coords = exponents
        .iter()
        .zip(x.coords())
        .map(|(&l, c)| c.scalar_mul(&num_traits::pow(s.clone(), l as usize)))
        .collect::<Result<Vec<_>>>()?;
    TorusPoint::new(coords)
}

#[derive(Debug, Clone)]
pub struct OrbitSample {
    pub s: u128,
    pub point: TorusPoint,
}

/// Orbit points for every `s <= horizon` in increasing `s`.
pub fn orbit_sample(orbit: &OrbitSpec, horizon: u128) -> Result<Vec<OrbitSample>> {
    orbit_sample_capped(orbit, horizon, usize::MAX)
}

pub fn orbit_sample_capped(orbit: &OrbitSpec, horizon: u128, max_samples: usize) -> Result<Vec<OrbitSample>> {
    let elements: Vec<u128> = semigroup::SemigroupStream::bounded(&orbit.spec, horizon)
        .take(max_samples)
        .collect();
    elements
        .par_iter()
        .map(|&s| {
            Ok(OrbitSample {
                s,
                point: act(&BigInt::from(s), &orbit.exponents, &orbit.base)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalCandidate {
    #[serde(with = "wire::ratio_vec")]
    pub point: Vec<BigRational>,
    pub evidence_count: usize,
    #[serde(with = "wire::ratio")]
    pub tolerance_reached: BigRational,
    pub coprime_to_sigma: bool,
}

impl RationalCandidate {
    pub fn torus_point(&self) -> TorusPoint {
        TorusPoint::from_ratios(&self.point).expect("candidate has at least one coordinate")
    }

    pub fn denominator_lcm(&self) -> BigInt {
        denominator_lcm(&self.point)
    }
}

pub fn denominator_lcm(point: &[BigRational]) -> BigInt {
    point
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Clustering parameters.
#[derive(Debug, Clone)]
pub struct LimitConfig {
    pub max_den: BigInt,
    pub evidence_threshold: usize,
    /// Coarse to fine.
    pub tolerances: Vec<BigRational>,
    pub require_coprime: bool,
    pub max_samples: usize,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig {
            max_den: BigInt::from(10_000),
            evidence_threshold: 5,
            tolerances: default_tolerances(),
            require_coprime: true,
            max_samples: 100_000,
        }
    }
}

/// `10^-2, 10^-3, 10^-4`.
pub fn default_tolerances() -> Vec<BigRational> {
    (2..=4)
        .map(|e| BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), e)))
        .collect()
}

/// Rank candidates: evidence descending, denominator lcm ascending, then
/// lexicographic point order.
fn rank(candidates: &mut [RationalCandidate]) {
    candidates.sort_by(|a, b| {
        b.evidence_count
            .cmp(&a.evidence_count)
            .then_with(|| a.denominator_lcm().cmp(&b.denominator_lcm()))
            .then_with(|| a.point.cmp(&b.point))
    });
}

fn coprime_point(point: &[BigRational], spec: &SemigroupSpec) -> bool {
    point
        .iter()
        .all(|q| semigroup::coprime_to_generators(q.denom(), spec))
}

/// Group sample points into rational candidates.
pub fn cluster(points: &[TorusPoint], config: &LimitConfig, coprime_spec: &SemigroupSpec) -> Vec<RationalCandidate> {
    let mut found: Vec<RationalCandidate> = Vec::new();
    if points.iter().all(TorusPoint::is_rational) {
        let mut counts: HashMap<Vec<BigRational>, usize> = HashMap::new();
        for p in points {
            *counts.entry(p.rationals().expect("rational point")).or_default() += 1;
        }
        for (point, count) in counts {
            if count >= config.evidence_threshold && point.iter().all(|q| q.denom() <= &config.max_den) {
                found.push(RationalCandidate {
                    coprime_to_sigma: coprime_point(&point, coprime_spec),
                    point,
                    evidence_count: count,
                    tolerance_reached: BigRational::zero(),
                });
            }
        }
    } else {
        let mut best: HashMap<Vec<BigRational>, (usize, BigRational)> = HashMap::new();
        for tol in &config.tolerances {
            let keys: Vec<Option<Vec<BigRational>>> = points
                .par_iter()
                .map(|p| {
                    p.coords()
                        .iter()
                        .map(|c| rational_reconstruct(c, &config.max_den, tol))
                        .collect::<Option<Vec<_>>>()
                })
                .collect();
            let mut counts: HashMap<Vec<BigRational>, usize> = HashMap::new();
            for key in keys.into_iter().flatten() {
                *counts.entry(key).or_default() += 1;
            }
            for (key, count) in counts {
                if count >= config.evidence_threshold {
                    // later (finer) tolerances overwrite coarser ones
                    best.insert(key, (count, tol.clone()));
                }
            }
        }
        for (point, (count, tol)) in best {
            found.push(RationalCandidate {
                coprime_to_sigma: coprime_point(&point, coprime_spec),
                point,
                evidence_count: count,
                tolerance_reached: tol,
            });
        }
    }
    if config.require_coprime {
        found.retain(|c| c.coprime_to_sigma);
    }
    rank(&mut found);
    found
}

/// Ranked rational candidates for the orbit closure.
pub fn find_rational_limit(orbit: &OrbitSpec, horizon: u128, config: &LimitConfig) -> Result<Vec<RationalCandidate>> {
    let samples = orbit_sample_capped(orbit, horizon, config.max_samples)?;
    let points: Vec<TorusPoint> = samples.into_iter().map(|s| s.point).collect();
    let found = cluster(&points, config, &orbit.spec);
    if found.is_empty() {
        return Err(Error::NoCandidate { level: 0 });
    }
    Ok(found)
}

/// Sampling and clustering budget for one level of [`slice_and_recurse`].
#[derive(Debug, Clone)]
pub struct LevelBudget {
    pub horizon: u128,
    pub limit: LimitConfig,
    /// Upper bound on distinct seeds carried to the next level.
    pub max_seeds: usize,
}

impl LevelBudget {
    pub fn new(horizon: u128) -> Self {
        LevelBudget {
            horizon,
            limit: LimitConfig::default(),
            max_seeds: 32,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    /// Index of the coordinate fixed at this level.
    pub coordinate: usize,
    #[serde(with = "wire::ratio")]
    pub value: BigRational,
    pub modulus: u64,
    pub generators: Vec<u64>,
    pub samples: usize,
    pub retained: usize,
    pub evidence_count: usize,
    #[serde(with = "wire::ratio")]
    pub tolerance_reached: BigRational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceOutcome {
    #[serde(with = "wire::ratio_vec")]
    pub point: Vec<BigRational>,
    pub levels: Vec<LevelReport>,
    /// For rational bases: `t` in `Sigma` with `t . base = point` exactly.
    #[serde(with = "opt_decimal")]
    pub orbit_multiplier: Option<BigInt>,
}

mod opt_decimal {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(n) => s.serialize_some(&n.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[derive(Clone)]
struct Seed {
    point: TorusPoint,
    multiplier: BigInt,
}

/// Rational point in the orbit closure, built one coordinate at a time from
/// the last. `levels[i]` budgets level `i`; the last budget is reused when
/// there are more coordinates than budgets.
pub fn slice_and_recurse(orbit: &OrbitSpec, levels: &[LevelBudget]) -> Result<SliceOutcome> {
    if levels.is_empty() {
        return Err(Error::invalid("at least one level budget is required"));
    }
    let seeds = vec![Seed {
        point: orbit.base.clone(),
        multiplier: BigInt::one(),
    }];
    let mut reports = Vec::new();
    let mut point = vec![BigRational::zero(); orbit.dim()];
    let multiplier = descend(
        seeds,
        false,
        &orbit.exponents,
        &orbit.spec,
        &orbit.spec,
        0,
        levels,
        &mut point,
        &mut reports,
    )?;
    Ok(SliceOutcome {
        point,
        levels: reports,
        orbit_multiplier: orbit.base.is_rational().then_some(multiplier),
    })
}

#[allow(clippy::too_many_arguments)]
fn descend(
    seeds: Vec<Seed>,
    include_seeds: bool,
    exponents: &[u32],
    spec: &SemigroupSpec,
    coprime_spec: &SemigroupSpec,
    level: usize,
    levels: &[LevelBudget],
    out: &mut Vec<BigRational>,
    reports: &mut Vec<LevelReport>,
) -> Result<BigInt> {
    let budget = &levels[level.min(levels.len() - 1)];
    let d = exponents.len();
    let last = d - 1;

    let elements: Vec<u128> = semigroup::SemigroupStream::bounded(spec, budget.horizon)
        .take(budget.limit.max_samples)
        .collect();
    let mut samples: Vec<Seed> = Vec::new();
    if include_seeds {
        samples.extend(seeds.iter().cloned());
    }
    let acted: Vec<Seed> = elements
        .par_iter()
        .flat_map_iter(|&s| {
            let s = BigInt::from(s);
            seeds.iter().map(move |seed| {
                Ok(Seed {
                    point: act(&s, exponents, &seed.point)?,
                    multiplier: &seed.multiplier * &s,
                })
            })
        })
        .collect::<Result<Vec<_>>>()?;
    samples.extend(acted);

    let projected: Vec<TorusPoint> = samples
        .iter()
        .map(|s| TorusPoint::new(vec![s.point.coord(last).clone()]).expect("one coordinate"))
        .collect();
    let candidates = cluster(&projected, &budget.limit, coprime_spec);
    let top = candidates.first().ok_or(Error::NoCandidate { level })?;
    let y = top.point[0].clone();
    let m_big = y.denom().clone();
    let modulus = u64::try_from(&m_big)
        .map_err(|_| Error::Overflow(format!("denominator {m_big} exceeds 64 bits")))?;
    let sub = semigroup::congruence_subsemigroup(spec, modulus)?;

    let neg_y = TorusCoord::from_ratio(-y.clone());
    let tol = top.tolerance_reached.clone();
    let retained: Vec<&Seed> = samples
        .iter()
        .filter(|s| {
            let coord = s.point.coord(last);
            match coord.as_rational() {
                Some(q) => q == &y,
                None => coord.add(&neg_y).dist_to_zero().hi <= tol,
            }
        })
        .collect();

    reports.push(LevelReport {
        level,
        coordinate: last,
        value: y.clone(),
        modulus,
        generators: sub.generators().to_vec(),
        samples: samples.len(),
        retained: retained.len(),
        evidence_count: top.evidence_count,
        tolerance_reached: tol,
    });
    out[last] = y;

    let first = retained.first().ok_or(Error::NoCandidate { level })?;
    if d == 1 {
        return Ok(first.multiplier.clone());
    }

    let mut next_seeds: Vec<Seed> = Vec::new();
    for s in &retained {
        let prefix = s.point.truncate(last)?;
        if !next_seeds.iter().any(|t| t.point == prefix) {
            next_seeds.push(Seed {
                point: prefix,
                multiplier: s.multiplier.clone(),
            });
            if next_seeds.len() >= budget.max_seeds {
                break;
            }
        }
    }
    descend(
        next_seeds,
        true,
        &exponents[..last],
        &sub,
        coprime_spec,
        level + 1,
        levels,
        out,
        reports,
    )
}

/// Exact check that `t . base = point` for a rational base.
pub fn verify_orbit_point(orbit: &OrbitSpec, multiplier: &BigInt, point: &[BigRational]) -> Result<bool> {
    let image = act(multiplier, &orbit.exponents, &orbit.base)?;
    Ok(image.rationals().as_deref() == Some(point))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn gens23() -> SemigroupSpec {
        SemigroupSpec::all_products(&[2, 3]).unwrap()
    }

    fn point(s: &str) -> TorusPoint {
        s.parse().unwrap()
    }

    #[test]
    fn orbit_sample_examples() {
        let orbit = OrbitSpec::new(point("1/5"), vec![1], gens23()).unwrap();
        let got: Vec<String> = orbit_sample(&orbit, 4)
            .unwrap()
            .iter()
            .map(|s| s.point.to_string())
            .collect();
        assert_eq!(got, ["2/5", "3/5", "4/5"]);

        let orbit = OrbitSpec::new(TorusPoint::zero(3), vec![1, 2, 3], gens23()).unwrap();
        assert!(orbit_sample(&orbit, 100)
            .unwrap()
            .iter()
            .all(|s| s.point == TorusPoint::zero(3)));

        let orbit = OrbitSpec::new(point("1/7,1/7"), vec![1, 2], gens23()).unwrap();
        let first = &orbit_sample(&orbit, 2).unwrap()[0];
        assert_eq!(first.point, point("2/7,4/7"));
    }

    #[test]
    fn orbit_spec_validation() {
        assert!(OrbitSpec::new(point("1/5"), vec![1, 2], gens23()).is_err());
        assert!(OrbitSpec::new(point("1/5"), vec![0], gens23()).is_err());
    }

    #[test]
    fn fifths_all_recur() {
        let orbit = OrbitSpec::new(point("1/5"), vec![1], gens23()).unwrap();
        let found = find_rational_limit(&orbit, 10_000, &LimitConfig::default()).unwrap();
        let mut pts: Vec<BigRational> = found.iter().map(|c| c.point[0].clone()).collect();
        pts.sort();
        assert_eq!(pts, vec![q(1, 5), q(2, 5), q(3, 5), q(4, 5)]);
        assert!(found.iter().all(|c| c.coprime_to_sigma));
    }

    #[test]
    fn twelfth_collapses_to_zero() {
        let orbit = OrbitSpec::new(point("1/12"), vec![1], gens23()).unwrap();
        let found = find_rational_limit(&orbit, 10_000, &LimitConfig::default()).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].point, vec![q(0, 1)]);
    }

    #[test]
    fn coprime_filter_can_be_disabled() {
        let orbit = OrbitSpec::new(point("1/12"), vec![1], gens23()).unwrap();
        let config = LimitConfig {
            require_coprime: false,
            ..LimitConfig::default()
        };
        let found = find_rational_limit(&orbit, 10_000, &config).unwrap();
        assert_eq!(found[0].point, vec![q(0, 1)]);
        assert!(found.iter().any(|c| !c.coprime_to_sigma));
    }

    #[test]
    fn slice_fifths() {
        let orbit = OrbitSpec::new(point("1/5,1/5"), vec![1, 1], gens23()).unwrap();
        let out = slice_and_recurse(&orbit, &[LevelBudget::new(1_000_000)]).unwrap();
        assert!(out.point.iter().all(|c| c.denom() == &BigInt::from(5)));
        assert_eq!(out.levels[0].generators, vec![16, 81]);
        let t = out.orbit_multiplier.clone().unwrap();
        assert!(verify_orbit_point(&orbit, &t, &out.point).unwrap());
    }

    #[test]
    fn slice_mixed_exponents() {
        let orbit = OrbitSpec::new(point("1/7,1/5"), vec![1, 2], gens23()).unwrap();
        let out = slice_and_recurse(&orbit, &[LevelBudget::new(100_000)]).unwrap();
        let lcm = denominator_lcm(&out.point);
        assert!((BigInt::from(35) % &lcm).is_zero(), "lcm {lcm}");
        assert!(semigroup::coprime_to_generators(&lcm, &gens23()));
        let t = out.orbit_multiplier.clone().unwrap();
        assert!(verify_orbit_point(&orbit, &t, &out.point).unwrap());
    }

    #[test]
    fn one_dimensional_slice_is_limit_search() {
        let orbit = OrbitSpec::new(point("1/5"), vec![1], gens23()).unwrap();
        let direct = find_rational_limit(&orbit, 1_000_000, &LimitConfig::default()).unwrap();
        let sliced = slice_and_recurse(&orbit, &[LevelBudget::new(1_000_000)]).unwrap();
        assert_eq!(sliced.point, direct[0].point);
    }
}
