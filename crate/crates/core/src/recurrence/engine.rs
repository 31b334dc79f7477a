use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{IntPolynomial, KFamily, SearchBudget, Witness};
use crate::error::{Error, Result};
use crate::rational_points::{self, LevelBudget, LimitConfig, OrbitSpec};
use crate::semigroup::{self, SemigroupSpec, SemigroupStream};
use crate::torus::{certify_dist, torus_dist_at, Certainty, DistCertificate, IntervalValue, TorusPoint, DEFAULT_PRECISION};
use crate::wire;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Brute,
    Structured,
    /// Structured search that handed over to the brute-force scan.
    BruteFallback,
}

#[derive(Debug, Clone)]
pub struct StructuredConfig {
    pub limit: LimitConfig,
    pub max_seeds: usize,
    pub fallback_to_brute: bool,
}

impl Default for StructuredConfig {
    fn default() -> Self {
        StructuredConfig {
            limit: LimitConfig::default(),
            max_seeds: 32,
            fallback_to_brute: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchProblem {
    pub alpha: TorusPoint,
    pub poly: IntPolynomial,
    pub k_family: KFamily,
    pub spec: SemigroupSpec,
    pub eps: BigRational,
    pub budget: SearchBudget,
    pub structured: StructuredConfig,
}

impl SearchProblem {
    pub fn new(
        alpha: TorusPoint,
        poly: IntPolynomial,
        k_family: KFamily,
        spec: SemigroupSpec,
        eps: BigRational,
        budget: SearchBudget,
    ) -> Result<Self> {
        if eps.is_negative() {
            return Err(Error::invalid("eps must be non-negative"));
        }
        if !semigroup::is_nonlacunary(&spec) {
            return Err(Error::invalid(format!("{spec} is lacunary")));
        }
        budget.validate()?;
        Ok(SearchProblem {
            alpha,
            poly,
            k_family,
            spec,
            eps,
            budget,
            structured: StructuredConfig::default(),
        })
    }

    fn ks(&self) -> Vec<BigInt> {
        let mut ks = self.k_family.members();
        ks.truncate(self.budget.max_k_index);
        ks
    }

    /// `(c_j x_i)` ordered by `j` then `i`, with exponents `j`.
    fn lifted_orbit(&self) -> Result<OrbitSpec> {
        let mut coords = Vec::new();
        let mut exponents = Vec::new();
        for (j, c) in self.poly.coeffs().iter().enumerate() {
            for x in self.alpha.coords() {
                coords.push(x.scalar_mul(c)?);
                exponents.push(j as u32 + 1);
            }
        }
        OrbitSpec::new(TorusPoint::new(coords)?, exponents, self.spec.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Brute,
    Slice,
    Scan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestSoFar {
    #[serde(with = "wire::decimal")]
    pub k: BigInt,
    #[serde(with = "wire::decimal")]
    pub s: BigInt,
    pub distance: IntervalValue,
}

/// Everything needed to continue a search exactly where it stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchState {
    pub strategy: Strategy,
    pub stage: Stage,
    #[serde(with = "opt_ratio_vec", default)]
    pub rational_point: Option<Vec<BigRational>>,
    pub modulus: Option<u64>,
    /// Index into the members of `K` clearing the rational point.
    pub scan_k: usize,
    pub next_shard: u64,
    pub examined: u64,
    pub best: Option<BestSoFar>,
    pub scan_best: Option<BestSoFar>,
    pub note: Option<String>,
}

mod opt_ratio_vec {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigRational>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(crate::wire::format_ratio).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigRational>>, D::Error> {
        Option::<Vec<String>>::deserialize(d)?
            .map(|v| {
                v.iter()
                    .map(|s| crate::wire::parse_ratio(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .transpose()
    }
}

impl SearchState {
    pub fn new(strategy: Strategy) -> Self {
        SearchState {
            strategy,
            stage: match strategy {
                Strategy::Structured => Stage::Slice,
                _ => Stage::Brute,
            },
            rational_point: None,
            modulus: None,
            scan_k: 0,
            next_shard: 0,
            examined: 0,
            best: None,
            scan_best: None,
            note: None,
        }
    }

    fn witness_strategy(&self) -> Strategy {
        match (self.strategy, self.stage) {
            (Strategy::Brute, _) => Strategy::Brute,
            (_, Stage::Brute) => Strategy::BruteFallback,
            _ => Strategy::Structured,
        }
    }
}

/// Interruption points and checkpoint hook for [`run_search`].
#[derive(Default)]
pub struct SearchControl<'a> {
    /// Stop after this many shards in the current run.
    pub max_shards: Option<u64>,
    pub deadline: Option<Instant>,
    pub on_checkpoint: Option<&'a mut dyn FnMut(&SearchState) -> Result<()>>,
}

impl SearchControl<'_> {
    fn from_budget(budget: &SearchBudget) -> Self {
        SearchControl {
            deadline: budget.wall_clock.map(|d| Instant::now() + d),
            ..SearchControl::default()
        }
    }

    fn should_stop(&self, shards_run: u64) -> bool {
        self.max_shards.is_some_and(|m| shards_run >= m) || self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn checkpoint(&mut self, state: &SearchState) -> Result<()> {
        match self.on_checkpoint.as_mut() {
            Some(f) => f(state),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(Witness),
    /// The whole budgeted search space was examined without a witness.
    Exhausted(SearchState),
    /// Stopped early; resume from the state.
    Interrupted(SearchState),
}

/// Pairs `(k, s)` with `s <= max_s`, increasing in `k s`, ties by smaller `k`.
struct PairStream {
    ks: Vec<BigInt>,
    streams: Vec<SemigroupStream>,
    heap: BinaryHeap<Reverse<(BigInt, usize, u128)>>,
}

impl PairStream {
    fn new(ks: Vec<BigInt>, spec: &SemigroupSpec, max_s: u128) -> Self {
        let mut streams: Vec<SemigroupStream> =
            ks.iter().map(|_| SemigroupStream::bounded(spec, max_s)).collect();
        let mut heap = BinaryHeap::new();
        for (i, stream) in streams.iter_mut().enumerate() {
            if let Some(s) = stream.next() {
                heap.push(Reverse((&ks[i] * s, i, s)));
            }
        }
        PairStream { ks, streams, heap }
    }
}

impl Iterator for PairStream {
    type Item = (BigInt, u128);

    fn next(&mut self) -> Option<(BigInt, u128)> {
        let Reverse((_, i, s)) = self.heap.pop()?;
        if let Some(next) = self.streams[i].next() {
            self.heap.push(Reverse((&self.ks[i] * next, i, next)));
        }
        Some((self.ks[i].clone(), s))
    }
}

struct Evaluation {
    k: BigInt,
    s: BigInt,
    r: BigInt,
    cert: DistCertificate,
}

fn evaluate(problem: &SearchProblem, pairs: &[(BigInt, u128)]) -> Result<Vec<Option<Evaluation>>> {
    pairs
        .par_iter()
        .map(|(k, s)| {
            let s = BigInt::from(*s);
            let r = problem.poly.eval(&(k * &s));
            if r.is_zero() {
                return Ok(None);
            }
            let point = problem.alpha.scale(&r)?;
            let cert = certify_dist(&point, &problem.eps, DEFAULT_PRECISION, problem.budget.precision_cap);
            Ok(Some(Evaluation {
                k: k.clone(),
                s,
                r,
                cert,
            }))
        })
        .collect()
}

fn improve(best: &mut Option<BestSoFar>, evals: &[Option<Evaluation>]) {
    for e in evals.iter().flatten() {
        let distance = e.cert.max();
        if best.as_ref().map_or(true, |b| distance.hi < b.distance.hi) {
            *best = Some(BestSoFar {
                k: e.k.clone(),
                s: e.s.clone(),
                distance,
            });
        }
    }
}

fn witness(e: &Evaluation, state: &SearchState) -> Witness {
    Witness {
        k: e.k.clone(),
        s: e.s.clone(),
        r_value: e.r.clone(),
        distances: e.cert.per_coord.clone(),
        certainty: e.cert.certainty,
        bits: e.cert.bits,
        strategy: state.witness_strategy(),
        modulus: match state.witness_strategy() {
            Strategy::Structured => state.modulus,
            _ => None,
        },
        examined: state.examined,
    }
}

/// Run or resume a search. `state = None` starts fresh with `strategy`.
pub fn run_search(
    problem: &SearchProblem,
    strategy: Strategy,
    state: Option<SearchState>,
    control: &mut SearchControl<'_>,
) -> Result<SearchOutcome> {
    let mut state = match state {
        Some(s) if s.strategy != strategy => {
            return Err(Error::invalid(format!(
                "saved state belongs to a {:?} search",
                s.strategy
            )))
        }
        Some(s) => s,
        None => SearchState::new(strategy),
    };
    let mut shards_run = 0u64;
    loop {
        match state.stage {
            Stage::Slice => slice_stage(problem, &mut state)?,
            Stage::Scan => {
                if let Some(outcome) = scan_stage(problem, &mut state, control, &mut shards_run)? {
                    return Ok(outcome);
                }
            }
            Stage::Brute => return brute_stage(problem, &mut state, control, &mut shards_run),
        }
    }
}

fn fall_back(problem: &SearchProblem, state: &mut SearchState, reason: String) -> Result<()> {
    if !problem.structured.fallback_to_brute {
        return Err(Error::NoRationalPointFound);
    }
    state.note = Some(reason);
    state.stage = Stage::Brute;
    state.next_shard = 0;
    Ok(())
}

fn clearing_ks(problem: &SearchProblem, point: &[BigRational]) -> Vec<BigInt> {
    let lcm = rational_points::denominator_lcm(point);
    problem
        .ks()
        .into_iter()
        .filter(|k| (k % &lcm).is_zero())
        .collect()
}

fn slice_stage(problem: &SearchProblem, state: &mut SearchState) -> Result<()> {
    let orbit = problem.lifted_orbit()?;
    let level = LevelBudget {
        horizon: problem.budget.max_s,
        limit: problem.structured.limit.clone(),
        max_seeds: problem.structured.max_seeds,
    };
    let point = match rational_points::slice_and_recurse(&orbit, &[level]) {
        Ok(out) => out.point,
        Err(e) => return fall_back(problem, state, format!("no rational point: {e}")),
    };
    let lcm = rational_points::denominator_lcm(&point);
    let Ok(modulus) = u64::try_from(&lcm) else {
        return fall_back(problem, state, format!("denominator {lcm} exceeds 64 bits"));
    };
    if let Err(e) = semigroup::congruence_subsemigroup(&problem.spec, modulus) {
        return fall_back(problem, state, format!("congruence sub-semigroup: {e}"));
    }
    if clearing_ks(problem, &point).is_empty() {
        return fall_back(problem, state, format!("no member of K is divisible by {lcm}"));
    }
    state.rational_point = Some(point);
    state.modulus = Some(modulus);
    state.stage = Stage::Scan;
    state.scan_k = 0;
    state.next_shard = 0;
    Ok(())
}

fn scan_stage(
    problem: &SearchProblem,
    state: &mut SearchState,
    control: &mut SearchControl<'_>,
    shards_run: &mut u64,
) -> Result<Option<SearchOutcome>> {
    let point = state.rational_point.clone().expect("scan stage has a rational point");
    let modulus = state.modulus.expect("scan stage has a modulus");
    let sub = semigroup::congruence_subsemigroup(&problem.spec, modulus)?;
    let ks = clearing_ks(problem, &point);
    let shard = problem.budget.shard_size;
    while state.scan_k < ks.len() {
        let k = &ks[state.scan_k];
        let mut stream = SemigroupStream::bounded(&sub, problem.budget.max_s)
            .skip(state.next_shard as usize * shard)
            .map(|s| (k.clone(), s));
        loop {
            let pairs: Vec<(BigInt, u128)> = stream.by_ref().take(shard).collect();
            if pairs.is_empty() {
                break;
            }
            if control.should_stop(*shards_run) {
                return Ok(Some(SearchOutcome::Interrupted(state.clone())));
            }
            let evals = evaluate(problem, &pairs)?;
            improve(&mut state.scan_best, &evals);
            improve(&mut state.best, &evals);
            state.examined += pairs.len() as u64;
            state.next_shard += 1;
            *shards_run += 1;
            control.checkpoint(state)?;
        }
        if let Some(best) = state.scan_best.take() {
            let r = problem.poly.eval(&(&best.k * &best.s));
            let cert = certify_dist(
                &problem.alpha.scale(&r)?,
                &problem.eps,
                DEFAULT_PRECISION,
                problem.budget.precision_cap,
            );
            if cert.certainty == Certainty::CertifiedLeq {
                let e = Evaluation {
                    k: best.k,
                    s: best.s,
                    r,
                    cert,
                };
                return Ok(Some(SearchOutcome::Found(witness(&e, state))));
            }
        }
        state.scan_k += 1;
        state.next_shard = 0;
    }
    if problem.structured.fallback_to_brute {
        state.note = Some(format!("no witness in the congruence sub-semigroup mod {modulus}"));
        state.stage = Stage::Brute;
        state.next_shard = 0;
        Ok(None)
    } else {
        Ok(Some(SearchOutcome::Exhausted(state.clone())))
    }
}

fn brute_stage(
    problem: &SearchProblem,
    state: &mut SearchState,
    control: &mut SearchControl<'_>,
    shards_run: &mut u64,
) -> Result<SearchOutcome> {
    let shard = problem.budget.shard_size;
    let mut pairs_iter =
        PairStream::new(problem.ks(), &problem.spec, problem.budget.max_s).skip(state.next_shard as usize * shard);
    loop {
        let pairs: Vec<(BigInt, u128)> = pairs_iter.by_ref().take(shard).collect();
        if pairs.is_empty() {
            return Ok(SearchOutcome::Exhausted(state.clone()));
        }
        if control.should_stop(*shards_run) {
            return Ok(SearchOutcome::Interrupted(state.clone()));
        }
        let evals = evaluate(problem, &pairs)?;
        let hit = evals
            .iter()
            .position(|e| e.as_ref().is_some_and(|e| e.cert.certainty == Certainty::CertifiedLeq));
        match hit {
            Some(i) => {
                improve(&mut state.best, &evals[..=i]);
                state.examined += i as u64 + 1;
                let e = evals[i].as_ref().expect("hit is evaluated");
                return Ok(SearchOutcome::Found(witness(e, state)));
            }
            None => {
                improve(&mut state.best, &evals);
                state.examined += pairs.len() as u64;
                state.next_shard += 1;
                *shards_run += 1;
                control.checkpoint(state)?;
            }
        }
    }
}

fn conclude(outcome: SearchOutcome) -> Result<Witness> {
    match outcome {
        SearchOutcome::Found(w) => Ok(w),
        SearchOutcome::Exhausted(state) | SearchOutcome::Interrupted(state) => {
            let best = state
                .best
                .map(|b| format!("; best k={} s={} distance<={}", b.k, b.s, b.distance.hi))
                .unwrap_or_default();
            Err(Error::BudgetExhausted(format!(
                "{} pairs examined{best}",
                state.examined
            )))
        }
    }
}

/// First certified witness in increasing `k s` order.
pub fn brute_search(problem: &SearchProblem) -> Result<Witness> {
    let mut control = SearchControl::from_budget(&problem.budget);
    conclude(run_search(problem, Strategy::Brute, None, &mut control)?)
}

/// Witness search guided by a rational point of the lifted orbit closure.
pub fn structured_search(problem: &SearchProblem) -> Result<Witness> {
    let mut control = SearchControl::from_budget(&problem.budget);
    conclude(run_search(problem, Strategy::Structured, None, &mut control)?)
}

/// Recompute the witness from scratch at doubled precision.
pub fn verify_witness(alpha: &TorusPoint, poly: &IntPolynomial, eps: &BigRational, w: &Witness) -> Result<bool> {
    let r = poly.eval(&(&w.k * &w.s));
    if r.is_zero() || r != w.r_value {
        return Ok(false);
    }
    let bits = 2 * w.bits.max(DEFAULT_PRECISION);
    Ok(&torus_dist_at(&alpha.scale(&r)?, bits).hi <= eps)
}
