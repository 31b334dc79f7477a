use std::cell::RefCell;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use bohr_core::density::{self, Population, RealPolynomial};
use bohr_core::rational_points::{self, LevelBudget, LimitConfig, OrbitSpec};
use bohr_core::recurrence::{
    self, run_search, verify_witness, IntPolynomial, KFamily, SearchBudget, SearchControl, SearchOutcome,
    SearchProblem, SearchState, Strategy,
};
use bohr_core::semigroup::{self, SemigroupSpec};
use bohr_core::torus::TorusPoint;
use bohr_core::wire::format_ratio;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;
use serde_json::{json, Value};

use crate::checkpoint::{self, Checkpoint};
use crate::{parse, CliError, Command, Global, StrategyArg};

const POINT: &str = "comma-separated coordinates: a/b | sqrt:n | phi | dec:c±r";
const GENS: &str = "generators like 2,3 or gens=2,3;mode=all|pos";
const INTEGER: &str = "non-negative integer, scientific notation allowed (1e7)";
const RATIONAL: &str = "rational a/b or decimal such as 0.01 or 1e-2";

fn flag<T, E: Display>(flag: &'static str, grammar: &'static str, r: Result<T, E>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Flag {
        flag,
        grammar,
        reason: e.to_string(),
    })
}

fn parsed<T>(name: &'static str, grammar: &'static str, s: &str) -> Result<T, CliError>
where
    T: FromStr,
    T::Err: Display,
{
    flag(name, grammar, s.parse::<T>())
}

fn count(name: &'static str, s: &str) -> Result<usize, CliError> {
    let n = flag(name, INTEGER, parse::horizon(s))?;
    flag(name, INTEGER, usize::try_from(n).map_err(|e| e.to_string()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Print or store the result document; `summary` goes to stdout when the
/// document goes to a file.
fn emit(global: &Global, doc: &Value, summary: &str) -> Result<(), CliError> {
    let mut body = serde_json::to_string_pretty(doc).expect("json value serializes");
    body.push('\n');
    match &global.out {
        Some(path) => {
            write_file(path, body.as_bytes())?;
            println!("{summary}");
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        }
    }
    Ok(())
}

fn document<C: Serialize>(command: &str, config: &C, result: Value) -> Value {
    json!({
        "command": command,
        "config": config,
        "config_hash": checkpoint::config_hash(command, config),
        "result": result,
    })
}

pub fn dispatch(global: &Global, command: &Command, cap: u32) -> Result<(), CliError> {
    match command {
        Command::Witness(a) => witness(global, a, cap),
        Command::Density(a) => density_cmd(global, a),
        Command::RationalPoints(a) => rational(global, a),
        Command::Gaps(a) => gaps(global, a),
        Command::Residues(a) => residues(global, a),
        Command::Escape(a) => escape(global, a),
        Command::Enumerate(a) => enumerate(global, a),
        Command::Directions(a) => directions(global, a),
        Command::Curve(a) => curve(global, a),
    }
}

#[derive(Serialize)]
struct WitnessConfig {
    alpha: String,
    poly: String,
    k: String,
    gens: String,
    eps: String,
    horizon: String,
    max_k_index: Option<usize>,
    strategy: Strategy,
    fallback: bool,
    shard_size: usize,
    max_den: String,
    evidence: usize,
    max_samples: usize,
    precision_cap: u32,
}

fn witness(global: &Global, a: &crate::WitnessArgs, cap: u32) -> Result<(), CliError> {
    let alpha: TorusPoint = parsed("--alpha", POINT, &a.alpha)?;
    let poly: IntPolynomial = parsed("--poly", "integer coefficients c_1,...,c_r such as 1,1", &a.poly)?;
    let k: KFamily = parsed("--K", "factorials:N | lcm:N | explicit:k1,k2,...", &a.k)?;
    let spec: SemigroupSpec = parsed("--gens", GENS, &a.gens)?;
    let eps = flag("--eps", RATIONAL, parse::exact(&a.eps))?;
    if eps.is_negative() || eps >= BigRational::new(BigInt::one(), BigInt::from(2)) {
        return Err(CliError::Flag {
            flag: "--eps",
            grammar: RATIONAL,
            reason: "must satisfy 0 <= eps < 1/2".into(),
        });
    }
    let horizon = flag("--horizon", INTEGER, parse::horizon(&a.horizon))?;
    let max_den = flag("--max-den", INTEGER, parse::big(&a.max_den))?;
    let max_samples = count("--max-samples", &a.max_samples)?;
    let strategy = match a.strategy {
        StrategyArg::Brute => Strategy::Brute,
        StrategyArg::Structured => Strategy::Structured,
    };

    let mut budget = SearchBudget::new(horizon);
    budget.max_k_index = a.max_k_index.unwrap_or(usize::MAX);
    budget.precision_cap = cap;
    budget.shard_size = a.shard_size;
    let mut problem = SearchProblem::new(alpha.clone(), poly.clone(), k.clone(), spec.clone(), eps.clone(), budget)?;
    problem.structured.fallback_to_brute = !a.no_fallback;
    problem.structured.limit = LimitConfig {
        max_den: max_den.clone(),
        evidence_threshold: a.evidence,
        max_samples,
        ..LimitConfig::default()
    };

    let config = WitnessConfig {
        alpha: alpha.to_string(),
        poly: poly.to_string(),
        k: k.to_string(),
        gens: spec.to_string(),
        eps: format_ratio(&eps),
        horizon: horizon.to_string(),
        max_k_index: a.max_k_index,
        strategy,
        fallback: !a.no_fallback,
        shard_size: a.shard_size,
        max_den: max_den.to_string(),
        evidence: a.evidence,
        max_samples,
        precision_cap: cap,
    };
    let hash = checkpoint::config_hash("witness", &config);
    let (state, elapsed_before) = match &global.checkpoint {
        Some(path) => match checkpoint::load::<SearchState>(path, "witness", &hash)? {
            Some(cp) => (Some(cp.state), cp.elapsed_ms),
            None => (None, 0),
        },
        None => (None, 0),
    };

    let start = Instant::now();
    let elapsed_ms = || elapsed_before + start.elapsed().as_millis() as u64;
    let deadline = global
        .wall_clock
        .map(|secs| start + Duration::from_secs_f64(secs.max(0.0)).saturating_sub(Duration::from_millis(elapsed_before)));
    let write_error: RefCell<Option<CliError>> = RefCell::new(None);
    let save = |state: &SearchState| -> Result<(), CliError> {
        match &global.checkpoint {
            Some(path) => checkpoint::store(
                path,
                &Checkpoint {
                    command: "witness".into(),
                    config_hash: hash.clone(),
                    elapsed_ms: elapsed_ms(),
                    state: state.clone(),
                },
            ),
            None => Ok(()),
        }
    };
    let mut on_checkpoint = |state: &SearchState| -> bohr_core::Result<()> {
        save(state).map_err(|e| {
            let msg = e.to_string();
            *write_error.borrow_mut() = Some(e);
            bohr_core::Error::InvalidInput(msg)
        })
    };
    let mut control = SearchControl {
        max_shards: global.max_shards,
        deadline,
        on_checkpoint: Some(&mut on_checkpoint),
    };
    let outcome = run_search(&problem, strategy, state, &mut control);
    if let Some(e) = write_error.into_inner() {
        return Err(e);
    }
    let k_bound = match a.max_k_index {
        Some(n) => KFamily::Explicit {
            values: k.members().into_iter().take(n).collect(),
        }
        .covered_bound(),
        None => k.covered_bound(),
    };
    match outcome? {
        SearchOutcome::Found(w) => {
            let verified = verify_witness(&alpha, &poly, &eps, &w)?;
            let doc = document(
                "witness",
                &config,
                json!({
                    "status": "found",
                    "k_covered_bound": k_bound,
                    "witness": w,
                    "verified_at_double_precision": verified,
                }),
            );
            emit(
                global,
                &doc,
                &format!("found k={} s={} P(ks)={} distance<={}", w.k, w.s, w.r_value, w.max_distance().hi),
            )?;
            if verified {
                Ok(())
            } else {
                Err(CliError::Usage("witness failed re-verification".into()))
            }
        }
        SearchOutcome::Interrupted(state) => {
            save(&state)?;
            let doc = document(
                "witness",
                &config,
                json!({ "status": "interrupted", "k_covered_bound": k_bound, "search": state }),
            );
            emit(global, &doc, "interrupted; rerun with the same flags to resume")?;
            Err(CliError::Budget("BUDGET_EXHAUSTED: search interrupted; resume from the checkpoint".into()))
        }
        SearchOutcome::Exhausted(state) => {
            save(&state)?;
            let doc = document(
                "witness",
                &config,
                json!({ "status": "budget_exhausted", "k_covered_bound": k_bound, "search": state }),
            );
            emit(global, &doc, "BUDGET_EXHAUSTED: no certified witness within the budget")?;
            Err(CliError::Budget(format!(
                "BUDGET_EXHAUSTED: no certified witness among {} pairs",
                state.examined
            )))
        }
    }
}

#[derive(Serialize)]
struct DensityConfig {
    poly: String,
    population: String,
    horizons: Vec<String>,
    weyl: u32,
}

fn density_cmd(global: &Global, a: &crate::DensityArgs) -> Result<(), CliError> {
    let (poly, notice) = flag("--poly", "terms coef@degree such as sqrt:2@1,sqrt:3@2", RealPolynomial::parse(&a.poly))?;
    if let Some(n) = &notice {
        eprintln!("notice: {n}");
    }
    let population = if a.naturals {
        Population::Naturals
    } else {
        Population::Semigroup(parsed("--gens", GENS, &a.gens)?)
    };
    let horizons = flag("--horizons", "comma-separated increasing integers such as 1e3,1e4", parse::horizons(&a.horizons))?;
    let config = DensityConfig {
        poly: poly.to_string(),
        population: population.to_string(),
        horizons: horizons.iter().map(u128::to_string).collect(),
        weyl: a.weyl,
    };
    let hash = checkpoint::config_hash("density", &config);
    let (mut done, elapsed_before): (Vec<density::DensityReport>, u64) = match &global.checkpoint {
        Some(path) => match checkpoint::load(path, "density", &hash)? {
            Some(cp) => (cp.state, cp.elapsed_ms),
            None => (Vec::new(), 0),
        },
        None => (Vec::new(), 0),
    };
    let start = Instant::now();
    let remaining: Vec<u128> = horizons[done.len().min(horizons.len())..].to_vec();
    let limit = global.max_shards.map_or(usize::MAX, |m| m as usize);
    let deadline = global
        .wall_clock
        .map(|secs| start + Duration::from_secs_f64(secs.max(0.0)).saturating_sub(Duration::from_millis(elapsed_before)));
    let mut interrupted = false;
    for (i, &h) in remaining.iter().enumerate() {
        if i >= limit || deadline.is_some_and(|d| Instant::now() >= d) {
            interrupted = true;
            break;
        }
        let report = density::density_scan(&poly, &population, &[h], a.weyl)?.remove(0);
        done.push(report);
        if let Some(path) = &global.checkpoint {
            checkpoint::store(
                path,
                &Checkpoint {
                    command: "density".into(),
                    config_hash: hash.clone(),
                    elapsed_ms: elapsed_before + start.elapsed().as_millis() as u64,
                    state: done.clone(),
                },
            )?;
        }
    }
    let status = if interrupted { "interrupted" } else { "complete" };
    let doc = document(
        "density",
        &config,
        json!({
            "status": status,
            "irrational_coefficient": poly.has_irrational_coefficient(),
            "notices": notice.iter().collect::<Vec<_>>(),
            "reports": done,
        }),
    );
    let summary: Vec<String> = done
        .iter()
        .map(|r| format!("N={} samples={} max_gap~{:.6}", r.horizon, r.samples, r.max_gap.to_f64()))
        .collect();
    emit(global, &doc, &summary.join("\n"))?;
    if let (Some(path), Some(&last)) = (&global.csv, horizons.get(done.len().saturating_sub(1))) {
        write_density_csv(path, &poly, &population, last)?;
    }
    if interrupted {
        return Err(CliError::Budget("BUDGET_EXHAUSTED: density scan interrupted; resume from the checkpoint".into()));
    }
    Ok(())
}

fn write_density_csv(path: &Path, poly: &RealPolynomial, population: &Population, horizon: u128) -> Result<(), CliError> {
    let elements: Vec<u128> = match population {
        Population::Semigroup(spec) => semigroup::enumerate(spec, horizon),
        Population::Naturals => (1..=horizon).collect(),
    };
    let mut rows: Vec<(f64, u128)> = elements
        .iter()
        .map(|&s| Ok((poly.eval(&BigInt::from(s))?.to_f64(), s)))
        .collect::<bohr_core::Result<_>>()?;
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = String::from("index,s,value\n");
    for (i, (v, s)) in rows.iter().enumerate() {
        out.push_str(&format!("{i},{s},{v:.17}\n"));
    }
    write_file(path, out.as_bytes())
}

#[derive(Serialize)]
struct RationalConfig {
    base: String,
    exps: Vec<u32>,
    gens: String,
    horizon: String,
    max_den: String,
    evidence: usize,
    max_samples: usize,
    coprime_only: bool,
    slice: bool,
}

fn rational(global: &Global, a: &crate::RationalArgs) -> Result<(), CliError> {
    let base: TorusPoint = parsed("--base", POINT, &a.base)?;
    let exps = match &a.exps {
        Some(e) => flag("--exps", "positive integers l_1,...,l_d", parse::u32_list(e))?,
        None => vec![1; base.dim()],
    };
    let spec: SemigroupSpec = parsed("--gens", GENS, &a.gens)?;
    let horizon = flag("--horizon", INTEGER, parse::horizon(&a.horizon))?;
    let max_den = flag("--max-den", INTEGER, parse::big(&a.max_den))?;
    let max_samples = count("--max-samples", &a.max_samples)?;
    let orbit = OrbitSpec::new(base.clone(), exps.clone(), spec.clone())?;
    let limit = LimitConfig {
        max_den: max_den.clone(),
        evidence_threshold: a.evidence,
        require_coprime: !a.all_candidates,
        max_samples,
        ..LimitConfig::default()
    };
    let config = RationalConfig {
        base: base.to_string(),
        exps,
        gens: spec.to_string(),
        horizon: horizon.to_string(),
        max_den: max_den.to_string(),
        evidence: a.evidence,
        max_samples,
        coprime_only: !a.all_candidates,
        slice: a.slice,
    };
    let mut candidates = rational_points::find_rational_limit(&orbit, horizon, &limit)?;
    let total = candidates.len();
    candidates.truncate(a.top);
    let mut result = json!({ "candidate_count": total, "candidates": candidates });
    let mut summary = format!(
        "{total} candidates; best {} (evidence {})",
        candidates[0].torus_point(),
        candidates[0].evidence_count
    );
    if a.slice {
        let out = rational_points::slice_and_recurse(
            &orbit,
            &[LevelBudget {
                horizon,
                limit,
                max_seeds: 32,
            }],
        )?;
        let verified = match &out.orbit_multiplier {
            Some(t) => Some(rational_points::verify_orbit_point(&orbit, t, &out.point)?),
            None => None,
        };
        summary.push_str(&format!(
            "\nslice: {}",
            out.point.iter().map(format_ratio).collect::<Vec<_>>().join(",")
        ));
        result["slice"] = json!({ "outcome": out, "exactly_verified": verified });
    }
    emit(global, &document("rational-points", &config, result), &summary)
}

#[derive(Serialize)]
struct GapsConfig {
    gens: String,
    from: String,
    horizon: String,
}

fn gaps(global: &Global, a: &crate::GapsArgs) -> Result<(), CliError> {
    let spec: SemigroupSpec = parsed("--gens", GENS, &a.gens)?;
    let from = flag("--from", INTEGER, parse::horizon(&a.from))?;
    let horizon = flag("--horizon", INTEGER, parse::horizon(&a.horizon))?;
    let gap = semigroup::ratio_gap(&spec, from, horizon)?;
    let config = GapsConfig {
        gens: spec.to_string(),
        from: from.to_string(),
        horizon: horizon.to_string(),
    };
    let text = format_ratio(&gap);
    let doc = document(
        "gaps",
        &config,
        json!({ "ratio_gap": text, "approx": bohr_core::wire::ratio_to_f64(&gap) }),
    );
    emit(global, &doc, &format!("delta = {text}"))
}

#[derive(Serialize)]
struct ResiduesConfig {
    gens: String,
    modulus: u64,
    exp_horizon: u32,
}

fn residues(global: &Global, a: &crate::ResiduesArgs) -> Result<(), CliError> {
    let spec: SemigroupSpec = parsed("--gens", GENS, &a.gens)?;
    let report = recurrence::check_residues(&spec, a.modulus, a.exp_horizon)?;
    let config = ResiduesConfig {
        gens: spec.to_string(),
        modulus: a.modulus,
        exp_horizon: a.exp_horizon,
    };
    let set: Vec<String> = report.closure.iter().map(u64::to_string).collect();
    let summary = format!("{{{}}} (brute force agrees: {})", set.join(","), report.agree);
    let agree = report.agree;
    emit(global, &document("residues", &config, json!(report)), &summary)?;
    if agree {
        Ok(())
    } else {
        Err(CliError::Usage("residue closure disagrees with brute force; raise --exp-horizon".into()))
    }
}

#[derive(Serialize)]
struct EscapeConfig {
    x: String,
    gens: String,
    horizon: String,
}

fn escape(global: &Global, a: &crate::EscapeArgs) -> Result<(), CliError> {
    let x: TorusPoint = parsed("--x", POINT, &a.x)?;
    let spec: SemigroupSpec = parsed("--gens", GENS, &a.gens)?;
    let horizon = flag("--horizon", INTEGER, parse::horizon(&a.horizon))?;
    let (inf, argmin) = recurrence::escape_infimum(&x, &spec, horizon)?;
    let config = EscapeConfig {
        x: x.to_string(),
        gens: spec.to_string(),
        horizon: horizon.to_string(),
    };
    let summary = format!("infimum {inf} at s={argmin}");
    let doc = document(
        "escape",
        &config,
        json!({ "infimum": inf, "argmin": argmin.to_string(), "approx": inf.to_f64() }),
    );
    emit(global, &doc, &summary)
}

#[derive(Serialize)]
struct EnumerateConfig {
    gens: String,
    horizon: String,
}

fn enumerate(global: &Global, a: &crate::EnumerateArgs) -> Result<(), CliError> {
    let spec: SemigroupSpec = parsed("--gens", GENS, &a.gens)?;
    let horizon = flag("--horizon", INTEGER, parse::horizon(&a.horizon))?;
    let values = semigroup::enumerate(&spec, horizon);
    if let Some(path) = &global.csv {
        let mut out = String::from("index,value,ratio_to_previous\n");
        for (i, v) in values.iter().enumerate() {
            let ratio = match i {
                0 => String::new(),
                _ => format_ratio(&BigRational::new(BigInt::from(*v), BigInt::from(values[i - 1]))),
            };
            out.push_str(&format!("{i},{v},{ratio}\n"));
        }
        write_file(path, out.as_bytes())?;
    }
    let config = EnumerateConfig {
        gens: spec.to_string(),
        horizon: horizon.to_string(),
    };
    let summary = format!("{} elements <= {horizon}", values.len());
    let doc = document(
        "enumerate",
        &config,
        json!({
            "count": values.len(),
            "nonlacunary": semigroup::is_nonlacunary(&spec),
            "elements": values.iter().map(u128::to_string).collect::<Vec<_>>(),
        }),
    );
    emit(global, &doc, &summary)
}

#[derive(Serialize)]
struct DirectionsConfig {
    base: String,
    gens: String,
    eps: String,
    horizon: String,
}

fn directions(global: &Global, a: &crate::DirectionsArgs) -> Result<(), CliError> {
    let base: TorusPoint = parsed("--base", POINT, &a.base)?;
    let spec: SemigroupSpec = parsed("--gens", GENS, &a.gens)?;
    let eps = flag("--eps", RATIONAL, parse::exact(&a.eps))?;
    let horizon = flag("--horizon", INTEGER, parse::horizon(&a.horizon))?;
    let exps: Vec<u32> = (1..=base.dim() as u32).collect();
    let orbit = OrbitSpec::new(base.clone(), exps, spec.clone())?;
    let out = density::direction_set(&orbit, &eps, horizon)?;
    let config = DirectionsConfig {
        base: base.to_string(),
        gens: spec.to_string(),
        eps: format_ratio(&eps),
        horizon: horizon.to_string(),
    };
    let summary = format!("{} directions", out.len());
    emit(global, &document("directions", &config, json!({ "directions": out })), &summary)
}

#[derive(Serialize)]
struct CurveConfig {
    u: Vec<f64>,
    t_max: f64,
    samples: usize,
    grid: usize,
}

fn curve(global: &Global, a: &crate::CurveArgs) -> Result<(), CliError> {
    let u = flag("--u", "comma-separated nonzero reals", parse::f64_list(&a.u))?;
    let occ = density::curve_density_check(&u, a.t_max, a.samples, a.grid)?;
    let config = CurveConfig {
        u,
        t_max: a.t_max,
        samples: a.samples,
        grid: a.grid,
    };
    let summary = format!("occupancy {}/{} = {}", occ.occupied, a.grid.pow(occ.d as u32), occ.fraction);
    emit(global, &document("curve", &config, json!(occ)), &summary)
}
