//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use bohr_core::density::{self, Population, RealPolynomial};
use bohr_core::rational_points::{self, LevelBudget, OrbitSpec};
use bohr_core::recurrence::{self, structured_search, verify_witness, SearchProblem};
use bohr_core::semigroup::{self, SemigroupSpec};
use bohr_core::torus::{hom_norm, IntervalValue};
use bohr_core::{IntPolynomial, KFamily, SearchBudget, TorusCoord, TorusPoint};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_bohr-lab");

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn two_pow_neg(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}

fn smooth() -> SemigroupSpec {
    SemigroupSpec::all_products(&[2, 3]).unwrap()
}

/// Remainder of a decimal string modulo `b`, one digit at a time.
fn digits_mod(digits: &str, b: u64) -> u64 {
    digits
        .bytes()
        .fold(0u64, |acc, d| ((acc as u128 * 10 + (d - b'0') as u128) % b as u128) as u64)
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut bad = 0;
    for _ in 0..10_000 {
        let len = rng.gen_range(1..=41);
        let mut digits: String = (0..len).map(|_| char::from(b'0' + rng.gen_range(0..10))).collect();
        if len == 41 {
            digits = "1".to_string() + &"0".repeat(40);
        }
        let b = rng.gen_range(1..=1_000_000u64);
        let a = rng.gen_range(0..b);
        let n: BigInt = digits.parse().unwrap();
        let x = TorusCoord::rational(a, b).unwrap();
        let got = x.scalar_mul(&n).unwrap();
        let r = ((digits_mod(&digits, b) as u128 * a as u128) % b as u128) as u64;
        let want = q(r as i64, b as i64);
        let dist_want = q(r.min(b - r) as i64, b as i64);
        if got.as_rational() != Some(&want) || got.dist_to_zero() != IntervalValue::exact(dist_want) {
            bad += 1;
        }
    }
    let t = start.elapsed();
    verdict(
        bad == 0 && t < Duration::from_secs(10),
        format!("10000 trials, {bad} mismatches, {:.2}s", t.as_secs_f64()),
    )
}

fn criterion_2() -> Verdict {
    let report = recurrence::check_residues(&smooth(), 5, 20).unwrap();
    let want: Vec<u64> = vec![1, 2, 3, 4];
    let closure_ok = report.closure.iter().copied().eq(want.iter().copied());
    let brute_ok = report.brute_force.iter().copied().eq(want.iter().copied());
    let x = TorusPoint::from_ratios(&[q(1, 5)]).unwrap();
    let (inf, argmin) = recurrence::escape_infimum(&x, &smooth(), 1_000_000).unwrap();
    let escape_ok = inf == IntervalValue::exact(q(1, 5));
    verdict(
        closure_ok && brute_ok && escape_ok,
        format!(
            "closure {:?}, brute force {:?}, escape infimum {inf} at s={argmin}",
            report.closure, report.brute_force
        ),
    )
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let poly = RealPolynomial::new(vec![(TorusCoord::sqrt(2).unwrap(), 1)]).unwrap();
    let population = Population::Semigroup(smooth());
    let reports =
        density::density_scan(&poly, &population, &[1_000, 10_000, 100_000, 1_000_000], 1).unwrap();
    let gaps: Vec<&IntervalValue> = reports.iter().map(|r| &r.max_gap).collect();
    let decreasing = gaps.windows(2).all(|w| w[1].hi < w[0].lo);
    let oracle = BigRational::new(
        "16596671943138670454399595999026528280".parse().unwrap(),
        BigInt::one() << 128u32,
    );
    let last = gaps[3];
    let matches = (last.lo.clone() - &oracle).abs() <= two_pow_neg(40) && (last.hi.clone() - &oracle).abs() <= two_pow_neg(40);
    let t = start.elapsed();
    let approx: Vec<String> = gaps.iter().map(|g| format!("{:.17}", g.to_f64())).collect();
    verdict(
        decreasing && matches && t < Duration::from_secs(120),
        format!(
            "gaps [{}]; strictly decreasing: {decreasing}; final within 2^-40 of oracle: {matches}; {:.1}s",
            approx.join(", "),
            t.as_secs_f64()
        ),
    )
}

fn witness_problem(horizon: u128) -> SearchProblem {
    SearchProblem::new(
        TorusPoint::new(vec![TorusCoord::sqrt(2).unwrap(), TorusCoord::sqrt(3).unwrap()]).unwrap(),
        IntPolynomial::from_i64(&[1, 1]).unwrap(),
        KFamily::Factorials { bound: 12 },
        smooth(),
        q(1, 100),
        SearchBudget::new(horizon),
    )
    .unwrap()
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let main = witness_problem(10_000_000);
    let main_result = structured_search(&main);
    let main_text = match &main_result {
        Ok(w) => format!("horizon 1e7: k={} s={}", w.k, w.s),
        Err(e) => format!("horizon 1e7: {e}"),
    };
    let main_ok = match &main_result {
        Ok(w) => verify_witness(&main.alpha, &main.poly, &main.eps, w).unwrap(),
        Err(_) => false,
    };
    let wide = witness_problem(1_000_000_000_000);
    let wide_text = match structured_search(&wide) {
        Ok(w) => format!(
            "horizon 1e12: k={} s={} re-verified {}",
            w.k,
            w.s,
            verify_witness(&wide.alpha, &wide.poly, &wide.eps, &w).unwrap()
        ),
        Err(e) => format!("horizon 1e12: {e}"),
    };
    let t = start.elapsed();
    verdict(
        main_ok && t < Duration::from_secs(300),
        format!("{main_text}; supplementary {wide_text}; {:.1}s", t.as_secs_f64()),
    )
}

fn pow_mod(g: u64, e: u64, m: u64) -> u64 {
    let r = BigInt::from(g).modpow(&BigInt::from(e), &BigInt::from(m));
    u64::try_from(r).unwrap()
}

fn criterion_5() -> Verdict {
    let base = TorusPoint::from_ratios(&[q(1, 5), q(1, 5)]).unwrap();
    let orbit = OrbitSpec::new(base, vec![1, 1], smooth()).unwrap();
    let out = rational_points::slice_and_recurse(&orbit, &[LevelBudget::new(1_000_000)]).unwrap();
    let dens_ok = out.point.iter().all(|c| c.denom() == &BigInt::from(5));
    let coprime = out.point.iter().all(|c| semigroup::coprime_to_generators(c.denom(), &smooth()));
    let verified = match &out.orbit_multiplier {
        Some(t) => rational_points::verify_orbit_point(&orbit, t, &out.point).unwrap(),
        None => false,
    };
    let sub = semigroup::congruence_subsemigroup(&smooth(), 5).unwrap();
    let gens_ok = sub.generators() == [16, 81];
    let orders_ok = [(2u64, 4u64), (3, 4)]
        .iter()
        .all(|&(g, o)| pow_mod(g, o, 5) == 1 && (1..o).all(|e| pow_mod(g, e, 5) != 1));
    let point: Vec<String> = out.point.iter().map(|c| c.to_string()).collect();
    verdict(
        dens_ok && coprime && verified && gens_ok && orders_ok,
        format!(
            "point ({}), exactly verified {verified}, congruence generators {:?}, orders 4 and 4 confirmed {orders_ok}",
            point.join(", "),
            sub.generators()
        ),
    )
}

fn random_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<BigRational> {
    (0..d)
        .map(|_| q(rng.gen_range(-1000..=1000), rng.gen_range(1..=1000)))
        .collect()
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    for i in 0..100_000 {
        let d = rng.gen_range(1..=4);
        let t = q(rng.gen_range(1..=1000), rng.gen_range(1..=1000));
        if i % 2 == 0 {
            let w = random_vec(&mut rng, d);
            let v: Vec<BigRational> = w.iter().enumerate().map(|(j, x)| num_traits::pow(x.clone(), j + 1)).collect();
            let scaled: Vec<BigRational> =
                v.iter().enumerate().map(|(j, x)| x * num_traits::pow(t.clone(), j + 1)).collect();
            let lhs = hom_norm(&scaled);
            let rhs = hom_norm(&v);
            let exact = lhs.is_exact() && rhs.is_exact() && lhs.lo == &t * &rhs.lo;
            let overlaps = lhs.overlaps(&IntervalValue::new(&t * &rhs.lo, &t * &rhs.hi));
            if !(exact || overlaps) {
                violations += 1;
            }
        } else {
            let u = random_vec(&mut rng, d);
            let v = random_vec(&mut rng, d);
            let sum: Vec<BigRational> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            if hom_norm(&sum).lo > hom_norm(&u).hi + hom_norm(&v).hi {
                violations += 1;
            }
        }
    }
    let base = TorusPoint::new(vec![TorusCoord::sqrt(2).unwrap(), TorusCoord::sqrt(3).unwrap()]).unwrap();
    let orbit = OrbitSpec::new(base, vec![1, 2], smooth()).unwrap();
    let dirs = density::direction_set(&orbit, &q(15, 100), 1_000_000).unwrap();
    let tol = two_pow_neg(40);
    let norms_ok = !dirs.is_empty()
        && dirs.iter().all(|d| {
            let n = hom_norm(&d.direction);
            (n.lo - BigRational::one()).abs() <= tol && (n.hi - BigRational::one()).abs() <= tol
        });
    verdict(
        violations == 0 && norms_ok,
        format!(
            "100000 trials, {violations} violations; {} directions at eps 0.15, all within 2^-40 of norm 1: {norms_ok}",
            dirs.len()
        ),
    )
}

/// Largest `s_{n+1}/s_n - 1` over consecutive 3-smooth pairs in `[lo, hi]`,
/// by direct construction of the elements.
fn ratio_gap_oracle(lo: u128, hi: u128) -> BigRational {
    let mut xs = Vec::new();
    let mut a = 1u128;
    while a <= hi {
        let mut b = a;
        while b <= hi {
            if b >= lo {
                xs.push(b);
            }
            b *= 3;
        }
        a *= 2;
    }
    xs.sort_unstable();
    xs.windows(2)
        .map(|w| BigRational::new(BigInt::from(w[1] - w[0]), BigInt::from(w[0])))
        .max()
        .unwrap_or_else(BigRational::zero)
}

fn criterion_7() -> Verdict {
    let ms = [10u128, 100, 1_000, 10_000];
    let gaps: Vec<BigRational> = ms
        .iter()
        .map(|&m| semigroup::ratio_gap(&smooth(), m, 1000 * m).unwrap())
        .collect();
    let frozen = [q(1, 3), q(5, 27), q(1, 8), q(1, 8)];
    let oracle_ok = ms
        .iter()
        .zip(&gaps)
        .zip(&frozen)
        .all(|((&m, g), f)| g == f && *g == ratio_gap_oracle(m, 1000 * m));
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = gaps.iter().map(|g| g.to_string()).collect();
    verdict(
        oracle_ok && decreasing,
        format!(
            "gaps [{}]; match enumeration oracle: {oracle_ok}; strictly decreasing: {decreasing}",
            shown.join(", ")
        ),
    )
}

fn witness_args(horizon: &str) -> Vec<String> {
    [
        "witness",
        "--alpha",
        "sqrt:2,sqrt:3",
        "--poly",
        "1,1",
        "--K",
        "factorials:12",
        "--gens",
        "2,3",
        "--eps",
        "1e-2",
        "--horizon",
        horizon,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn run_cli(args: &[String], extra: &[String]) -> i32 {
    Command::new(BIN)
        .args(args)
        .args(extra)
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .unwrap()
        .code()
        .unwrap_or(-1)
}

fn resume_matches(rng: &mut ChaCha8Rng, horizon: &str, dir: &Path) -> (bool, String) {
    let args = witness_args(horizon);
    let reference = dir.join(format!("reference-{horizon}.json"));
    let ref_code = run_cli(&args, &["--out".into(), reference.display().to_string()]);
    let ck = dir.join(format!("checkpoint-{horizon}.json"));
    let resumed = dir.join(format!("resumed-{horizon}.json"));
    let cuts: Vec<u64> = (0..3).map(|_| rng.gen_range(1..=4)).collect();
    let state_args = [
        "--checkpoint".to_string(),
        ck.display().to_string(),
        "--out".to_string(),
        resumed.display().to_string(),
    ];
    for &cut in &cuts {
        let mut extra = state_args.to_vec();
        extra.extend(["--max-shards".to_string(), cut.to_string()]);
        run_cli(&args, &extra);
    }
    // A hard kill at a random moment, then a run to completion.
    let mut child = Command::new(BIN)
        .args(&args)
        .args(&state_args)
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    std::thread::sleep(Duration::from_millis(rng.gen_range(10..300)));
    let _ = child.kill();
    let _ = child.wait();
    let code = run_cli(&args, &state_args);
    let same = std::fs::read(&reference).unwrap() == std::fs::read(&resumed).unwrap();
    (
        same && code == ref_code,
        format!("horizon {horizon}: cuts {cuts:?} + kill, exit {code} vs {ref_code}, identical JSON {same}"),
    )
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let dir = tempfile::tempdir().unwrap();
    let (ok7, text7) = resume_matches(&mut rng, "1e7", dir.path());
    let (ok12, text12) = resume_matches(&mut rng, "1e12", dir.path());
    verdict(ok7 && ok12, format!("{text7}; {text12}"))
}

fn main() {
    let criteria: [fn() -> Verdict; 8] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
    ];
    let mut failed = Vec::new();
    for (i, run) in criteria.iter().enumerate() {
        let v = run();
        println!("criterion {}: {} {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
