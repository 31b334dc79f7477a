//! Density diagnostics for orbits on the circle and on `T^d`.
//!
//! Max gap is the pass/fail signal for density; Weyl sums are reported as
//! diagnostics only.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational_points::{act, OrbitSpec};
use crate::semigroup::{self, SemigroupSpec, SemigroupStream};
use crate::torus::{hom_norm, hom_norm_bounds, IntervalValue, TorusCoord, TorusPoint, DEFAULT_PRECISION};
use crate::wire;

/// `sum_j c_j n^(d_j)` with torus coefficients and positive degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    terms: Vec<(TorusCoord, u32)>,
}

impl RealPolynomial {
    pub fn new(terms: Vec<(TorusCoord, u32)>) -> Result<Self> {
        if terms.iter().any(|(_, d)| *d == 0) {
            return Err(Error::invalid("constant terms are not allowed"));
        }
        if terms.is_empty() {
            return Err(Error::invalid("polynomial has no non-constant term"));
        }
        Ok(RealPolynomial { terms })
    }

    /// Parse `coef@degree,...`; a term without `@` takes its position as
    /// degree. A constant term is dropped, and the returned notice says so.
    pub fn parse(s: &str) -> Result<(Self, Option<String>)> {
        let mut terms = Vec::new();
        let mut notice = None;
        for (i, item) in s.split(',').map(str::trim).enumerate() {
            let (coef, degree) = match item.rsplit_once('@') {
                Some((c, d)) => (
                    c,
                    d.trim()
                        .parse::<u32>()
                        .map_err(|e| Error::parse(item, e.to_string()))?,
                ),
                None => (item, i as u32 + 1),
            };
            let coef: TorusCoord = coef.parse()?;
            if degree == 0 {
                notice = Some(format!("constant term {coef} dropped: density mod 1 is translation invariant"));
            } else {
                terms.push((coef, degree));
            }
        }
        Ok((RealPolynomial::new(terms)?, notice))
    }

    pub fn terms(&self) -> &[(TorusCoord, u32)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(_, d)| *d).max().unwrap_or(0)
    }

    /// Some coefficient is not an exact rational.
    pub fn has_irrational_coefficient(&self) -> bool {
        self.terms.iter().any(|(c, _)| !c.is_rational())
    }

    pub fn eval(&self, n: &BigInt) -> Result<TorusCoord> {
        let mut acc = TorusCoord::zero();
        for (c, d) in &self.terms {
            acc = acc.add(&c.scalar_mul(&num_traits::pow(n.clone(), *d as usize))?);
        }
        Ok(acc)
    }
}

impl FromStr for RealPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RealPolynomial::parse(s).map(|(p, _)| p)
    }
}

impl fmt::Display for RealPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, d)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}@{d}")?;
        }
        Ok(())
    }
}

/// Which integers feed the polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Population {
    Semigroup(SemigroupSpec),
    /// `1, 2, 3, ...`
    Naturals,
}

impl Population {
    fn elements(&self, horizon: u128) -> Vec<u128> {
        match self {
            Population::Semigroup(spec) => SemigroupStream::bounded(spec, horizon).collect(),
            Population::Naturals => (1..=horizon).collect(),
        }
    }
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Population::Semigroup(spec) => write!(f, "{spec}"),
            Population::Naturals => f.write_str("naturals"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylSum {
    pub h: u32,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    #[serde(with = "wire::decimal")]
    pub horizon: u128,
    pub samples: usize,
    pub max_gap: IntervalValue,
    pub star_discrepancy: IntervalValue,
    /// Diagnostic only.
    pub weyl_sums: Vec<WeylSum>,
}

/// Sort by enclosure and return `(lo, hi)` pairs in `[0, 1)`-based order.
fn sorted_enclosures(points: &[TorusCoord], bits: u32) -> Vec<(BigRational, BigRational)> {
    let mut encl: Vec<(BigRational, BigRational)> = points
        .par_iter()
        .map(|p| {
            let e = p.enclose(bits);
            (e.lo, e.hi)
        })
        .collect();
    encl.par_sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    encl
}

fn gap_bounds(a: &(BigRational, BigRational), b_lo: &BigRational, b_hi: &BigRational) -> IntervalValue {
    let lo = b_lo - &a.1;
    let hi = b_hi - &a.0;
    IntervalValue::new(lo.max(BigRational::zero()), hi.max(BigRational::zero()))
}

fn covering_gap_sorted(sorted: &[(BigRational, BigRational)]) -> IntervalValue {
    let one = BigRational::one();
    let first = &sorted[0];
    let last = &sorted[sorted.len() - 1];
    let mut best = gap_bounds(last, &(&first.0 + &one), &(&first.1 + &one));
    for pair in sorted.windows(2) {
        let g = gap_bounds(&pair[0], &pair[1].0, &pair[1].1);
        if g.hi > best.lo {
            best = best.max(&g);
        }
    }
    IntervalValue::new(best.lo.min(one.clone()), best.hi.min(one))
}

/// Largest circular gap between consecutive points; half of it is the
/// covering radius.
pub fn covering_gap(points: &[TorusCoord]) -> Result<IntervalValue> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    Ok(covering_gap_sorted(&sorted_enclosures(points, DEFAULT_PRECISION)))
}

fn star_discrepancy_sorted(sorted: &[(BigRational, BigRational)]) -> IntervalValue {
    let n = BigInt::from(sorted.len());
    let mut lo = BigRational::zero();
    let mut hi = BigRational::zero();
    for (i, (x_lo, x_hi)) in sorted.iter().enumerate() {
        let above = BigRational::new(BigInt::from(i + 1), n.clone());
        let below = BigRational::new(BigInt::from(i), n.clone());
        let hi_term = (&above - x_lo).max(x_hi - &below);
        let lo_term = (&above - x_hi).max(x_lo - &below);
        if hi_term > hi {
            hi = hi_term;
        }
        if lo_term > lo {
            lo = lo_term;
        }
    }
    IntervalValue::new(lo.min(hi.clone()), hi.min(BigRational::one()))
}

/// `sup_u |#{x_i < u}/n - u|` from the sorted-sample formula.
pub fn star_discrepancy(points: &[TorusCoord]) -> Result<IntervalValue> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    Ok(star_discrepancy_sorted(&sorted_enclosures(points, DEFAULT_PRECISION)))
}

/// `|(1/n) sum e(h x_i)|` for `h = 1..=max_h`.
pub fn weyl_sums(points: &[TorusCoord], max_h: u32) -> Result<Vec<WeylSum>> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    (1..=max_h)
        .map(|h| {
            let hb = BigInt::from(h);
            let (re, im) = points
                .par_iter()
                .map(|p| {
                    let x = p.scalar_mul(&hb)?.to_f64();
                    let angle = std::f64::consts::TAU * x;
                    Ok((angle.cos(), angle.sin()))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold((0.0, 0.0), |(a, b), (c, s)| (a + c, b + s));
            let n = points.len() as f64;
            Ok(WeylSum {
                h,
                magnitude: (re / n).hypot(im / n).min(1.0),
            })
        })
        .collect()
}

fn validate_population(population: &Population) -> Result<()> {
    match population {
        Population::Semigroup(spec) if !semigroup::is_nonlacunary(spec) => {
            Err(Error::invalid(format!("{spec} is lacunary")))
        }
        _ => Ok(()),
    }
}

/// Report for `{P(s) : s <= horizon}`.
pub fn density_report(poly: &RealPolynomial, population: &Population, horizon: u128, max_h: u32) -> Result<DensityReport> {
    validate_population(population)?;
    let elements = population.elements(horizon);
    if elements.is_empty() {
        return Err(Error::invalid(format!("no population element <= {horizon}")));
    }
    let points = elements
        .par_iter()
        .map(|&s| poly.eval(&BigInt::from(s)))
        .collect::<Result<Vec<_>>>()?;
    let sorted = sorted_enclosures(&points, DEFAULT_PRECISION);
    Ok(DensityReport {
        horizon,
        samples: points.len(),
        max_gap: covering_gap_sorted(&sorted),
        star_discrepancy: star_discrepancy_sorted(&sorted),
        weyl_sums: weyl_sums(&points, max_h)?,
    })
}

/// One report per horizon; horizons must increase strictly.
pub fn density_scan(
    poly: &RealPolynomial,
    population: &Population,
    horizons: &[u128],
    max_h: u32,
) -> Result<Vec<DensityReport>> {
    density_scan_with(poly, population, horizons, max_h, |_| Ok(()))
}

/// [`density_scan`] with a callback after each completed horizon.
pub fn density_scan_with(
    poly: &RealPolynomial,
    population: &Population,
    horizons: &[u128],
    max_h: u32,
    mut on_report: impl FnMut(&DensityReport) -> Result<()>,
) -> Result<Vec<DensityReport>> {
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("horizons must be strictly increasing"));
    }
    let mut out = Vec::with_capacity(horizons.len());
    for &h in horizons {
        let report = density_report(poly, population, h, max_h)?;
        on_report(&report)?;
        out.push(report);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridOccupancy {
    pub d: usize,
    pub cells_per_side: usize,
    pub occupied: u64,
    pub fraction: f64,
}

/// Occupancy of the curve `t -> (t u_1, t^2 u_2, ..., t^d u_d) mod 1` for
/// equispaced `t` in `(0, t_max]`.
pub fn curve_density_check(u: &[f64], t_max: f64, samples: usize, g: usize) -> Result<GridOccupancy> {
    let d = u.len();
    if d == 0 {
        return Err(Error::invalid("direction vector is empty"));
    }
    if let Some(index) = u.iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroComponent { index });
    }
    if !(t_max > 0.0 && t_max.is_finite()) || u.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("t_max and u must be finite, t_max positive"));
    }
    let cells = g
        .checked_pow(d as u32)
        .filter(|&c| g > 0 && c <= 1 << 28)
        .ok_or_else(|| Error::invalid(format!("grid {g}^{d} is too large")))?;
    if samples < cells {
        return Err(Error::invalid(format!("need at least {cells} samples")));
    }
    let worst = u
        .iter()
        .enumerate()
        .map(|(j, x)| t_max.powi(j as i32 + 1) * x.abs())
        .fold(0.0, f64::max);
    if worst > (1u64 << 40) as f64 {
        return Err(Error::PrecisionExhausted(format!(
            "t^d u reaches {worst:e}; double precision cannot resolve a {g}-cell grid"
        )));
    }
    let mut occupied = vec![false; cells];
    for i in 1..=samples {
        let t = t_max * i as f64 / samples as f64;
        let mut index = 0usize;
        let mut power = 1.0;
        for &x in u {
            power *= t;
            let v = power * x;
            let frac = v - v.floor();
            let cell = ((frac * g as f64) as usize).min(g - 1);
            index = index * g + cell;
        }
        occupied[index] = true;
    }
    let count = occupied.iter().filter(|&&b| b).count() as u64;
    Ok(GridOccupancy {
        d,
        cells_per_side: g,
        occupied: count,
        fraction: count as f64 / cells as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSample {
    #[serde(with = "wire::decimal")]
    pub s: u128,
    pub norm: IntervalValue,
    #[serde(with = "wire::ratio_vec")]
    pub direction: Vec<BigRational>,
    /// Quasi-norm of `direction`; 1 up to rounding.
    pub direction_norm: IntervalValue,
}

/// `(x_1/n, x_2/n^2, ..., x_d/n^d)` with `n` the quasi-norm of `x`, plus
/// certified bounds on the quasi-norm of the result.
pub fn normalize_direction(x: &[BigRational]) -> Result<(Vec<BigRational>, IntervalValue)> {
    let norm = hom_norm(x);
    if norm.hi.is_zero() {
        return Err(Error::invalid("zero vector has no direction"));
    }
    let n = norm.midpoint();
    let mut power = BigRational::one();
    let direction: Vec<BigRational> = x
        .iter()
        .map(|xj| {
            power = &power * &n;
            xj / &power
        })
        .collect();
    let direction_norm = hom_norm(&direction);
    Ok((direction, direction_norm))
}

/// Normalized lifts of orbit points with `0 < quasi-norm <= eps`.
///
/// The orbit exponents must be `1, 2, ..., d`; each torus point is lifted to
/// its nearest-integer representative in `(-1/2, 1/2]^d`.
pub fn direction_set(orbit: &OrbitSpec, eps: &BigRational, horizon: u128) -> Result<Vec<DirectionSample>> {
    if orbit.exponents.iter().enumerate().any(|(j, &l)| l != j as u32 + 1) {
        return Err(Error::invalid("direction sets need exponents 1, 2, ..., d"));
    }
    let elements: Vec<u128> = SemigroupStream::bounded(&orbit.spec, horizon).collect();
    let found: Vec<Option<DirectionSample>> = elements
        .par_iter()
        .map(|&s| {
            let p = act(&BigInt::from(s), &orbit.exponents, &orbit.base)?;
            let lifts: Vec<(BigRational, BigRational)> = p
                .coords()
                .iter()
                .map(|c| c.enclose(2 * DEFAULT_PRECISION).centered())
                .collect();
            let abs_lo: Vec<BigRational> = lifts
                .iter()
                .map(|(lo, hi)| {
                    if lo.is_negative() && hi.is_positive() {
                        BigRational::zero()
                    } else {
                        lo.abs().min(hi.abs())
                    }
                })
                .collect();
            let abs_hi: Vec<BigRational> = lifts.iter().map(|(lo, hi)| lo.abs().max(hi.abs())).collect();
            let norm = hom_norm_bounds(&abs_lo, &abs_hi, 96);
            if &norm.hi > eps || norm.lo.is_zero() {
                return Ok(None);
            }
            let mid: Vec<BigRational> = lifts
                .iter()
                .map(|(lo, hi)| (lo + hi) / BigInt::from(2))
                .collect();
            let (direction, direction_norm) = normalize_direction(&mid)?;
            Ok(Some(DirectionSample {
                s,
                norm,
                direction,
                direction_norm,
            }))
        })
        .collect::<Result<_>>()?;
    let out: Vec<DirectionSample> = found.into_iter().flatten().collect();
    if out.is_empty() {
        return Err(Error::Empty);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineCoverage {
    pub axis: usize,
    pub cells: usize,
    pub covered: usize,
    pub fraction: f64,
}

/// Fraction of the `g` cells along `{anchor + t e_axis}`, with the axis
/// counted from 1, holding a sample whose other coordinates are within `tol`
/// of the anchor's.
pub fn line_segment_check(
    points: &[TorusPoint],
    anchor: &[BigRational],
    axis: usize,
    g: usize,
    tol: &BigRational,
) -> Result<LineCoverage> {
    let d = anchor.len();
    if axis == 0 || axis > d {
        return Err(Error::invalid(format!("axis must lie in 1..={d}")));
    }
    if g == 0 {
        return Err(Error::invalid("grid must have at least one cell"));
    }
    let anchor: Vec<TorusCoord> = anchor.iter().map(|q| TorusCoord::from_ratio(-q.clone())).collect();
    let gb = BigInt::from(g);
    let cells: Vec<Option<usize>> = points
        .par_iter()
        .map(|p| {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.dim(),
                });
            }
            let near = (0..d)
                .filter(|&j| j != axis - 1)
                .all(|j| &p.coord(j).add(&anchor[j]).dist_to_zero().hi <= tol);
            if !near {
                return Ok(None);
            }
            let mid = p.coord(axis - 1).enclose(DEFAULT_PRECISION).midpoint();
            let frac = &mid - mid.floor();
            let cell = (frac * &gb).floor().to_integer().to_usize().unwrap_or(0);
            Ok(Some(cell.min(g - 1)))
        })
        .collect::<Result<_>>()?;
    let mut hit = vec![false; g];
    for c in cells.into_iter().flatten() {
        hit[c] = true;
    }
    let covered = hit.iter().filter(|&&b| b).count();
    Ok(LineCoverage {
        axis,
        cells: g,
        covered,
        fraction: covered as f64 / g as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn coords(values: &[(i64, i64)]) -> Vec<TorusCoord> {
        values.iter().map(|&(n, d)| TorusCoord::rational(n, d).unwrap()).collect()
    }

    #[test]
    fn gap_examples() {
        assert_eq!(covering_gap(&coords(&[(0, 1), (1, 2)])).unwrap(), IntervalValue::exact(q(1, 2)));
        let grid: Vec<(i64, i64)> = (0..10).map(|k| (k, 10)).collect();
        assert_eq!(covering_gap(&coords(&grid)).unwrap(), IntervalValue::exact(q(1, 10)));
        assert_eq!(covering_gap(&coords(&[(1, 3)])).unwrap(), IntervalValue::exact(q(1, 1)));
        assert!(covering_gap(&[]).is_err());
    }

    #[test]
    fn gap_of_sqrt2_orbit() {
        let spec: SemigroupSpec = "2,3".parse().unwrap();
        let x = TorusCoord::sqrt(2).unwrap();
        let pts: Vec<TorusCoord> = SemigroupStream::bounded(&spec, 100_000)
            .map(|s| x.scalar_mul_u128(s).unwrap())
            .collect();
        let gap = covering_gap(&pts).unwrap();
        assert!((gap.to_f64() - 0.04877323527902566).abs() < 1e-12);
        assert!(gap.width() < q(1, 1 << 40));
    }

    #[test]
    fn grid_discrepancy() {
        for n in [1i64, 2, 7, 50] {
            let grid: Vec<(i64, i64)> = (0..n).map(|k| (k, n)).collect();
            assert_eq!(star_discrepancy(&coords(&grid)).unwrap(), IntervalValue::exact(q(1, n)));
        }
    }

    #[test]
    fn rational_scan_never_densifies() {
        let poly: RealPolynomial = "1/3@1".parse().unwrap();
        let pop = Population::Semigroup("2,3".parse().unwrap());
        let reports = density_scan(&poly, &pop, &[100, 10_000], 3).unwrap();
        for r in &reports {
            assert_eq!(r.max_gap, IntervalValue::exact(q(1, 3)));
            assert_eq!(r.weyl_sums[2].magnitude, 1.0);
        }
    }

    #[test]
    fn weyl_equidistribution_sqrt2() {
        let poly: RealPolynomial = "sqrt:2@1".parse().unwrap();
        let r = density_report(&poly, &Population::Naturals, 10_000, 1).unwrap();
        assert!(r.star_discrepancy.hi <= q(1, 100));
        assert!((r.star_discrepancy.to_f64() - 0.00026469790207520744).abs() < 1e-12);
        assert!((r.weyl_sums[0].magnitude - 4.287772423764787e-05).abs() < 1e-9);
    }

    #[test]
    fn polynomial_grammar() {
        let (p, notice) = RealPolynomial::parse("1/7@0,sqrt:2@1,sqrt:3@2").unwrap();
        assert_eq!(p.terms().len(), 2);
        assert!(notice.is_some());
        assert_eq!(p.to_string(), "sqrt:2@1,sqrt:3@2");
        let positional: RealPolynomial = "sqrt:2,sqrt:3".parse().unwrap();
        assert_eq!(positional, p);
        assert!("1/3@0".parse::<RealPolynomial>().is_err());
        assert!(p.has_irrational_coefficient());
    }

    #[test]
    fn scan_rejects_bad_horizons_and_lacunary() {
        let poly: RealPolynomial = "sqrt:2@1".parse().unwrap();
        let pop = Population::Semigroup("2,3".parse().unwrap());
        assert!(density_scan(&poly, &pop, &[100, 100], 1).is_err());
        let lac = Population::Semigroup("2,8".parse().unwrap());
        assert!(density_scan(&poly, &lac, &[100], 1).is_err());
    }

    #[test]
    fn curve_examples() {
        let occ = curve_density_check(&[1.0], 1.0, 1000, 100).unwrap();
        assert_eq!(occ.fraction, 1.0);
        assert!(matches!(
            curve_density_check(&[1.0, 0.0], 1.0, 1000, 10),
            Err(Error::ZeroComponent { index: 1 })
        ));
        assert!(curve_density_check(&[1.0], 1e13, 1000, 10).is_err());
        assert!(curve_density_check(&[1.0, 1.0], 1.0, 10, 10).is_err());
    }

    #[test]
    fn direction_examples() {
        let (dir, n) = normalize_direction(&[q(1, 100), q(0, 1)]).unwrap();
        assert_eq!(dir, vec![q(1, 1), q(0, 1)]);
        assert_eq!(n, IntervalValue::exact(q(1, 1)));
        let (dir, _) = normalize_direction(&[q(0, 1), q(1, 10_000)]).unwrap();
        assert_eq!(dir, vec![q(0, 1), q(1, 1)]);
        assert!(normalize_direction(&[q(0, 1)]).is_err());
    }

    #[test]
    fn direction_set_of_surd_orbit() {
        let orbit = OrbitSpec::new("sqrt:2,sqrt:3".parse().unwrap(), vec![1, 2], "2,3".parse().unwrap()).unwrap();
        assert!(matches!(direction_set(&orbit, &q(1, 20), 1_000_000), Err(Error::Empty)));
        let out = direction_set(&orbit, &q(15, 100), 1_000_000).unwrap();
        assert_eq!(out.iter().map(|d| d.s).collect::<Vec<_>>(), [864]);
        let tol = q(1, 1 << 40);
        for d in &out {
            assert!((&d.direction_norm.lo - q(1, 1)).abs() <= tol);
            assert!((&d.direction_norm.hi - q(1, 1)).abs() <= tol);
        }
    }

    #[test]
    fn line_segment_examples() {
        let anchor = [q(1, 5), q(2, 5)];
        let segment: Vec<TorusPoint> = (0..10)
            .map(|i| TorusPoint::from_ratios(&[q(1, 5), q(i, 10)]).unwrap())
            .collect();
        assert_eq!(line_segment_check(&segment, &anchor, 2, 10, &q(0, 1)).unwrap().fraction, 1.0);
        let single = [TorusPoint::from_ratios(&anchor).unwrap()];
        assert_eq!(line_segment_check(&single, &anchor, 2, 10, &q(0, 1)).unwrap().covered, 1);
        assert!(line_segment_check(&single, &anchor, 3, 10, &q(0, 1)).is_err());
    }

    #[test]
    fn line_segment_of_surd_orbit() {
        let orbit = OrbitSpec::new("sqrt:2,sqrt:3".parse().unwrap(), vec![1, 2], "2,3".parse().unwrap()).unwrap();
        let pts: Vec<TorusPoint> = crate::rational_points::orbit_sample(&orbit, 1_000_000)
            .unwrap()
            .into_iter()
            .map(|s| s.point)
            .collect();
        let zero = [q(0, 1), q(0, 1)];
        assert_eq!(line_segment_check(&pts, &zero, 1, 10, &q(1, 10)).unwrap().fraction, 1.0);
        assert_eq!(line_segment_check(&pts, &zero, 2, 10, &q(1, 10)).unwrap().covered, 9);
    }
}
