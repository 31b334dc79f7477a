//! Text forms: `a/b`, `sqrt:n`, `phi`, `dec:0.123456789±1e-9`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{TorusCoord, TorusPoint, DEFAULT_PRECISION};
use crate::error::{Error, Result};
use crate::wire;

const EMIT_DIGITS: usize = 30;

/// Exact value of a decimal literal such as `-0.125`, `3`, or `2.5e-3`.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = t[i + 1..]
                .parse()
                .map_err(|_| Error::parse(s, "bad exponent"))?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(Error::parse(s, "not a decimal number"));
    }
    let all = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if all.is_empty() { "0" } else { &all })
        .map_err(|e| Error::parse(s, e.to_string()))?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// `q` rounded to `digits` decimal places.
fn format_fixed(q: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (q * BigRational::from_integer(scale)).round().to_integer();
    let neg = scaled.is_negative();
    let s = scaled.abs().to_string();
    let s = format!("{s:0>width$}", width = digits + 1);
    let (int_part, frac_part) = s.split_at(s.len() - digits);
    let frac_part = frac_part.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// `m e-k` with `m` an integer, exact when `q` terminates within
/// `EMIT_DIGITS` places and rounded up otherwise.
fn format_radius(q: &BigRational) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let ten = BigInt::from(10);
    let mut k = 0usize;
    let mut scaled = q.clone();
    while !scaled.is_integer() && k < EMIT_DIGITS {
        scaled *= BigRational::from_integer(ten.clone());
        k += 1;
    }
    let mut m = scaled.ceil().to_integer();
    let mut k = k as i64;
    while k > 0 && m.is_multiple_of(&ten) {
        m /= &ten;
        k -= 1;
    }
    if k == 0 {
        m.to_string()
    } else {
        format!("{m}e-{k}")
    }
}

fn format_literal(center: &BigRational, radius: &BigRational) -> String {
    let text = format_fixed(center, EMIT_DIGITS);
    let rounded = parse_decimal(&text).expect("formatted decimal reparses");
    let total = radius + (rounded - center).abs();
    format!("dec:{text}±{}", format_radius(&total))
}

impl FromStr for TorusCoord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "phi" {
            return Ok(TorusCoord::phi());
        }
        if let Some(n) = t.strip_prefix("sqrt:") {
            let n: u64 = n
                .trim()
                .parse()
                .map_err(|_| Error::parse(s, "sqrt:n needs a positive integer n"))?;
            return TorusCoord::sqrt(n);
        }
        if let Some(body) = t.strip_prefix("dec:") {
            let (center, radius) = body
                .split_once('±')
                .or_else(|| body.split_once("+-"))
                .unwrap_or((body, "0"));
            let center = parse_decimal(center)?;
            let radius = parse_decimal(radius)?;
            return TorusCoord::literal(center, radius);
        }
        let q = wire::parse_ratio(t)?;
        Ok(TorusCoord::from_ratio(q))
    }
}

impl fmt::Display for TorusCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TorusCoord::Rational(q) => f.write_str(&wire::format_ratio(q)),
            TorusCoord::Refinable(r) => match r.as_plain_surd() {
                Some(surd) => write!(f, "{surd}"),
                None => {
                    let e = r.enclose(DEFAULT_PRECISION + 64);
                    let half = e.width() / BigInt::from(2);
                    f.write_str(&format_literal(&e.midpoint(), &half))
                }
            },
            TorusCoord::Literal(l) => f.write_str(&format_literal(l.center(), l.radius())),
        }
    }
}

impl FromStr for TorusPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|c| c.parse::<TorusCoord>())
            .collect::<Result<Vec<_>>>()?;
        TorusPoint::new(coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimals() {
        assert_eq!(parse_decimal("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_decimal("1e-9").unwrap(), q(1, 1_000_000_000));
        assert_eq!(parse_decimal("-2.5e-1").unwrap(), q(-1, 4));
        assert_eq!(parse_decimal("1e3").unwrap(), q(1000, 1));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("").is_err());
    }

    #[test]
    fn coord_grammar() {
        assert_eq!("1/5".parse::<TorusCoord>().unwrap(), TorusCoord::rational(1, 5).unwrap());
        assert_eq!("-1/5".parse::<TorusCoord>().unwrap(), TorusCoord::rational(4, 5).unwrap());
        assert_eq!("sqrt:2".parse::<TorusCoord>().unwrap().to_string(), "sqrt:2");
        assert_eq!("phi".parse::<TorusCoord>().unwrap().to_string(), "phi");
        let lit: TorusCoord = "dec:0.123456789±1e-9".parse().unwrap();
        assert_eq!(lit.to_string(), "dec:0.123456789±1e-9");
        assert_eq!(lit.to_string().parse::<TorusCoord>().unwrap(), lit);
        let lit: TorusCoord = "dec:0.5+-0.001".parse().unwrap();
        assert_eq!(lit.to_string(), "dec:0.5±1e-3");
        assert!("sqrt:x".parse::<TorusCoord>().is_err());
        assert!("1/0".parse::<TorusCoord>().is_err());
    }

    #[test]
    fn derived_refinable_emits_enclosing_literal() {
        let c: TorusCoord = "sqrt:2".parse().unwrap();
        let c3 = c.scalar_mul(&BigInt::from(3)).unwrap();
        let text = c3.to_string();
        assert!(text.starts_with("dec:0.242640687119285146"), "{text}");
        let back: TorusCoord = text.parse().unwrap();
        let e_true = c3.enclose(200);
        let e_back = back.enclose(0);
        assert!(e_back.lo <= e_true.lo && e_true.hi <= e_back.hi);
    }

    #[test]
    fn point_grammar() {
        let p: TorusPoint = "1/4,sqrt:3,phi".parse().unwrap();
        assert_eq!(p.dim(), 3);
        assert_eq!(p.to_string(), "1/4,sqrt:3,phi");
    }
}
