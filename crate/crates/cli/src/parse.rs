//! Flag value grammars shared by several subcommands.

use bohr_core::torus::parse_decimal;
use bohr_core::wire::parse_ratio;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

/// Exact rational from `a/b`, `0.01` or `1e-2`.
pub fn exact(s: &str) -> Result<BigRational, String> {
    let parsed = if s.contains('/') {
        parse_ratio(s)
    } else {
        parse_decimal(s)
    };
    parsed.map_err(|e| e.to_string())
}

/// Non-negative integer written plainly or in scientific notation (`1e7`,
/// `2.5e3`); the value must be an exact integer.
pub fn horizon(s: &str) -> Result<u128, String> {
    let cleaned = s.trim().replace('_', "");
    let q = parse_decimal(&cleaned).map_err(|e| e.to_string())?;
    if !q.is_integer() || q.is_negative() {
        return Err(format!("{s:?} is not a non-negative integer"));
    }
    u128::try_from(q.to_integer()).map_err(|_| format!("{s:?} exceeds 128 bits"))
}

pub fn horizons(s: &str) -> Result<Vec<u128>, String> {
    s.split(',').map(horizon).collect()
}

pub fn big(s: &str) -> Result<BigInt, String> {
    let h = horizon(s)?;
    Ok(BigInt::from(h))
}

pub fn u32_list(s: &str) -> Result<Vec<u32>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<u32>().map_err(|e| format!("{v:?}: {e}")))
        .collect()
}

pub fn f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect()
}
