//! Rational helpers: parsing, canonical formatting, exact integer square roots
//! of rationals, and exact decimal rendering.
//!
//! Every quantity in the crate is an exact rational (`BigRational`); floating
//! point appears only in display code.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// The universal exact scalar.
pub type Rational = BigRational;

/// Failure to parse a rational literal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}` (expected `p/q` or an integer)")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Builds the rational `p/q`. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"n"` (optional leading sign, surrounding whitespace ignored).
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let p = BigInt::from_str(num).map_err(|_| malformed())?;
    let q = BigInt::from_str(den).map_err(|_| malformed())?;
    if q.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(p, q))
}

/// Parses a decimal literal such as `"7.12499"` or `"-0.5"` exactly.
pub fn parse_decimal(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
    if !frac_part.chars().all(|c| c.is_ascii_digit()) || (frac_part.is_empty() && s.contains('.')) {
        return Err(malformed());
    }
    let digits = format!("{int_part}{frac_part}");
    let p = BigInt::from_str(&digits).map_err(|_| malformed())?;
    Ok(Rational::new(p, BigInt::from(10u32).pow(frac_part.len() as u32)))
}

/// Half a unit in the last printed place of a decimal literal: the rounding
/// tolerance of the printed digits.
pub fn decimal_half_ulp(text: &str) -> Rational {
    let places = text.trim().split_once('.').map_or(0, |(_, f)| f.len());
    Rational::new(BigInt::from(5), BigInt::from(10u32).pow(places as u32 + 1))
}

/// Canonical string form: `"n"` for integers, `"p/q"` otherwise (lowest terms,
/// positive denominator).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `⌊√n⌋` for a nonnegative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative integer");
    n.sqrt()
}

/// Returns `Some(s)` if `n = s²` for a nonnegative integer `s`.
pub fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}

/// Returns `Some(s)` with `s ≥ 0` if the rational `x` is the square of a rational.
pub fn exact_rational_sqrt(x: &Rational) -> Option<Rational> {
    let p = exact_isqrt(x.numer())?;
    let q = exact_isqrt(x.denom())?;
    Some(Rational::new(p, q))
}

/// `⌊√x⌋` for a nonnegative rational, computed exactly as `isqrt(⌊x⌋)`.
pub fn floor_sqrt(x: &Rational) -> BigInt {
    assert!(!x.is_negative(), "square root of a negative rational");
    isqrt(&x.floor().to_integer())
}

/// `⌈√x⌉` for a nonnegative rational.
pub fn ceil_sqrt(x: &Rational) -> BigInt {
    let f = floor_sqrt(x);
    if Rational::from_integer(&f * &f) == *x {
        f
    } else {
        f + 1
    }
}

/// `Round[√x]` with the half-to-even convention on exact ties (ties can only
/// occur when `√x` is rational).
pub fn round_sqrt(x: &Rational) -> BigInt {
    match exact_rational_sqrt(x) {
        Some(s) => round_half_even(&s),
        None => {
            // √x irrational: round(√x) = largest n ≥ 0 with (n − ½)² < x.
            let f = floor_sqrt(x);
            let half_up = Rational::new(BigInt::from(2) * &f + 1, BigInt::from(2));
            if &half_up * &half_up < *x {
                f + 1
            } else {
                f
            }
        }
    }
}

/// Rounds a rational to the nearest integer, ties to even.
pub fn round_half_even(x: &Rational) -> BigInt {
    let fl = x.floor();
    let frac = x - &fl;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let f = fl.to_integer();
    match frac.cmp(&half) {
        std::cmp::Ordering::Less => f,
        std::cmp::Ordering::Greater => f + 1,
        std::cmp::Ordering::Equal => {
            if f.is_even() {
                f
            } else {
                f + 1
            }
        }
    }
}

/// Rational lower bound for `√x` with absolute error below `2^-bits`.
pub fn sqrt_lower(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = (x * Rational::from_integer(scale)).floor().to_integer();
    Rational::new(isqrt(&scaled), BigInt::one() << bits as usize)
}

/// Rational upper bound for `√x` with absolute error below `2^-(bits-1)`.
pub fn sqrt_upper(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = (x * Rational::from_integer(scale)).ceil().to_integer();
    Rational::new(isqrt(&scaled) + 1, BigInt::one() << bits as usize)
}

/// Exact decimal rendering of `x` rounded (half away from zero) to `digits`
/// fractional digits.
pub fn format_decimal(x: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = x * Rational::from_integer(scale.clone());
    let neg = scaled.is_negative();
    let abs = scaled.abs();
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let rounded = (abs + half).floor().to_integer();
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if neg && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
    }
}

/// Lossy conversion for display.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Converts a rational that is known to be an integer into `i64`.
pub fn to_i64(x: &BigInt) -> Option<i64> {
    x.to_i64()
}
