//! Exact rational scalars and their text encoding.
//!
//! Every scalar that enters a verdict is a [`Rational`]. The document format
//! writes them as `"p/q"` strings (or `"p"` when the denominator is one).

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn from_biguint(value: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, value.clone()))
}

/// Parses `"p/q"`, `"p"` or a plain decimal integer. Whitespace around the
/// parts is rejected so that the encoding stays canonical-ish and diffable.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let numer = parse_int(num)?;
    let denom = match den {
        Some(d) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return None;
            }
            d
        }
        None => BigInt::one(),
    };
    Some(Rational::new(numer, denom))
}

fn parse_int(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix('-').unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Compares by cross-multiplication. The `Ord` impl of `Ratio` recurses
/// through the continued fraction, which overflows the stack on convergents
/// of quadratic irrationals.
pub fn cmp(a: &Rational, b: &Rational) -> std::cmp::Ordering {
    (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
}

pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// Decimal rendering truncated toward negative infinity, `digits` places
/// after the point. Only ever used for human-facing text.
pub fn to_decimal(value: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (value.numer() * &scale).div_floor(value.denom());
    let negative = scaled.is_negative();
    let magnitude = scaled.abs().to_string();
    let padded = if magnitude.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - magnitude.len()), magnitude)
    } else {
        magnitude
    };
    let (whole, frac) = padded.split_at(padded.len() - digits);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac}")
    }
}

/// `base^exp` for a non-negative exponent.
pub fn pow(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

/// `10^-digits` as an exact rational.
pub fn ten_to_minus(digits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(10u32).pow(digits))
}
