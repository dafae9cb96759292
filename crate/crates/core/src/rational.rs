//! Exact rational scalars and their textual forms.
//!
//! Every coordinate, slope, ratio and enclosure bound in this crate is a
//! [`Rational`]. Text uses `p/q` (or a bare integer); decimals are rejected on
//! input and only ever produced for presentation.

use alloc::string::String;
use core::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Shorthand constructor for small literals.
///
/// Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// `base^exp` for a non-negative exponent.
pub fn pow(base: &Rational, exp: u32) -> Rational {
    Pow::pow(base, exp)
}

/// `2^-k`.
pub fn inv_pow2(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << (k as usize))
}

/// Parse `"p/q"`, `"-p/q"` or an integer string. Decimal points, exponents
/// and surrounding whitespace inside the number are rejected.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let bad = || Error::Parse(alloc::format!("not a rational literal: {text:?}"));
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let numerator = parse_integer(num, true).ok_or_else(bad)?;
    let denominator = match den {
        Some(d) => parse_integer(d, false).ok_or_else(bad)?,
        None => BigInt::one(),
    };
    if denominator.is_zero() {
        return Err(Error::Parse(alloc::format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(numerator, denominator))
}

fn parse_integer(digits: &str, allow_sign: bool) -> Option<BigInt> {
    let (negative, body) = match digits.strip_prefix('-') {
        Some(rest) if allow_sign => (true, rest),
        Some(_) => return None,
        None => (false, digits.strip_prefix('+').filter(|_| allow_sign).unwrap_or(digits)),
    };
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let magnitude = BigInt::parse_bytes(body.as_bytes(), 10)?;
    Some(if negative { -magnitude } else { magnitude })
}

/// Render as `p/q`, keeping the denominator even when it is 1.
pub fn format_ratio(value: &Rational) -> String {
    alloc::format!("{}/{}", value.numer(), value.denom())
}

/// Fixed-point decimal rendering with `digits` fractional digits, rounding
/// half to even.
pub fn to_decimal(value: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = value.numer().abs() * &scale;
    let den = value.denom();
    let (mut quotient, remainder) = scaled.div_rem(den);
    let twice: BigInt = remainder * 2u32;
    if twice > *den || (twice == *den && quotient.is_odd()) {
        quotient += 1u32;
    }
    let negative = value.is_negative() && !quotient.is_zero();
    let (int_part, frac_part) = quotient.div_rem(&scale);

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    let _ = write!(out, "{int_part}");
    if digits > 0 {
        let frac = frac_part.to_str_radix(10);
        out.push('.');
        for _ in frac.len()..digits {
            out.push('0');
        }
        out.push_str(&frac);
    }
    out
}

pub(crate) fn is_unit_interval(x: &Rational) -> bool {
    !x.is_negative() && *x <= Rational::one()
}

pub(crate) fn sorted_pair(a: Rational, b: Rational) -> (Rational, Rational) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Minimum and maximum of a non-empty slice.
pub(crate) fn min_max(values: &[Rational]) -> Option<(Rational, Rational)> {
    let mut iter = values.iter();
    let first = iter.next()?;
    let (mut lo, mut hi) = (first, first);
    for v in iter {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    Some((lo.clone(), hi.clone()))
}
