//! Exact rational arithmetic helpers.
//!
//! Everything geometric in this crate is a [`Rat`] (arbitrary-precision
//! rational).  Floating point never enters a computation; decimals only
//! appear in output columns, rendered exactly by [`render_decimal`].
//!
//! # Invariants
//! - `Rat` values are always reduced with a positive denominator
//!   (guaranteed by `num-rational`).
//! - `render_rat` round-trips through [`parse_rat`] for every value.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::str::FromStr;
use thiserror::Error;

/// Arbitrary-precision rational used for all lattice and Futaki arithmetic.
pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}` in rational literal")]
    InvalidInteger(String),
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
}

/// Shorthand constructor from machine integers.  Panics on `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a rational.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact power of two, `exp` may be negative.
pub fn pow2(exp: i32) -> Rat {
    let big = BigInt::one() << exp.unsigned_abs() as usize;
    if exp >= 0 {
        Rat::from_integer(big)
    } else {
        Rat::new(BigInt::one(), big)
    }
}

/// Parses `p` or `p/q` (optionally signed) into a rational.
pub fn parse_rat(text: &str) -> Result<Rat, RatParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(RatParseError::Empty);
    }
    let parse_int = |part: &str| {
        BigInt::from_str(part.trim())
            .map_err(|_| RatParseError::InvalidInteger(part.trim().to_string()))
    };
    match trimmed.split_once('/') {
        None => Ok(Rat::from_integer(parse_int(trimmed)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(RatParseError::ZeroDenominator);
            }
            Ok(Rat::new(num, den))
        }
    }
}

/// Renders as `p/q`, or plain `p` for integers.
pub fn render_rat(value: &Rat) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Compares `|num/den|` against `10^exp` without leaving the integers.
fn cmp_abs_pow10(num: &BigInt, den: &BigInt, exp: i64) -> Ordering {
    let ten = BigInt::from(10);
    if exp >= 0 {
        num.magnitude()
            .cmp(&(den.magnitude() * ten.magnitude().pow(exp as u32)))
    } else {
        (num.magnitude() * ten.magnitude().pow((-exp) as u32)).cmp(den.magnitude())
    }
}

/// Renders an exact decimal with `sig` significant digits, rounding half
/// away from zero.  Uses plain notation for moderate exponents and
/// scientific notation (`d.dd...e±k`) otherwise; never goes through `f64`.
pub fn render_decimal(value: &Rat, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if value.is_zero() {
        return "0".to_string();
    }
    let num = value.numer();
    let den = value.denom();

    // Decimal exponent: the unique e with 10^e <= |value| < 10^(e+1).
    let mut exp = num.magnitude().to_string().len() as i64 - den.to_string().len() as i64;
    if cmp_abs_pow10(num, den, exp) == Ordering::Less {
        exp -= 1;
    } else if cmp_abs_pow10(num, den, exp + 1) != Ordering::Less {
        exp += 1;
    }

    // Scale so the first `sig` digits sit in the integer part, then round.
    let shift = sig as i64 - 1 - exp;
    let ten = BigInt::from(10u8);
    let (mut p, mut q) = (num.abs(), den.clone());
    if shift >= 0 {
        p *= ten.pow(shift as u32);
    } else {
        q *= ten.pow((-shift) as u32);
    }
    let two = BigInt::from(2u8);
    let rounded = (p * &two + &q) / (q * &two);
    let mut digits = rounded.to_string();
    if digits.len() > sig {
        // Rounding carried into a new leading digit (e.g. 0.999.. -> 1.00..).
        digits.truncate(sig);
        exp += 1;
    }
    debug_assert_eq!(digits.len(), sig);

    let sign = if value.is_negative() { "-" } else { "" };
    let body = if (0..sig as i64).contains(&exp) {
        let split = (exp + 1) as usize;
        if split == sig {
            digits
        } else {
            format!("{}.{}", &digits[..split], &digits[split..])
        }
    } else if (-4..0).contains(&exp) {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else if sig == 1 {
        format!("{digits}e{exp}")
    } else {
        format!("{}.{}e{exp}", &digits[..1], &digits[1..])
    };
    format!("{sign}{body}")
}
