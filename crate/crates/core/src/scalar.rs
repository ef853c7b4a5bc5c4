//! Exact rational scalars.

use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};

/// Every payoff, probability and value in the crate is an exact rational.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// `n/d`; panics on a zero denominator.
pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Parses `"n"`, `"n/d"` or `"-n/d"`, ignoring surrounding whitespace.
pub fn parse(text: &str) -> Option<Scalar> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Scalar::new(num, den))
}

/// Canonical text form: `"n"` for integers, `"n/d"` otherwise.
pub fn format(value: &Scalar) -> String {
    value.to_string()
}

pub fn abs(value: &Scalar) -> Scalar {
    value.abs()
}

/// `base^exp` for a nonnegative exponent.
pub fn pow(base: &Scalar, exp: usize) -> Scalar {
    let mut acc = one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Scalar>) -> Scalar {
    values.into_iter().fold(zero(), |acc, v| acc + v)
}
