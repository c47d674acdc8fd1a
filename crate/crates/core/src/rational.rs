//! Exact rational parsing, directed conversion to `f64`, and decimal rendering.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
pub use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Rounding direction for conversions out of exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p/q`, an integer, or a decimal literal such as `11.5` or `1e-6`.
/// Decimal literals are read exactly, never through binary floating point.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: `{text}`"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if ip.is_empty() && fp.is_empty() || !(ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit())) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{ip}{fp}").parse().map_err(|_| bad())?;
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * Pow::pow(&ten, scale as u32))
    } else {
        BigRational::new(digits, Pow::pow(&ten, (-scale) as u32))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// Renders `num/den` (or just `num` for integers).
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest `f64` on the requested side of `r`.
pub fn to_f64(r: &BigRational, round: Round) -> f64 {
    let mut v = r.to_f64().unwrap_or(if r.is_positive() { f64::MAX } else { f64::MIN });
    if !v.is_finite() {
        v = if v > 0.0 { f64::MAX } else { f64::MIN };
    }
    let exact = BigRational::from_float(v).expect("finite");
    match (round, exact.cmp(r)) {
        (Round::Down, Ordering::Greater) => v.next_down(),
        (Round::Up, Ordering::Less) => v.next_up(),
        _ => v,
    }
}

/// Decimal string of `r` with `places` fractional digits, rounded in the
/// given direction.
pub fn format_decimal(r: &BigRational, places: u32, round: Round) -> String {
    let scale = Pow::pow(&BigInt::from(10), places);
    let scaled = r * BigRational::from_integer(scale.clone());
    let n = match round {
        Round::Down => scaled.floor().to_integer(),
        Round::Up => scaled.ceil().to_integer(),
    };
    let neg = n.sign() == Sign::Minus;
    let (ip, fp) = n.abs().div_rem(&scale);
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = places as usize)
    }
}

/// `2^-bits` as a rational.
pub fn pow2_neg(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}

/// Largest `b` with `w <= 2^-b`, i.e. the number of certified binary digits
/// of an interval of width `w`.
pub fn certified_bits(width: &BigRational) -> u32 {
    if width.is_zero() {
        return u32::MAX;
    }
    // w <= 2^-b  <=>  den >= num * 2^b
    let num = width.numer().magnitude();
    let den = width.denom().magnitude();
    let mut b = den.bits().saturating_sub(num.bits()).saturating_sub(1) as u32;
    while (num << (b + 1) as usize) <= *den {
        b += 1;
    }
    b
}
