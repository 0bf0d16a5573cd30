use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `[+|-]digits[/digits]`. The denominator must be positive.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = || Error::RationalLiteral(text.to_string());
    let s = text.trim();
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => match s.strip_prefix('\u{2212}') {
            Some(rest) => (true, rest),
            None => (false, s),
        },
    };
    let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d),
        None => (body, "1"),
    };
    if !digits(num) || !digits(den) {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    let value = Rational::new(num, den);
    Ok(if negative { -value } else { value })
}

pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

/// Bit size of a rational: the larger of numerator and denominator bit lengths.
pub fn bit_size(x: &Rational) -> u64 {
    x.numer().bits().max(x.denom().bits())
}

/// `sign(x)·⌊|x|·2^bits⌋ / 2^bits`, i.e. truncation toward zero.
pub fn truncate_rational(x: &Rational, bits: u64) -> Rational {
    let shifted: BigInt = x.numer() << bits;
    // BigInt division truncates toward zero.
    let q = shifted / x.denom();
    Rational::new(q, BigInt::one() << bits)
}

pub fn lcm_of_denominators<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Natural logarithm of a positive big integer.
pub fn ln_bigint(x: &BigInt) -> f64 {
    debug_assert!(x.is_positive());
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of a positive rational, accurate for huge numerators and denominators.
pub fn ln_rational(x: &Rational) -> f64 {
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

pub fn to_f64(x: &Rational) -> f64 {
    match x.to_f64() {
        Some(v) if v.is_finite() && (v != 0.0 || x.is_zero()) => v,
        _ => {
            let sign = if x.is_negative() { -1.0 } else { 1.0 };
            sign * ln_rational(&x.abs()).exp()
        }
    }
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::OutOfRange(format!("non-finite value {x}")))
}

/// Decimal rendering with `digits` significant figures; exact zero prints as "0".
pub fn to_decimal_string(x: &Rational, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let digits = digits.max(1);
    let a = x.abs();
    let ten = BigInt::from(10);
    let lo = num_traits::pow(ten.clone(), digits - 1);
    let hi = &lo * &ten;
    let mut e = (ln_rational(&a) / std::f64::consts::LN_10).floor() as i64;
    let mantissa = loop {
        let k = digits as i64 - 1 - e;
        let scaled = if k >= 0 {
            &a * Rational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            &a / Rational::from_integer(num_traits::pow(ten.clone(), (-k) as usize))
        };
        let s = scaled.floor().to_integer();
        if s >= hi {
            e += 1;
        } else if s < lo {
            e -= 1;
        } else {
            break s.to_string();
        }
    };
    let sign = if x.is_negative() { "-" } else { "" };
    let (head, tail) = mantissa.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}
