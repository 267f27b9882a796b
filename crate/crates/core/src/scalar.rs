//! Numeric scalar abstraction for literal values, bounds and unit scales.
//!
//! Everything numeric in the crate (literal values, constraint bounds, unit
//! multipliers) is generic over [`Scalar`]. Three instantiations ship:
//! [`Exact`] (arbitrary-precision rational, the default used by the CLI),
//! `f64` and `f32`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Exact decimal arithmetic. Every finite decimal lexical form is represented
/// without rounding.
pub type Exact = BigRational;

/// Relative tolerance used for numeric literal equality.
pub const RELATIVE_TOLERANCE: &str = "1e-9";

/// Largest decimal exponent accepted when parsing.
const MAX_EXPONENT: i64 = 4096;

pub trait Scalar: Num + Signed + Clone + Debug + PartialOrd + Send + Sync + 'static {
    /// Parses a decimal lexical form. Returns `None` unless
    /// [`is_decimal_lexical`] accepts the input.
    fn parse_decimal(lexical: &str) -> Option<Self>;

    /// Canonical decimal rendering: no exponent, no trailing zeros, no
    /// trailing point.
    fn to_decimal_string(&self) -> String;

    fn to_f64(&self) -> f64;

    fn from_usize(n: usize) -> Self;

    fn relative_tolerance() -> Self {
        Self::parse_decimal(RELATIVE_TOLERANCE).expect("tolerance literal is a valid decimal")
    }
}

/// `|a - b| <= tol * max(|a|, |b|)`. Both zero compares equal.
pub fn approx_eq_rel<S: Scalar>(a: &S, b: &S, tol: &S) -> bool {
    let diff = (a.clone() - b.clone()).abs();
    let scale = {
        let (x, y) = (a.abs(), b.abs());
        if x > y {
            x
        } else {
            y
        }
    };
    diff <= tol.clone() * scale
}

/// Accepts `[+-]? (digits ('.' digits?)? | '.' digits) ([eE] [+-]? digits)?`.
pub fn is_decimal_lexical(s: &str) -> bool {
    split_decimal(s).is_some()
}

/// Accepts `[+-]? digits`.
pub fn is_integer_lexical(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
}

struct DecimalParts<'a> {
    negative: bool,
    int_digits: &'a str,
    frac_digits: &'a str,
    exponent: i64,
}

fn split_decimal(s: &str) -> Option<DecimalParts<'_>> {
    let (negative, rest) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match rest.find(['e', 'E']) {
        Some(pos) => {
            let exp = &rest[pos + 1..];
            if !is_integer_lexical(exp) {
                return None;
            }
            let value: i64 = exp.parse().ok()?;
            if value.abs() > MAX_EXPONENT {
                return None;
            }
            (&rest[..pos], value)
        }
        None => (rest, 0),
    };
    let (int_digits, frac_digits) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    let digits = |d: &str| d.bytes().all(|b| b.is_ascii_digit());
    if !digits(int_digits) || !digits(frac_digits) || (int_digits.is_empty() && frac_digits.is_empty()) {
        return None;
    }
    Some(DecimalParts {
        negative,
        int_digits,
        frac_digits,
        exponent,
    })
}

fn pow10(exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), exp as usize)
}

impl Scalar for Exact {
    fn parse_decimal(lexical: &str) -> Option<Self> {
        let parts = split_decimal(lexical)?;
        let mut digits = String::with_capacity(parts.int_digits.len() + parts.frac_digits.len());
        digits.push_str(parts.int_digits);
        digits.push_str(parts.frac_digits);
        let mut mantissa: BigInt = digits.parse().ok()?;
        if parts.negative {
            mantissa = -mantissa;
        }
        let scale = parts.frac_digits.len() as i64 - parts.exponent;
        let value = if scale >= 0 {
            BigRational::new(mantissa, pow10(scale as u32))
        } else {
            BigRational::from_integer(mantissa * pow10((-scale) as u32))
        };
        Some(value)
    }

    fn to_decimal_string(&self) -> String {
        if self.is_integer() {
            return self.numer().to_string();
        }
        // Terminating iff the reduced denominator has no prime factors besides 2 and 5.
        let mut den = self.denom().clone();
        let (two, five) = (BigInt::from(2u32), BigInt::from(5u32));
        let (mut twos, mut fives) = (0u32, 0u32);
        while den.is_even() {
            den /= &two;
            twos += 1;
        }
        while (&den % &five).is_zero() {
            den /= &five;
            fives += 1;
        }
        if !den.is_one() {
            return f64_decimal_string(Scalar::to_f64(self));
        }
        let places = twos.max(fives);
        let scaled = (self * BigRational::from_integer(pow10(places))).to_integer();
        let negative = scaled.is_negative();
        let mut digits = scaled.abs().to_string();
        let places = places as usize;
        if digits.len() <= places {
            digits = format!("{}{}", "0".repeat(places + 1 - digits.len()), digits);
        }
        let (int_part, frac_part) = digits.split_at(digits.len() - places);
        let frac_part = frac_part.trim_end_matches('0');
        let sign = if negative { "-" } else { "" };
        if frac_part.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_usize(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

fn f64_decimal_string(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x}")
}

impl Scalar for f64 {
    fn parse_decimal(lexical: &str) -> Option<Self> {
        split_decimal(lexical)?;
        lexical.parse::<f64>().ok().filter(|v| v.is_finite())
    }

    fn to_decimal_string(&self) -> String {
        f64_decimal_string(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_usize(n: usize) -> Self {
        n as f64
    }
}

impl Scalar for f32 {
    fn parse_decimal(lexical: &str) -> Option<Self> {
        split_decimal(lexical)?;
        lexical.parse::<f32>().ok().filter(|v| v.is_finite())
    }

    fn to_decimal_string(&self) -> String {
        if *self == 0.0 {
            return "0".to_string();
        }
        format!("{self}")
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn from_usize(n: usize) -> Self {
        n as f32
    }
}
