//! Exact rationals and the few conversions the rest of the crate needs.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};

pub type Rational = Ratio<i128>;

pub fn ratio(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn to_f64(r: &Rational) -> f64 {
    // i128 -> f64 is exact enough for reporting; ratios never feed back into exact code.
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// `p/q`, or just `p` for integers.
pub fn format_exact(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn floor_i128(r: &Rational) -> i128 {
    Integer::div_floor(r.numer(), r.denom())
}

pub fn ceil_i128(r: &Rational) -> i128 {
    -Integer::div_floor(&-r.numer(), r.denom())
}

/// Parses `p/q`, an integer, or a finite decimal such as `-0.125` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || invalid(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(ratio(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let negative = mantissa.starts_with('-');
    let body = mantissa.trim_start_matches(['-', '+']);
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let mut num: i128 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let mut scale = exp - frac.len() as i32;
    let mut den: i128 = 1;
    while scale > 0 {
        num = num.checked_mul(10).ok_or_else(bad)?;
        scale -= 1;
    }
    while scale < 0 {
        den = den.checked_mul(10).ok_or_else(bad)?;
        scale += 1;
    }
    if negative {
        num = -num;
    }
    Ok(ratio(num, den))
}

/// Exact rational for a float via its shortest decimal representation.
pub fn from_f64_decimal(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(invalid(format!("non-finite number {x}")));
    }
    parse_rational(&format!("{x:?}"))
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive() && !r.is_zero()
}

/// Base-2 logarithm ceiling of a positive rational: least `j` with `2^j >= r`.
pub fn ceil_log2(r: &Rational) -> u32 {
    let mut j = 0u32;
    let mut p = Rational::one();
    while &p < r {
        p *= int(2);
        j += 1;
    }
    j
}
