//! Small helpers around `BigRational`: literal parsing, decimal rendering,
//! dyadic rounding.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q2(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), k as usize)
}

pub fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

/// 2^k as a rational, for any sign of `k`.
pub fn dyadic(k: i64) -> Q {
    if k >= 0 {
        Q::from_integer(pow2(k as u64))
    } else {
        Q::new(BigInt::one(), pow2(k.unsigned_abs()))
    }
}

/// Parses `17`, `-3/4`, `0.125`, `1e-8`, `2.5E3`.
pub fn parse_rational(src: &str) -> Result<Q> {
    let s = src.trim();
    let bad = || Error::InvalidArgument(format!("not a rational literal: {src:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, d)) = s.split_once('/') {
        let p = parse_rational(p)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(p / d);
    }
    let (neg, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let mut v = if scale >= 0 {
        Q::from_integer(numer * pow10(scale as u32))
    } else {
        Q::new(numer, pow10(scale.unsigned_abs()))
    };
    if neg {
        v = -v;
    }
    Ok(v)
}

/// Exact rendering: `p` or `p/q`.
/// gcd with one Euclid step first: the binary algorithm is quadratic in the
/// size gap, which dominates when a small factor meets a huge denominator.
pub fn gcd_fast(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    let (a, b) = (a.abs(), b.abs());
    let (small, large) = if a.bits() <= b.bits() { (a, b) } else { (b, a) };
    if small.is_zero() {
        return large;
    }
    small.gcd(&(large % &small))
}

/// Product of two reduced fractions, cancelling crosswise with [`gcd_fast`].
pub fn q_mul(a: &Q, b: &Q) -> Q {
    let g1 = gcd_fast(a.numer(), b.denom());
    let g2 = gcd_fast(a.denom(), b.numer());
    Q::new_raw((a.numer() / &g1) * (b.numer() / &g2), (a.denom() / &g2) * (b.denom() / &g1))
}

pub fn render_exact(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Decimal rendering truncated toward zero after `places` fractional digits.
/// Integers are rendered without a fractional part.
pub fn render_decimal(v: &Q, places: usize) -> String {
    if v.is_integer() {
        return v.numer().to_string();
    }
    let neg = v.is_negative();
    let a = v.abs();
    let scaled = (a.numer() * pow10(places as u32)) / a.denom();
    let mut digits = scaled.to_string();
    if digits.len() <= places {
        digits = format!("{}{}", "0".repeat(places + 1 - digits.len()), digits);
    }
    let (ip, fp) = digits.split_at(digits.len() - places);
    let fp = fp.trim_end_matches('0');
    let body = if fp.is_empty() { ip.to_string() } else { format!("{ip}.{fp}") };
    if neg && body.chars().any(|c| c != '0' && c != '.') {
        format!("-{body}")
    } else {
        body
    }
}

/// Approximate base-2 logarithm of |v| (floor-ish), `None` for zero.
pub fn log2_floor(v: &Q) -> Option<i64> {
    if v.is_zero() {
        return None;
    }
    let n = v.numer().bits() as i64;
    let d = v.denom().bits() as i64;
    Some(n - d)
}

/// Rounds `v` to the nearest multiple of 2^-bits.
pub fn round_dyadic(v: &Q, bits: u64) -> Q {
    let scaled = v * Q::from_integer(pow2(bits));
    Q::new(scaled.round().to_integer(), pow2(bits))
}

/// Rounds a nonnegative `v` up to a multiple of 2^-bits.
pub fn ceil_dyadic(v: &Q, bits: u64) -> Q {
    let scaled = v * Q::from_integer(pow2(bits));
    Q::new(scaled.ceil().to_integer(), pow2(bits))
}

pub fn to_f64(v: &Q) -> f64 {
    if let (Some(n), Some(d)) = (v.numer().to_f64(), v.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Large operands: shift both to 60 significant bits first.
    let nb = v.numer().bits() as i64;
    let db = v.denom().bits() as i64;
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n = (v.numer() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (v.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((shift_n - shift_d) as i32)
}

pub fn biguint_to_q(n: &BigUint) -> Q {
    Q::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
}

/// Floor of a nonnegative rational as a natural.
pub fn floor_nat(v: &Q) -> BigUint {
    v.floor().to_integer().to_biguint().unwrap_or_default()
}

pub fn is_integer(v: &Q) -> bool {
    v.denom().is_one()
}

pub fn integer_sqrt_exact(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

/// Decimal rendering rounded to the nearest multiple of 10^-places.
pub fn render_rounded(v: &Q, places: usize) -> String {
    let unit = Q::new(BigInt::one(), pow10(places as u32));
    let r = (v / &unit).round() * unit;
    render_decimal(&r, places)
}
