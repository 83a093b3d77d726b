//! Fixed-point evaluation of the elementary functions at exact rational
//! points. Every routine returns a rational midpoint and an absolute error
//! bound; arguments where the function value is rational (exp 0, ln 1,
//! sqrt of a square, ...) come back exact.
//!
//! Internally a value `m` stands for `m / 2^bits`. The working precision
//! carries 64 guard bits over the requested target plus whatever the
//! argument reduction consumes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{dyadic, integer_sqrt_exact, pow2, Q};

const GUARD: u64 = 64;

/// Target bit count for `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> u64 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 8
}

/// (midpoint, absolute error bound)
pub type Approx = (Q, Q);

fn exact(v: Q) -> Approx {
    (v, Q::zero())
}

fn to_fixed(v: &Q, bits: u64) -> BigInt {
    (v.numer() << bits as usize).div_floor(v.denom())
}

fn fx_mul(a: &BigInt, b: &BigInt, bits: u64) -> BigInt {
    (a * b) >> bits as usize
}

fn fx_div(a: &BigInt, b: &BigInt, bits: u64) -> BigInt {
    (a << bits as usize).div_floor(b)
}

/// Rounds a fixed-point result at `work` bits down to `target + 16` bits and
/// attaches the error claim `2^-target * (1 + |v|)`.
fn finish(m: BigInt, work: u64, target: u64) -> Approx {
    let keep = target + 16;
    let v = if work > keep {
        let shift = work - keep;
        let half = BigInt::one() << (shift as usize - 1);
        Q::new((m + half) >> shift as usize, pow2(keep))
    } else {
        Q::new(m, pow2(work))
    };
    let err = dyadic(-(target as i64)) * (Q::one() + v.abs());
    (v, err)
}

fn guard_for(v: &Q) -> u64 {
    let mag = v.abs().ceil().to_integer();
    mag.bits()
}

/// Σ_{k≥0} (-1)^k x^(2k+1)/(2k+1) for fixed-point |x| well below 1.
fn atan_series(x: &BigInt, bits: u64) -> BigInt {
    let x2 = fx_mul(x, x, bits);
    let mut power = x.clone();
    let mut sum = x.clone();
    let mut k = 1u64;
    loop {
        power = -fx_mul(&power, &x2, bits);
        let term = &power / BigInt::from(2 * k + 1);
        if term.is_zero() {
            break;
        }
        sum += term;
        k += 1;
    }
    sum
}

/// atan(1/n) for a small integer n, fixed point.
fn atan_inv(n: u64, bits: u64) -> BigInt {
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let mut power = (BigInt::one() << bits as usize) / &n;
    let mut sum = power.clone();
    let mut k = 1u64;
    loop {
        power = -(&power / &n2);
        let term = &power / BigInt::from(2 * k + 1);
        if term.is_zero() {
            break;
        }
        sum += term;
        k += 1;
    }
    sum
}

fn pi_fixed(bits: u64) -> BigInt {
    let b = bits + 8;
    let v = (atan_inv(5, b) * 16) - (atan_inv(239, b) * 4);
    v >> 8usize
}

/// 2·atanh(z) = ln((1+z)/(1-z)) for small fixed-point z.
fn atanh2(z: &BigInt, bits: u64) -> BigInt {
    let z2 = fx_mul(z, z, bits);
    let mut power = z.clone();
    let mut sum = z.clone();
    let mut k = 1u64;
    loop {
        power = fx_mul(&power, &z2, bits);
        let term = &power / BigInt::from(2 * k + 1);
        if term.is_zero() {
            break;
        }
        sum += term;
        k += 1;
    }
    sum * 2
}

fn ln2_fixed(bits: u64) -> BigInt {
    let third = (BigInt::one() << bits as usize) / 3;
    atanh2(&third, bits)
}

pub fn pi(target: u64) -> Approx {
    let work = target + GUARD;
    finish(pi_fixed(work), work, target)
}

/// Largest binary exponent `exp` will materialize, about `exp(726_817)`.
pub const EXP_MAX_BITS: u64 = 1 << 20;

pub fn exp(x: &Q, target: u64) -> Result<Approx> {
    if x.is_zero() {
        return Ok(exact(Q::one()));
    }
    if x.is_positive() && crate::rational::to_f64(x) / std::f64::consts::LN_2 > EXP_MAX_BITS as f64 {
        return Err(Error::Domain(format!("exp overflow: argument above {EXP_MAX_BITS}·ln 2")));
    }
    if x.is_negative() && crate::rational::to_f64(x) / std::f64::consts::LN_2 < -((target + 64) as f64) {
        // below the last represented bit
        return Ok((Q::zero(), crate::rational::dyadic(-(target as i64))));
    }
    // exp(x) = 2^k · exp(r), |r| ≤ ln2/2, and exp(r) = exp(r/256)^256.
    let approx_k = (crate::rational::to_f64(x) / std::f64::consts::LN_2).round();
    let work = target + GUARD + guard_for(x) + 8;
    let xf = to_fixed(x, work);
    let ln2 = ln2_fixed(work);
    let k = if approx_k.is_finite() && approx_k.abs() < 1e15 {
        BigInt::from(approx_k as i64)
    } else {
        let (q, _) = xf.div_mod_floor(&ln2);
        q
    };
    let r = &xf - &k * &ln2;
    let scaled = &r >> 8usize;
    let one = BigInt::one() << work as usize;
    let mut sum = one.clone();
    let mut term = one;
    let mut i = 1u64;
    loop {
        term = fx_mul(&term, &scaled, work) / BigInt::from(i);
        if term.is_zero() {
            break;
        }
        sum += &term;
        i += 1;
    }
    for _ in 0..8 {
        sum = fx_mul(&sum, &sum, work);
    }
    let shifted = if k.is_negative() {
        let s: u64 = (-&k).try_into().unwrap_or(u64::MAX);
        if s > work + target + 64 {
            BigInt::zero()
        } else {
            sum >> s as usize
        }
    } else {
        let s: u64 = (&k).try_into().unwrap_or(u64::MAX);
        sum << s as usize
    };
    Ok(finish(shifted, work, target))
}

pub fn ln(x: &Q, target: u64) -> Result<Approx> {
    if !x.is_positive() {
        return Err(Error::Domain("ln of a nonpositive value".into()));
    }
    if x.is_one() {
        return Ok(exact(Q::zero()));
    }
    // x = 2^k · m with m in [1/2, 2]
    let k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let m = x * dyadic(-k);
    let work = target + GUARD + (k.unsigned_abs().max(1)).ilog2() as u64 + 2;
    let mf = to_fixed(&m, work);
    let one = BigInt::one() << work as usize;
    let z = fx_div(&(&mf - &one), &(&mf + &one), work);
    let ln_m = atanh2(&z, work);
    let total = ln_m + ln2_fixed(work) * BigInt::from(k);
    Ok(finish(total, work, target))
}

pub fn sqrt(x: &Q, target: u64) -> Result<Approx> {
    if x.is_negative() {
        return Err(Error::Domain("sqrt of a negative value".into()));
    }
    if x.is_zero() {
        return Ok(exact(Q::zero()));
    }
    if let (Some(n), Some(d)) = (integer_sqrt_exact(x.numer()), integer_sqrt_exact(x.denom())) {
        return Ok(exact(Q::new(n, d)));
    }
    let work = target + GUARD;
    // sqrt(p/q) = sqrt(p·q)/q
    let pq = x.numer() * x.denom();
    let root = (pq << (2 * work) as usize).sqrt();
    let m = root.div_floor(x.denom());
    Ok(finish(m, work, target))
}

pub fn atan(x: &Q, target: u64) -> Approx {
    if x.is_zero() {
        return exact(Q::zero());
    }
    let work = target + GUARD;
    let total = atan_fixed(x, work);
    finish(total, work, target)
}

fn atan_fixed(x: &Q, work: u64) -> BigInt {
    if x.abs() > Q::one() {
        let half_pi = pi_fixed(work) >> 1usize;
        let inner = atan_fixed(&x.recip(), work);
        return if x.is_positive() { half_pi - inner } else { -half_pi - inner };
    }
    // Two half-angle steps bring |x| below tan(pi/16).
    let one = BigInt::one() << work as usize;
    let mut xf = to_fixed(x, work);
    for _ in 0..2 {
        let x2 = fx_mul(&xf, &xf, work);
        let s = ((&one + x2) << work as usize).sqrt();
        xf = fx_div(&xf, &(&one + s), work);
    }
    atan_series(&xf, work) * 4
}

/// (sin x, cos x)
pub fn sin_cos(x: &Q, target: u64) -> (Approx, Approx) {
    if x.is_zero() {
        return (exact(Q::zero()), exact(Q::one()));
    }
    let work = target + GUARD + guard_for(x) + 4;
    let pi = pi_fixed(work);
    let half_pi = &pi >> 1usize;
    let xf = to_fixed(x, work);
    // quadrant k = round(x / (pi/2))
    let (mut k, mut r) = xf.div_mod_floor(&half_pi);
    if &r + &r > half_pi {
        k += 1;
        r -= &half_pi;
    }
    let one = BigInt::one() << work as usize;
    let r2 = fx_mul(&r, &r, work);
    let mut s = r.clone();
    let mut c = one.clone();
    let mut ts = r.clone();
    let mut tc = one;
    let mut i = 1u64;
    loop {
        ts = -fx_mul(&ts, &r2, work) / BigInt::from((2 * i) * (2 * i + 1));
        tc = -fx_mul(&tc, &r2, work) / BigInt::from((2 * i - 1) * (2 * i));
        if ts.is_zero() && tc.is_zero() {
            break;
        }
        s += &ts;
        c += &tc;
        i += 1;
    }
    let quadrant = k.mod_floor(&BigInt::from(4u8));
    let q: u8 = quadrant.try_into().unwrap_or(0);
    let (sv, cv) = match q {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    };
    (finish(sv, work, target), finish(cv, work, target))
}
