//! Real coefficients: exact rationals, or rational midpoints with an
//! absolute error radius (ball arithmetic).

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{ceil_dyadic, log2_floor, render_decimal, render_exact, round_dyadic, Q};
use crate::real;

/// A real number known either exactly or to within `err`.
///
/// `err == 0` means exact; approximate coefficients always carry a
/// strictly positive radius.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coefficient {
    value: Q,
    err: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Exact,
    Approx,
}

impl Coefficient {
    pub fn exact(value: Q) -> Self {
        Coefficient { value, err: Q::zero() }
    }

    pub fn approx(value: Q, err: Q) -> Self {
        debug_assert!(!err.is_negative());
        Coefficient { value, err }.tidy()
    }

    pub fn from_approx((value, err): real::Approx) -> Self {
        Coefficient::approx(value, err)
    }

    pub fn zero() -> Self {
        Coefficient::exact(Q::zero())
    }

    pub fn one() -> Self {
        Coefficient::exact(Q::one())
    }

    pub fn kind(&self) -> Kind {
        if self.err.is_zero() {
            Kind::Exact
        } else {
            Kind::Approx
        }
    }

    pub fn is_exact(&self) -> bool {
        self.err.is_zero()
    }

    pub fn value(&self) -> &Q {
        &self.value
    }

    pub fn err(&self) -> &Q {
        &self.err
    }

    pub fn as_exact(&self) -> Option<&Q> {
        self.is_exact().then_some(&self.value)
    }

    /// Exactly zero (not merely indistinguishable from it).
    pub fn is_zero(&self) -> bool {
        self.value.is_zero() && self.err.is_zero()
    }

    /// The ball contains zero.
    pub fn is_negligible(&self) -> bool {
        self.value.abs() <= self.err
    }

    /// Sign when the ball excludes zero (or the value is exactly zero).
    pub fn sign(&self) -> Option<Ordering> {
        if self.is_zero() {
            Some(Ordering::Equal)
        } else if self.value.abs() > self.err {
            Some(self.value.cmp(&Q::zero()))
        } else {
            None
        }
    }

    pub fn lower(&self) -> Q {
        &self.value - &self.err
    }

    pub fn upper(&self) -> Q {
        &self.value + &self.err
    }

    /// Upper bound of |x| over the ball.
    pub fn magnitude(&self) -> Q {
        self.value.abs() + &self.err
    }

    pub fn contains(&self, v: &Q) -> bool {
        (&self.value - v).abs() <= self.err
    }

    /// Keeps approximate midpoints and radii from growing without bound:
    /// midpoints are rounded to about 2^-20 of the radius, radii rounded up.
    fn tidy(self) -> Self {
        if self.err.is_zero() {
            return self;
        }
        let lg = log2_floor(&self.err).unwrap_or(0);
        let bits = (22 - lg).max(0) as u64;
        let value = round_dyadic(&self.value, bits);
        let rounding = (&value - &self.value).abs();
        let err = ceil_dyadic(&(self.err + rounding), bits + 10);
        Coefficient { value, err }
    }

    pub fn add(&self, o: &Self) -> Self {
        Coefficient { value: &self.value + &o.value, err: &self.err + &o.err }.tidy()
    }

    pub fn sub(&self, o: &Self) -> Self {
        Coefficient { value: &self.value - &o.value, err: &self.err + &o.err }.tidy()
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_exact() && o.is_exact() {
            return Coefficient::exact(crate::rational::q_mul(&self.value, &o.value));
        }
        let value = &self.value * &o.value;
        let err = self.value.abs() * &o.err + o.value.abs() * &self.err + &self.err * &o.err;
        Coefficient { value, err }.tidy()
    }

    pub fn scale(&self, k: &Q) -> Self {
        Coefficient { value: &self.value * k, err: &self.err * k.abs() }.tidy()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_exact() {
            return Ok(Coefficient::exact(self.value.recip()));
        }
        let a = self.value.abs();
        if a <= self.err {
            return Err(Error::PrecisionUndecided);
        }
        // |1/x - 1/m| ≤ e / (|m| (|m| - e))
        let err = &self.err / (&a * (&a - &self.err));
        Ok(Coefficient { value: self.value.recip(), err }.tidy())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.recip()?))
    }

    /// |x| is 1-Lipschitz, so the radius carries over unchanged.
    pub fn abs(&self) -> Self {
        Coefficient { value: self.value.abs(), err: self.err.clone() }
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        if self.is_exact() {
            if let Ok(k) = i32::try_from(n) {
                if self.is_zero() && k < 0 {
                    return Err(Error::DivisionByZero);
                }
                // powers of a reduced fraction stay reduced
                return Ok(Coefficient::exact(self.value.pow(k)));
            }
        }
        let mut base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Coefficient::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Decimal places that are meaningful given the radius.
    pub fn meaningful_places(&self) -> usize {
        match log2_floor(&self.err) {
            None => 0,
            Some(lg) => ((-lg as f64) * std::f64::consts::LOG10_2).floor().max(0.0) as usize,
        }
    }

    /// Decimal rendering with a fixed number of places (exact values too).
    pub fn to_decimal(&self, places: usize) -> String {
        render_decimal(&self.value, places)
    }
}

impl fmt::Display for Coefficient {
    /// Exact values as `p/q`; approximate values as a decimal truncated to the
    /// digits the radius supports.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            f.write_str(&render_exact(&self.value))
        } else {
            f.write_str(&render_decimal(&self.value, self.meaningful_places()))
        }
    }
}

impl From<Q> for Coefficient {
    fn from(v: Q) -> Self {
        Coefficient::exact(v)
    }
}
