use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::jet::taylor_coefficients;
use super::{Expr, Func};
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::exact_value::{HyperSeries, DEFAULT_WINDOW};
use crate::rational::{biguint_to_q, q, Q};
use crate::real;
use crate::stream_value::{HyperStream, CLOSED_FORM_BUDGET, EXPONENTIAL_BUDGET};

/// Variable bindings plus the working window and precision.
#[derive(Clone)]
pub struct EvalContext {
    pub window: usize,
    /// Decimal digits for transcendental coefficients.
    pub precision: u32,
    series: BTreeMap<String, HyperSeries>,
    streams: BTreeMap<String, HyperStream>,
}

impl Default for EvalContext {
    fn default() -> Self {
        EvalContext::new(DEFAULT_WINDOW, 50)
    }
}

impl EvalContext {
    pub fn new(window: usize, precision: u32) -> Self {
        EvalContext { window, precision, series: BTreeMap::new(), streams: BTreeMap::new() }
    }

    pub fn with_series(mut self, name: &str, v: HyperSeries) -> Self {
        self.series.insert(name.into(), v);
        self
    }

    pub fn with_stream(mut self, name: &str, s: HyperStream) -> Self {
        self.streams.insert(name.into(), s);
        self
    }

    pub fn bind_series(&mut self, name: &str, v: HyperSeries) {
        self.series.insert(name.into(), v);
    }

    pub fn series(&self, name: &str) -> Option<&HyperSeries> {
        self.series.get(name)
    }
}

fn domain_div(e: Error) -> Error {
    match e {
        Error::DivisionByZero => Error::Domain("division by zero".into()),
        e => e,
    }
}

fn exponent_i64(k: &BigInt) -> Result<i64> {
    k.to_i64().ok_or_else(|| Error::Domain(format!("exponent {k} is out of range")))
}

/// Applies an elementary function to a ball, widening the radius by a
/// Lipschitz bound of the function over the ball.
pub(crate) fn apply_ball(f: Func, x: &Coefficient, digits: u32) -> Result<Coefficient> {
    let target = real::bits_for_digits(digits);
    let m = x.value();
    let r = x.err();
    let at_mid = |v: &Q| -> Result<real::Approx> {
        Ok(match f {
            Func::Sin => real::sin_cos(v, target).0,
            Func::Cos => real::sin_cos(v, target).1,
            Func::Exp => real::exp(v, target)?,
            Func::Ln => real::ln(v, target)?,
            Func::Sqrt => real::sqrt(v, target)?,
            Func::Atan => real::atan(v, target),
            Func::Abs => (v.abs(), Q::zero()),
        })
    };
    if r.is_zero() {
        return Ok(Coefficient::from_approx(at_mid(m)?));
    }
    let lower = x.lower();
    let lipschitz = match f {
        Func::Abs => return Ok(x.abs()),
        Func::Sin | Func::Cos | Func::Atan => Q::one(),
        Func::Exp => {
            if r > &Q::one() {
                return Err(Error::PrecisionUndecided);
            }
            let (v, e) = real::exp(&x.upper(), target)?;
            v + e
        }
        Func::Ln | Func::Sqrt => {
            if !lower.is_positive() {
                return Err(if x.upper().is_positive() {
                    Error::PrecisionUndecided
                } else {
                    Error::Domain(format!("{} of a nonpositive value", f.name()))
                });
            }
            if f == Func::Ln {
                lower.recip()
            } else {
                let (v, e) = real::sqrt(&lower, target)?;
                let floor = v - e;
                if !floor.is_positive() {
                    return Err(Error::PrecisionUndecided);
                }
                (floor * q(2)).recip()
            }
        }
    };
    let (v, e) = at_mid(m)?;
    Ok(Coefficient::approx(v, e + lipschitz * r))
}

/// Evaluates at real (ball) values supplied by `lookup`.
pub fn eval_scalar(e: &Expr, lookup: &dyn Fn(&str) -> Result<Coefficient>, digits: u32) -> Result<Coefficient> {
    let rec = |x: &Expr| eval_scalar(x, lookup, digits);
    match e {
        Expr::Const(c) => Ok(Coefficient::exact(c.clone())),
        Expr::Var(v) => lookup(v),
        Expr::Add(a, b) => Ok(rec(a)?.add(&rec(b)?)),
        Expr::Sub(a, b) => Ok(rec(a)?.sub(&rec(b)?)),
        Expr::Mul(a, b) => Ok(rec(a)?.mul(&rec(b)?)),
        Expr::Div(a, b) => rec(a)?.div(&rec(b)?).map_err(domain_div),
        Expr::Neg(a) => Ok(rec(a)?.scale(&-Q::one())),
        Expr::Pow(b, ex) => {
            let base = rec(b)?;
            let k = ex.resolve(|name| {
                let c = lookup(name)?;
                c.as_exact().cloned().ok_or_else(|| Error::Domain(format!("exponent {name} is not exact")))
            })?;
            pow_scalar(&base, &k)
        }
        Expr::Call(f, a) => apply_ball(*f, &rec(a)?, digits),
    }
}

fn pow_scalar(base: &Coefficient, k: &BigInt) -> Result<Coefficient> {
    if let Some(b) = base.as_exact() {
        if b.abs().is_one() {
            let odd = k.is_odd();
            return Ok(Coefficient::exact(if b.is_negative() && odd { -Q::one() } else { Q::one() }));
        }
        if b.is_zero() {
            return match k.sign() {
                num_bigint::Sign::Plus => Ok(Coefficient::zero()),
                num_bigint::Sign::NoSign => Ok(Coefficient::one()),
                num_bigint::Sign::Minus => Err(Error::Domain("division by zero".into())),
            };
        }
    }
    base.powi(exponent_i64(k)?).map_err(domain_div)
}

/// Evaluates at exact rational values of the variables.
pub fn eval_point(e: &Expr, point: &[(&str, Q)], digits: u32) -> Result<Coefficient> {
    let lookup = |name: &str| -> Result<Coefficient> {
        point
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| Coefficient::exact(v.clone()))
            .ok_or_else(|| Error::UnboundVariable(name.into()))
    };
    eval_scalar(e, &lookup, digits)
}

/// Evaluates on the exact tier. Elementary functions expand as Taylor jets
/// around the standard part of their argument.
pub fn eval_series(e: &Expr, ctx: &EvalContext) -> Result<HyperSeries> {
    let w = ctx.window;
    let rec = |x: &Expr| eval_series(x, ctx);
    match e {
        Expr::Const(c) => Ok(HyperSeries::from_rational(c.clone(), w)),
        Expr::Var(v) => match ctx.series.get(v) {
            Some(s) => Ok(s.clone()),
            None if v == "eps" => Ok(HyperSeries::eps(w)),
            None if v == "H" => Ok(HyperSeries::big_h(w)),
            None => Err(Error::UnboundVariable(v.clone())),
        },
        Expr::Add(a, b) => rec(a)?.add(&rec(b)?),
        Expr::Sub(a, b) => rec(a)?.sub(&rec(b)?),
        Expr::Mul(a, b) => rec(a)?.mul(&rec(b)?),
        Expr::Div(a, b) => rec(a)?.div(&rec(b)?).map_err(domain_div),
        Expr::Neg(a) => Ok(rec(a)?.neg()),
        Expr::Pow(b, ex) => {
            let base = rec(b)?;
            let k = ex.resolve(|name| series_integer(ctx, name))?;
            let k = exponent_i64(&k)?;
            if base.is_zero() && k < 0 {
                return Err(Error::Domain("division by zero".into()));
            }
            base.powi(k).map_err(domain_div)
        }
        Expr::Call(f, a) => call_series(*f, &rec(a)?, ctx),
    }
}

fn series_integer(ctx: &EvalContext, name: &str) -> Result<Q> {
    let s = ctx.series.get(name).ok_or_else(|| Error::UnboundVariable(name.into()))?;
    if s.is_zero() {
        return Ok(Q::zero());
    }
    match (s.valuation(), s.exact_coeffs()) {
        (0, Some(c)) if c.len() == 1 && !s.is_truncated() => Ok(c[0].clone()),
        _ => Err(Error::Domain(format!("exponent {name} = {s} is not a standard integer"))),
    }
}

fn call_series(f: Func, x: &HyperSeries, ctx: &EvalContext) -> Result<HyperSeries> {
    let w = ctx.window;
    if f == Func::Abs {
        // order-based, so infinitesimals keep their sign information
        return Ok(match x.signum()? {
            Ordering::Less => x.neg(),
            _ => x.clone(),
        });
    }
    if x.classify() == crate::Classification::Unlimited {
        return match f {
            Func::Atan => {
                // atan(x) = sign(x)·π/2 - atan(1/x)
                let (pi, err) = real::pi(real::bits_for_digits(ctx.precision));
                let half = Coefficient::approx(pi / q(2), err / q(2));
                let half = if x.signum()? == Ordering::Less { half.scale(&-Q::one()) } else { half };
                let inner = call_series(Func::Atan, &x.inverse()?, ctx)?;
                HyperSeries::constant(half, w).sub(&inner)
            }
            Func::Sqrt if x.valuation() % 2 == 0 => sqrt_by_valuation(x, ctx),
            _ => Err(Error::UnlimitedArgument(format!("{}({x})", f.name()))),
        };
    }
    if f == Func::Sqrt && x.valuation() > 0 && !x.is_zero() {
        return sqrt_by_valuation(x, ctx);
    }
    let s = x.standard_part()?;
    match f {
        Func::Ln => match s.sign() {
            Some(Ordering::Greater) => {}
            Some(_) => return Err(Error::Domain(format!("ln({x}) has nonpositive standard part"))),
            None => return Err(Error::PrecisionUndecided),
        },
        Func::Sqrt => match s.sign() {
            Some(Ordering::Less) => return Err(Error::Domain(format!("sqrt({x}) has negative standard part"))),
            None => return Err(Error::PrecisionUndecided),
            _ => {}
        },
        _ => {}
    }
    let delta = x.infinitesimal_part()?;
    jet_sum(f, &s, &delta, ctx)
}

/// Σ c_k δ^k with c_k the Taylor coefficients of `f` at `s`.
fn jet_sum(f: Func, s: &Coefficient, delta: &HyperSeries, ctx: &EvalContext) -> Result<HyperSeries> {
    let w = ctx.window;
    if delta.is_zero() {
        let c = apply_ball(f, s, ctx.precision)?;
        return Ok(HyperSeries::constant(c, w));
    }
    let c = taylor_coefficients(f, s, 2 * w, ctx.precision)?;
    let first = c.iter().position(|c| !c.is_negligible()).unwrap_or(2 * w);
    let terms = (first + w).min(2 * w);
    let vd = delta.valuation();
    let mut acc = HyperSeries::constant(c[0].clone(), w);
    let mut power = HyperSeries::from_int(1, w);
    for ck in c.iter().take(terms).skip(1) {
        power = power.mul(delta)?;
        if !ck.is_zero() {
            acc = acc.add(&power.scale(ck)?)?;
        }
    }
    acc.truncate_at(vd * terms as i32)
}

/// sqrt(a·eps^(2m)·(1+u)) = sqrt(a)·eps^m·sqrt(1+u) for a positive leading
/// coefficient `a` and infinitesimal `u`.
fn sqrt_by_valuation(x: &HyperSeries, ctx: &EvalContext) -> Result<HyperSeries> {
    let w = ctx.window;
    let v = x.valuation();
    if v % 2 != 0 {
        return Err(Error::Domain(format!("sqrt({x}) is not a Laurent series in eps")));
    }
    let (lv, lead) = x.lead().ok_or(Error::PrecisionUndecided)?;
    if lv != v {
        return Err(Error::PrecisionUndecided);
    }
    if lead.sign() != Some(Ordering::Greater) {
        return Err(Error::Domain(format!("sqrt({x}) of a negative value")));
    }
    let unit = HyperSeries::monomial(lead.clone(), v, w);
    let u = x.div(&unit)?.sub(&HyperSeries::from_int(1, w))?;
    let tail = jet_sum(Func::Sqrt, &Coefficient::one(), &u, ctx)?;
    let root = apply_ball(Func::Sqrt, lead, ctx.precision)?;
    tail.mul(&HyperSeries::monomial(root, v / 2, w))
}

/// Pointwise evaluation along stream indices: `n` is the index, `eps` is
/// `1/n`, `H` is `n`, and stream-bound variables take their value at `n`.
/// Domain errors surface when the offending index is read.
pub fn eval_stream(e: &Expr, ctx: &EvalContext) -> HyperStream {
    let vars = e.free_vars();
    let bound: Vec<(String, HyperStream)> =
        ctx.streams.iter().filter(|(k, _)| vars.contains(*k)).map(|(k, v)| (k.clone(), v.clone())).collect();
    let mut growth_vars = vec!["n".to_string(), "H".to_string()];
    growth_vars.extend(bound.iter().map(|(k, _)| k.clone()));
    let exponential = growth_vars.iter().any(|v| e.grows_exponentially_in(v));
    let mut budget = if exponential { EXPONENTIAL_BUDGET.clone() } else { CLOSED_FORM_BUDGET.clone() };
    for (_, s) in &bound {
        budget = budget.min(s.budget().clone());
    }
    let expr = Arc::new(e.clone());
    let digits = ctx.precision;
    let label = e.to_string();
    HyperStream::new(label, budget, move |n: &BigUint| {
        let nq = biguint_to_q(n);
        let lookup = |name: &str| -> Result<Coefficient> {
            if let Some((_, s)) = bound.iter().find(|(k, _)| k == name) {
                return s.at(n).map(Coefficient::exact);
            }
            match name {
                "n" | "H" => Ok(Coefficient::exact(nq.clone())),
                "eps" if !nq.is_zero() => Ok(Coefficient::exact(nq.recip())),
                "eps" => Err(Error::Domain("eps at index 0".into())),
                _ => Err(Error::UnboundVariable(name.into())),
            }
        };
        eval_scalar(&expr, &lookup, digits).map(|c| c.value().clone())
    })
}
