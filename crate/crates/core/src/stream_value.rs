//! Hyperreals as rational sequences, with horizon-bounded order and
//! standard-part detection.
//!
//! Every stream carries an evaluation budget: the largest index at which
//! it can be read in reasonable time. Closed forms are cheap at huge
//! indices, exponentials and iterated sums are not. Queries sample up to
//! the smaller of the requested horizon and the budget, and report the
//! horizon actually used.

use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, LazyLock, Mutex};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::exact_value::HyperSeries;
use crate::expr::{eval_scalar, eval_stream, parse, EvalContext, Expr};
use crate::rational::{biguint_to_q, pow10, Q};
use crate::verdict::{Estimate, Evidence, Outcome, Verdict};

/// Budget of closed-form streams.
pub static CLOSED_FORM_BUDGET: LazyLock<BigUint> = LazyLock::new(|| BigUint::one() << 128usize);
/// Budget of closed forms that grow exponentially in the index.
pub static EXPONENTIAL_BUDGET: LazyLock<BigUint> = LazyLock::new(|| BigUint::one() << 16usize);
/// Budget of streams computed by iteration over the index.
pub const ITERATIVE_BUDGET: u32 = 4096;

type Gen = Arc<dyn Fn(&BigUint) -> Result<Q> + Send + Sync>;

/// A hyperreal represented by a rational sequence `gen(1), gen(2), ...`.
#[derive(Clone)]
pub struct HyperStream {
    gen: Gen,
    label: String,
    budget: BigUint,
}

impl fmt::Debug for HyperStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HyperStream").field("label", &self.label).field("budget", &self.budget).finish()
    }
}

impl HyperStream {
    pub fn new(
        label: impl Into<String>,
        budget: BigUint,
        gen: impl Fn(&BigUint) -> Result<Q> + Send + Sync + 'static,
    ) -> Self {
        HyperStream { gen: Arc::new(gen), label: label.into(), budget }
    }

    pub fn at(&self, n: &BigUint) -> Result<Q> {
        (self.gen)(n)
    }

    pub fn at_u64(&self, n: u64) -> Result<Q> {
        self.at(&BigUint::from(n))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn budget(&self) -> &BigUint {
        &self.budget
    }

    pub fn constant(c: Q) -> Self {
        let label = format!("const:{}", crate::rational::render_exact(&c));
        HyperStream::new(label, CLOSED_FORM_BUDGET.clone(), move |_| Ok(c.clone()))
    }

    /// A closed-form expression in the index `n`.
    pub fn from_expr(e: &Expr, ctx: &EvalContext) -> Result<Self> {
        if let Some(v) = e.free_vars().into_iter().find(|v| v != "n") {
            return Err(Error::UnboundVariable(v));
        }
        Ok(eval_stream(e, ctx))
    }

    pub fn parse(src: &str, ctx: &EvalContext) -> Result<Self> {
        HyperStream::from_expr(&parse(src)?, ctx)
    }

    /// `n ↦ Σ_{k=from}^{n} term(k, n)`. Prefix sums are memoized when the
    /// term does not depend on `n`.
    pub fn partial_sum(term: &Expr, var: &str, from: i64, ctx: &EvalContext) -> Result<Self> {
        let vars = term.free_vars();
        if let Some(v) = vars.iter().find(|v| *v != var && *v != "n") {
            return Err(Error::UnboundVariable(v.clone()));
        }
        let uses_n = vars.contains("n") && var != "n";
        let term = Arc::new(term.clone());
        let var = var.to_string();
        let digits = ctx.precision;
        let label = format!("partial_sum:{from}:{term}");
        let eval_term = move |k: i64, n: &Q| -> Result<Q> {
            let lookup = |name: &str| -> Result<Coefficient> {
                if name == var {
                    Ok(Coefficient::exact(Q::from_integer(k.into())))
                } else if name == "n" {
                    Ok(Coefficient::exact(n.clone()))
                } else {
                    Err(Error::UnboundVariable(name.into()))
                }
            };
            eval_scalar(&term, &lookup, digits).map(|c| c.value().clone())
        };
        let prefix: Arc<Mutex<Vec<(BigInt, BigInt)>>> = Arc::new(Mutex::new(Vec::new()));
        Ok(HyperStream::new(label, BigUint::from(ITERATIVE_BUDGET), move |n: &BigUint| {
            let last = n.to_i64().ok_or_else(|| Error::Domain("partial sum index out of range".into()))?;
            let nq = biguint_to_q(n);
            if last < from {
                return Ok(Q::zero());
            }
            if uses_n {
                let mut acc = Q::zero();
                for k in from..=last {
                    acc += eval_term(k, &nq)?;
                }
                return Ok(acc);
            }
            let mut cache = prefix.lock().unwrap_or_else(|p| p.into_inner());
            let want = (last - from) as usize;
            while cache.len() <= want {
                let k = from + cache.len() as i64;
                let (num, den) = cache.last().cloned().unwrap_or_else(|| (BigInt::zero(), BigInt::one()));
                cache.push(accumulate(num, den, &eval_term(k, &nq)?));
            }
            let (num, den) = &cache[want];
            Ok(Q::new(num.clone(), den.clone()))
        }))
    }

    /// Decimal truncations of `sqrt(v)`: `n ↦ floor(sqrt(v)·10^n) / 10^n`.
    pub fn decimal_sqrt(v: Q) -> Result<Self> {
        if v.is_negative() {
            return Err(Error::Domain("sqrt of a negative value".into()));
        }
        let label = format!("decimal_sqrt:{}", crate::rational::render_exact(&v));
        Ok(HyperStream::new(label, BigUint::from(ITERATIVE_BUDGET), move |n: &BigUint| {
            let k = n.to_u32().ok_or_else(|| Error::Domain("index out of range".into()))?;
            let scale = pow10(k);
            let y: BigInt = (v.numer() * &scale * &scale) / v.denom();
            Ok(Q::new(y.sqrt(), scale))
        }))
    }

    /// The exact-tier value read at `eps = 1/n`: `n ↦ Σ a_i n^(-i)`.
    pub fn embed(x: &HyperSeries) -> Result<Self> {
        let coeffs = x.exact_coeffs().ok_or(Error::NonExactCoefficient)?;
        let v = x.valuation();
        let label = format!("embed({x})");
        Ok(HyperStream::new(label, CLOSED_FORM_BUDGET.clone(), move |n: &BigUint| {
            if n.is_zero() {
                return Err(Error::Domain("embedding at index 0".into()));
            }
            let nq = biguint_to_q(n);
            let inv = nq.recip();
            // Σ a_i n^-(v+i), Horner in 1/n
            let mut acc = Q::zero();
            for a in coeffs.iter().rev() {
                acc = acc * &inv + a;
            }
            let shift = if v >= 0 { num_traits::pow(inv, v as usize) } else { num_traits::pow(nq, (-v) as usize) };
            Ok(acc * shift)
        }))
    }

    /// Samples `(index, value)` along the schedule for horizon `h` (capped by
    /// the budget).
    pub fn sample(&self, h: &BigUint) -> Vec<(BigUint, Result<Q>)> {
        let h = h.min(&self.budget).clone();
        schedule(&h)
            .into_iter()
            .map(|n| {
                let v = self.at(&n);
                (n, v)
            })
            .collect()
    }
}

/// `num/den + t` without reducing: when one denominator divides the other
/// (geometric and decimal terms) no gcd of the growing sum is needed.
fn accumulate(num: BigInt, den: BigInt, t: &Q) -> (BigInt, BigInt) {
    let (tn, td) = (t.numer(), t.denom());
    if (&den % td).is_zero() {
        let f = &den / td;
        (num + tn * f, den)
    } else if (td % &den).is_zero() {
        let f = td / &den;
        (num * f + tn, td.clone())
    } else {
        let s = Q::new(num, den) + t;
        (s.numer().clone(), s.denom().clone())
    }
}

/// Pointwise sum.
pub fn s_add(x: &HyperStream, y: &HyperStream) -> HyperStream {
    let (a, b) = (x.clone(), y.clone());
    let budget = x.budget.clone().min(y.budget.clone());
    HyperStream::new(format!("({}) + ({})", x.label, y.label), budget, move |n| Ok(a.at(n)? + b.at(n)?))
}

/// Pointwise product.
pub fn s_mul(x: &HyperStream, y: &HyperStream) -> HyperStream {
    let (a, b) = (x.clone(), y.clone());
    let budget = x.budget.clone().min(y.budget.clone());
    HyperStream::new(format!("({}) * ({})", x.label, y.label), budget, move |n| Ok(a.at(n)? * b.at(n)?))
}

pub fn s_neg(x: &HyperStream) -> HyperStream {
    let a = x.clone();
    HyperStream::new(format!("-({})", x.label), x.budget.clone(), move |n| Ok(-a.at(n)?))
}

type NatGen = Arc<dyn Fn(&BigUint) -> BigUint + Send + Sync>;

/// A hypernatural: a sequence of naturals used as an index.
#[derive(Clone)]
pub struct HyperNat {
    gen: NatGen,
    /// Largest `j` with `gen(j) ≤ limit`, for a nondecreasing `gen`.
    reach: NatGen,
    label: String,
}

impl fmt::Debug for HyperNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl HyperNat {
    pub fn new(
        label: impl Into<String>,
        gen: impl Fn(&BigUint) -> BigUint + Send + Sync + 'static,
        reach: impl Fn(&BigUint) -> BigUint + Send + Sync + 'static,
    ) -> Self {
        HyperNat { gen: Arc::new(gen), reach: Arc::new(reach), label: label.into() }
    }

    pub fn identity() -> Self {
        HyperNat::new("n", |j| j.clone(), |l| l.clone())
    }

    pub fn square() -> Self {
        HyperNat::new("n^2", |j| j * j, |l| l.sqrt())
    }

    pub fn shift(k: u64) -> Self {
        HyperNat::new(
            format!("n+{k}"),
            move |j| j + k,
            move |l| if *l >= BigUint::from(k) { l - k } else { BigUint::zero() },
        )
    }

    pub fn pow2() -> Self {
        HyperNat::new(
            "2^n",
            |j| BigUint::one() << j.to_usize().unwrap_or(usize::MAX >> 8),
            |l| BigUint::from(l.bits().saturating_sub(1)),
        )
    }

    pub fn constant(c: u64) -> Self {
        HyperNat::new(format!("const:{c}"), move |_| BigUint::from(c), |l| l.clone())
    }

    /// The battery of unlimited indices used by the limit theorem.
    pub fn battery() -> [HyperNat; 4] {
        [HyperNat::identity(), HyperNat::square(), HyperNat::shift(7), HyperNat::pow2()]
    }

    pub fn at(&self, j: &BigUint) -> BigUint {
        (self.gen)(j)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// `j ↦ r(K(j))`: the sequence extended to a hypersequence and read at K.
pub fn extend_at(r: &HyperStream, k: &HyperNat) -> HyperStream {
    let (r2, k2) = (r.clone(), k.clone());
    let budget = (k.reach)(&r.budget);
    HyperStream::new(format!("{}[{}]", r.label, k.label), budget, move |j| r2.at(&k2.at(j)))
}

/// Sample indices for horizon `h`: powers of two, the quartiles of `h`,
/// and the predecessor of each, so parity patterns are visible.
pub fn schedule(h: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut p = BigUint::one();
    while &p <= h {
        out.push(p.clone());
        p <<= 1usize;
    }
    for num in 1u32..=4 {
        out.push(h * num / 4u32);
    }
    let preds: Vec<BigUint> = out.iter().filter(|p| **p >= BigUint::from(2u32)).map(|p| p - 1u32).collect();
    out.extend(preds);
    out.retain(|n| !n.is_zero());
    out.sort();
    out.dedup();
    out
}

fn effective(h: &BigUint, streams: &[&HyperStream]) -> BigUint {
    streams.iter().fold(h.clone(), |acc, s| acc.min(s.budget.clone()))
}

/// Order of `x` relative to `y` as seen along the sampling schedule.
pub fn s_compare(x: &HyperStream, y: &HyperStream, horizon: &BigUint) -> Verdict<Ordering> {
    let h = effective(horizon, &[x, y]);
    let signs: Vec<(BigUint, Ordering)> = schedule(&h)
        .into_iter()
        .filter_map(|n| match (x.at(&n), y.at(&n)) {
            (Ok(a), Ok(b)) => Some((n, a.cmp(&b))),
            _ => None,
        })
        .collect();
    let samples = signs.len();
    let quarter = &h * 3u32 / 4u32;
    let half = &h / 2u32;
    let top: Vec<&(BigUint, Ordering)> = signs.iter().filter(|(n, _)| *n >= quarter).collect();
    let ups: Vec<BigUint> = top.iter().filter(|(_, s)| *s == Ordering::Greater).map(|(n, _)| n.clone()).collect();
    let downs: Vec<BigUint> = top.iter().filter(|(_, s)| *s == Ordering::Less).map(|(n, _)| n.clone()).collect();
    if ups.len() >= 2 && downs.len() >= 2 {
        let mut witnesses: Vec<BigUint> = ups.into_iter().chain(downs).collect();
        witnesses.sort();
        return Verdict {
            outcome: Outcome::UndecidedUltrafilter,
            evidence: Evidence { stable_from: None, witnesses, samples },
            horizon: h,
        };
    }
    let tail: Vec<&(BigUint, Ordering)> = signs.iter().filter(|(n, _)| *n >= half).collect();
    let last = tail.last().map(|(_, s)| *s);
    match last {
        Some(s) if tail.len() >= 2 && tail.iter().all(|(_, t)| *t == s) => {
            let run_start = signs.iter().rposition(|(_, t)| *t != s).map_or(0, |i| i + 1);
            Verdict {
                outcome: Outcome::Decided(s),
                evidence: Evidence { stable_from: Some(signs[run_start].0.clone()), witnesses: Vec::new(), samples },
                horizon: h,
            }
        }
        _ => Verdict {
            outcome: Outcome::UndecidedHorizon,
            evidence: Evidence { stable_from: None, witnesses: tail.iter().map(|(n, _)| n.clone()).collect(), samples },
            horizon: h,
        },
    }
}

/// Standard part as the common value of the tail samples: Decided when all
/// samples in the top half of the schedule lie within `tol` of each other.
pub fn s_standard_part(x: &HyperStream, horizon: &BigUint, tol: &Q) -> Verdict<Estimate> {
    let h = effective(horizon, &[x]);
    let half = &h / 2u32;
    let all = x.sample(&h);
    let samples = all.len();
    let tail: Vec<(BigUint, Q)> =
        all.into_iter().filter(|(n, _)| *n >= half).filter_map(|(n, v)| v.ok().map(|v| (n, v))).collect();
    let undecided = |witnesses| Verdict {
        outcome: Outcome::UndecidedHorizon,
        evidence: Evidence { stable_from: None, witnesses, samples },
        horizon: h.clone(),
    };
    if tail.len() < 2 {
        return undecided(tail.into_iter().map(|(n, _)| n).collect());
    }
    let (imin, min) =
        tail.iter().enumerate().min_by(|a, b| a.1 .1.cmp(&b.1 .1)).map(|(i, v)| (i, v.1.clone())).unwrap_or_default();
    let (imax, max) =
        tail.iter().enumerate().max_by(|a, b| a.1 .1.cmp(&b.1 .1)).map(|(i, v)| (i, v.1.clone())).unwrap_or_default();
    if &max - &min > *tol {
        return undecided(vec![tail[imin].0.clone(), tail[imax].0.clone()]);
    }
    let value = (min + max) / Q::from_integer(2.into());
    Verdict {
        outcome: Outcome::Decided(Estimate { value, radius: tol.clone() }),
        evidence: Evidence { stable_from: Some(tail[0].0.clone()), witnesses: Vec::new(), samples },
        horizon: h,
    }
}
