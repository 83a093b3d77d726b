//! The infinitesimal delta kernel `α / (α² + (μ − a)²)`: exact evaluation on
//! the series tier and a quadrature probe on representative sequences.

use std::cmp::Ordering;

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::exact_value::{Classification, HyperSeries};
use crate::expr::{eval_f64, eval_point, eval_series, EvalContext, Expr, Func, UnaryFn};
use crate::rational::{q, q2, to_f64, Q};
use crate::real;
use crate::verdict::{Outcome, Property};

/// Successive Simpson estimates must agree this closely.
pub const QUADRATURE_TOL: f64 = 1e-10;
/// Doubling stops with `QuadratureNonconvergent` beyond this many cells.
const MAX_CELLS: usize = 1 << 26;
const MIN_CELLS: usize = 64;

fn require_positive_infinitesimal(name: &str, v: &HyperSeries) -> Result<()> {
    if v.classify() != Classification::Infinitesimal || v.signum()? != Ordering::Greater {
        return Err(Error::InvalidArgument(format!("{name} = {v} must be a positive infinitesimal")));
    }
    Ok(())
}

fn atan_series(r: &HyperSeries, ctx: &EvalContext) -> Result<HyperSeries> {
    let c = ctx.clone().with_series("r", r.clone());
    eval_series(&Expr::call(Func::Atan, Expr::var("r")), &c)
}

/// Kernel mass `(1/2)·∫ 2α dμ / (α² + (μ−a)²)` over `[a − eps, a + eps]`,
/// i.e. `atan(eps/alpha)`.
pub fn delta_weight(alpha: &HyperSeries, eps: &HyperSeries, ctx: &EvalContext) -> Result<HyperSeries> {
    require_positive_infinitesimal("alpha", alpha)?;
    require_positive_infinitesimal("eps", eps)?;
    atan_series(&eps.div(alpha)?, ctx)
}

/// `(1/2)·∫_{a−eps}^{a+eps} F(μ) α dμ / (α² + (μ−a)²)` on the series tier.
///
/// With `μ = a + αt` the integral becomes `(1/2)∫ F(a + αt) dt / (1 + t²)`
/// over `|t| ≤ R = eps/alpha`. Expanding `F(a + αt) = Σ c_j α^j t^j`, the odd
/// moments vanish and the even ones are
/// `∫ t^{2m}/(1+t²) = 2·Σ_{i<m} (−1)^i R^{2m−1−2i}/(2m−1−2i) + (−1)^m·2·atan(R)`.
/// Each `α^{2m} R^p` is formed as `α^{2m−p} eps^p` so no unlimited power is
/// ever materialized.
pub fn delta_symbolic(
    f: &UnaryFn,
    a: &Q,
    alpha: &HyperSeries,
    eps: &HyperSeries,
    ctx: &EvalContext,
) -> Result<HyperSeries> {
    require_positive_infinitesimal("alpha", alpha)?;
    require_positive_infinitesimal("eps", eps)?;
    let r = eps.div(alpha)?;
    if r.classify() != Classification::Unlimited {
        return Err(Error::HypothesisViolation(format!("eps/alpha = {r} is not unlimited")));
    }
    let w = ctx.window;
    let mut c = ctx.clone();
    let point = HyperSeries::from_rational(a.clone(), w).add(&HyperSeries::eps(w))?;
    c.bind_series(&f.var, point);
    let jet = eval_series(&f.expr, &c)?;
    if jet.classify() == Classification::Unlimited {
        return Err(Error::Domain(format!("{f} has a pole at {a}")));
    }
    // Coefficients c_j with j below `known` are available.
    let known = match jet.order() {
        Some(k) => k,
        None => match jet.lead() {
            None => 0,
            Some(_) => jet.valuation() + jet.coeffs().len() as i32,
        },
    };
    let at = atan_series(&r, ctx)?;
    let mut total = HyperSeries::zero(w);
    let mut m = 0i32;
    while 2 * m < known {
        let cj = jet.coeff(2 * m);
        if !cj.is_zero() {
            let mut term = at.mul(&alpha.powi(2 * m as i64)?)?;
            if m % 2 == 1 {
                term = term.neg();
            }
            for i in 0..m {
                let p = 2 * m - 1 - 2 * i;
                let mut piece = alpha
                    .powi((1 + 2 * i) as i64)?
                    .mul(&eps.powi(p as i64)?)?
                    .scale(&Coefficient::exact(q2(1, p as i64)))?;
                if i % 2 == 1 {
                    piece = piece.neg();
                }
                term = term.add(&piece)?;
            }
            total = total.add(&term.scale(&cj)?)?;
        }
        m += 1;
    }
    if jet.order().is_some() {
        // First omitted even moment.
        let ke = known + known.rem_euclid(2);
        let va = alpha.valuation();
        let ve = eps.valuation();
        let cut = (va + (ke - 1) * ve).min(ke * va);
        total = total.truncate_at(cut)?;
    }
    Ok(total)
}

/// One row of the probe table.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow {
    pub n: u64,
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Debug)]
pub struct DeltaResult {
    /// The half-integral at the infinitesimals generated by the rules.
    pub symbolic: Result<HyperSeries>,
    /// `(π/2)·F(a)`.
    pub target: Coefficient,
    pub probe_table: Vec<ProbeRow>,
    /// Decided(Holds) when the errors strictly decrease and the last one is
    /// within `tol_delta`.
    pub verdict: Outcome<Property>,
    pub tol_delta: f64,
}

/// The rules read at the index `H`, i.e. as series.
pub fn rule_series(rule: &Expr, ctx: &EvalContext) -> Result<HyperSeries> {
    if let Some(v) = rule.free_vars().into_iter().find(|v| v != "n") {
        return Err(Error::InvalidArgument(format!("rules are sequences in n, found {v}")));
    }
    let c = ctx.clone().with_series("n", HyperSeries::big_h(ctx.window));
    eval_series(rule, &c)
}

fn rule_at(rule: &Expr, n: u64, digits: u32) -> Result<f64> {
    let v = eval_point(rule, &[("n", q(n as i64))], digits)?;
    let x = to_f64(v.value());
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::InvalidArgument(format!("rule {rule} gives {x} at n = {n}, expected a positive value")));
    }
    Ok(x)
}

/// Composite Simpson over `[lo, hi]`, doubling the cell count until two
/// successive estimates agree to `QUADRATURE_TOL`.
fn simpson(g: &dyn Fn(f64) -> Result<f64>, lo: f64, hi: f64, n: u64) -> Result<f64> {
    let mut cells = MIN_CELLS;
    let mut h = (hi - lo) / cells as f64;
    let ends = g(lo)? + g(hi)?;
    let mut evens = 0.0;
    let mut odds = 0.0;
    for i in 1..cells {
        let v = g(lo + h * i as f64)?;
        if i % 2 == 0 {
            evens += v;
        } else {
            odds += v;
        }
    }
    let mut prev = h / 3.0 * (ends + 4.0 * odds + 2.0 * evens);
    loop {
        if cells >= MAX_CELLS {
            return Err(Error::QuadratureNonconvergent(n));
        }
        cells *= 2;
        h /= 2.0;
        evens += odds;
        odds = 0.0;
        for i in (1..cells).step_by(2) {
            odds += g(lo + h * i as f64)?;
        }
        let next = h / 3.0 * (ends + 4.0 * odds + 2.0 * evens);
        if (next - prev).abs() <= QUADRATURE_TOL {
            return Ok(next);
        }
        prev = next;
    }
}

/// `I_n = (1/2)∫_{−eps_n/α_n}^{eps_n/α_n} F(a + α_n t) dt / (1 + t²)`.
pub fn probe_value(f: &UnaryFn, a: &Q, alpha: f64, eps: f64, n: u64) -> Result<f64> {
    let a = to_f64(a);
    let big_t = eps / alpha;
    let g = |t: f64| -> Result<f64> {
        let x = a + alpha * t;
        let fx = eval_f64(&f.expr, &|v| (v == f.var).then_some(x))?;
        Ok(fx / (1.0 + t * t))
    };
    Ok(0.5 * simpson(&g, -big_t, big_t, n)?)
}

/// Evaluates the kernel symbolically at the rules' infinitesimals and
/// numerically at each `n`, and checks the probe errors shrink toward the
/// target.
pub fn delta_probe(
    f: &UnaryFn,
    a: &Q,
    alpha_rule: &Expr,
    eps_rule: &Expr,
    ns: &[u64],
    ctx: &EvalContext,
) -> Result<DeltaResult> {
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("ns must be nonempty and strictly increasing".into()));
    }
    let bits = real::bits_for_digits(ctx.precision);
    let half_pi = Coefficient::from_approx(real::pi(bits)).scale(&q2(1, 2));
    let target = half_pi.mul(&eval_point(&f.expr, &[(f.var.as_str(), a.clone())], ctx.precision)?);
    let target_f = to_f64(target.value());

    let symbolic = rule_series(alpha_rule, ctx)
        .and_then(|al| Ok((al, rule_series(eps_rule, ctx)?)))
        .and_then(|(al, ep)| delta_symbolic(f, a, &al, &ep, ctx));

    let rows: Vec<Result<ProbeRow>> = std::thread::scope(|s| {
        let handles: Vec<_> = ns
            .iter()
            .map(|&n| {
                s.spawn(move || -> Result<ProbeRow> {
                    let alpha = rule_at(alpha_rule, n, ctx.precision)?;
                    let eps = rule_at(eps_rule, n, ctx.precision)?;
                    let value = probe_value(f, a, alpha, eps, n)?;
                    Ok(ProbeRow { n, value, error: (value - target_f).abs() })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("probe thread panicked")).collect()
    });
    let probe_table = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let last = probe_table.last().expect("ns is nonempty");
    let tol_delta = 2.0 / last.n as f64;
    let decreasing = probe_table.windows(2).all(|w| w[1].error < w[0].error);
    let verdict = if probe_table.len() >= 2 && decreasing && last.error <= tol_delta {
        Outcome::Decided(Property::Holds)
    } else {
        Outcome::UndecidedHorizon
    };
    Ok(DeltaResult { symbolic, target, probe_table, verdict, tol_delta })
}
