//! Derivatives as standard parts of difference quotients, the two-stage
//! limit, continuity by infinitesimal increments, microcontinuity and
//! uniform continuity over a probe battery, and the convergence probe for
//! remainders along a null sequence.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Signed;

use crate::coeff::Coefficient;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::exact_value::{Classification, HyperSeries};
use crate::expr::{eval_series, EvalContext, Expr, UnaryFn};
use crate::rational::{parse_rational, q, q2, render_exact, Q};
use crate::stream_value::{extend_at, s_standard_part, HyperNat, HyperStream};
use crate::verdict::{Estimate, Evidence, Outcome, Property, Verdict};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    Open(Q),
    Closed(Q),
    Infinite,
}

/// A real interval, possibly unbounded on either side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub lo: Bound,
    pub hi: Bound,
}

impl Domain {
    pub fn whole_line() -> Self {
        Domain { lo: Bound::Infinite, hi: Bound::Infinite }
    }

    pub fn closed(a: Q, b: Q) -> Result<Self> {
        Domain::new(Bound::Closed(a), Bound::Closed(b))
    }

    pub fn open(a: Q, b: Q) -> Result<Self> {
        Domain::new(Bound::Open(a), Bound::Open(b))
    }

    pub fn new(lo: Bound, hi: Bound) -> Result<Self> {
        if let (Bound::Open(a) | Bound::Closed(a), Bound::Open(b) | Bound::Closed(b)) = (&lo, &hi) {
            if a >= b {
                return Err(Error::InvalidArgument(format!(
                    "empty interval: {} is not below {}",
                    render_exact(a),
                    render_exact(b)
                )));
            }
        }
        Ok(Domain { lo, hi })
    }

    pub fn kind(&self) -> &'static str {
        match (&self.lo, &self.hi) {
            (Bound::Infinite, Bound::Infinite) => "whole-line",
            (Bound::Infinite, _) | (_, Bound::Infinite) => "half-line",
            (Bound::Closed(_), Bound::Closed(_)) => "closed-interval",
            (Bound::Open(_), Bound::Open(_)) => "open-interval",
            _ => "half-open",
        }
    }

    /// Standard sample points strictly inside the domain.
    fn interior_samples(&self) -> Vec<Q> {
        let finite = |b: &Bound| match b {
            Bound::Open(c) | Bound::Closed(c) => Some(c.clone()),
            Bound::Infinite => None,
        };
        match (finite(&self.lo), finite(&self.hi)) {
            (Some(a), Some(b)) => (1..=5).map(|i| &a + (&b - &a) * q2(i, 6)).collect(),
            (Some(a), None) => [1, 2, 10].iter().map(|k| &a + q(*k)).collect(),
            (None, Some(b)) => [10, 2, 1].iter().map(|k| &b - q(*k)).collect(),
            (None, None) => [-10, -1, 0, 1, 10].iter().map(|k| q(*k)).collect(),
        }
    }

    /// The battery of points at which microcontinuity is probed: interior
    /// standard samples, closed endpoints, then `c ± eps` at open endpoints,
    /// `H` and `-H` at infinite ends.
    pub fn battery(&self, window: usize) -> Vec<HyperSeries> {
        let mut out: Vec<HyperSeries> =
            self.interior_samples().into_iter().map(|v| HyperSeries::from_rational(v, window)).collect();
        for b in [&self.lo, &self.hi] {
            if let Bound::Closed(c) = b {
                out.push(HyperSeries::from_rational(c.clone(), window));
            }
        }
        let eps = HyperSeries::eps(window);
        let big = HyperSeries::big_h(window);
        let shifted = |c: &Q, d: &HyperSeries| HyperSeries::from_rational(c.clone(), window).add(d);
        if let Bound::Open(c) = &self.lo {
            out.extend(shifted(c, &eps));
        }
        if let Bound::Open(c) = &self.hi {
            out.extend(shifted(c, &eps.neg()));
        }
        if self.hi == Bound::Infinite {
            out.push(big.clone());
        }
        if self.lo == Bound::Infinite {
            out.push(big.neg());
        }
        out
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == Bound::Infinite && self.hi == Bound::Infinite {
            return f.write_str("R");
        }
        match &self.lo {
            Bound::Open(c) => write!(f, "({}", render_exact(c))?,
            Bound::Closed(c) => write!(f, "[{}", render_exact(c))?,
            Bound::Infinite => f.write_str("(-inf")?,
        }
        match &self.hi {
            Bound::Open(c) => write!(f, ",{})", render_exact(c)),
            Bound::Closed(c) => write!(f, ",{}]", render_exact(c)),
            Bound::Infinite => f.write_str(",inf)"),
        }
    }
}

impl FromStr for Domain {
    type Err = Error;

    /// `R`, `[a,b]`, `(a,b)`, `[a,b)`, `(a,inf)`, `(-inf,b]`, ...
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "R" || s == "(-inf,inf)" {
            return Ok(Domain::whole_line());
        }
        let bad = || Error::InvalidArgument(format!("not a domain: {s:?}"));
        let (open_lo, rest) = match s.chars().next() {
            Some('(') => (true, &s[1..]),
            Some('[') => (false, &s[1..]),
            _ => return Err(bad()),
        };
        let (open_hi, body) = match rest.chars().last() {
            Some(')') => (true, &rest[..rest.len() - 1]),
            Some(']') => (false, &rest[..rest.len() - 1]),
            _ => return Err(bad()),
        };
        let (a, b) = body.split_once(',').ok_or_else(bad)?;
        let bound = |t: &str, open: bool, inf: &[&str]| -> Result<Bound> {
            let t = t.trim();
            if inf.contains(&t) {
                return if open { Ok(Bound::Infinite) } else { Err(bad()) };
            }
            let v = parse_rational(t)?;
            Ok(if open { Bound::Open(v) } else { Bound::Closed(v) })
        };
        Domain::new(bound(a, open_lo, &["-inf"])?, bound(b, open_hi, &["inf", "+inf"])?)
    }
}

/// Standard part of the difference quotient `(f(a+eps) - f(a)) / eps`.
pub fn derivative(f: &UnaryFn, a: &HyperSeries, ctx: &EvalContext) -> Result<Coefficient> {
    if a.classify() == Classification::Unlimited {
        return Err(Error::UnlimitedArgument(format!("derivative at {a}")));
    }
    let eps = HyperSeries::eps(ctx.window);
    let fx = eval_at(f, a, ctx)?;
    let fy = eval_at(f, &a.add(&eps)?, ctx)?;
    match fy.sub(&fx) {
        Ok(d) => d.div(&eps)?.standard_part(),
        // the increment is O(eps^k) with k > 1, so the quotient is infinitesimal
        Err(Error::WindowCollapse { order }) if order > 1 => Ok(Coefficient::zero()),
        Err(e) => Err(e),
    }
}

fn eval_at(f: &UnaryFn, x: &HyperSeries, ctx: &EvalContext) -> Result<HyperSeries> {
    let mut c = ctx.clone();
    c.bind_series(&f.var, x.clone());
    eval_series(&f.expr, &c)
}

fn difference_quotient(f: &UnaryFn, x: &HyperSeries, h: &HyperSeries, ctx: &EvalContext) -> Result<HyperSeries> {
    let fx = eval_at(f, x, ctx)?;
    let fy = eval_at(f, &x.add(h)?, ctx)?;
    fy.sub(&fx)?.div(h)
}

/// Outcome of the limit battery.
#[derive(Clone, Debug)]
pub struct LimitReport {
    pub verdict: Verdict<Estimate>,
    /// `(index label, verdict)` for each hypernatural of the battery.
    pub per_index: Vec<(String, Verdict<Estimate>)>,
    /// Battery positions whose standard parts disagree.
    pub disagreement: Option<(usize, usize)>,
}

/// Two-stage limit: read the sequence at each unlimited hypernatural of the
/// battery, take standard parts, and require them to agree within `2·tol`.
pub fn limit(r: &HyperStream, cfg: &Config) -> LimitReport {
    let h = BigUint::from(cfg.limit_horizon);
    let per_index: Vec<(String, Verdict<Estimate>)> = HyperNat::battery()
        .iter()
        .map(|k| (k.label().to_string(), s_standard_part(&extend_at(r, k), &h, &cfg.tol)))
        .collect();
    let two_tol = &cfg.tol * q(2);
    let mut disagreement = None;
    'outer: for i in 0..per_index.len() {
        for j in i + 1..per_index.len() {
            if let (Some(a), Some(b)) = (per_index[i].1.decided(), per_index[j].1.decided()) {
                if (&a.value - &b.value).abs() > two_tol {
                    disagreement = Some((i, j));
                    break 'outer;
                }
            }
        }
    }
    let all_decided = per_index.iter().all(|(_, v)| v.is_decided());
    let first = &per_index[0].1;
    let outcome = match (all_decided, disagreement, first.decided()) {
        (true, None, Some(est)) => Outcome::Decided(est.clone()),
        _ => Outcome::UndecidedHorizon,
    };
    let witnesses = per_index.iter().flat_map(|(_, v)| v.evidence.witnesses.clone()).collect();
    let verdict = Verdict {
        outcome,
        evidence: Evidence {
            stable_from: first.evidence.stable_from.clone(),
            witnesses,
            samples: per_index.iter().map(|(_, v)| v.evidence.samples).sum(),
        },
        horizon: h,
    };
    LimitReport { verdict, per_index, disagreement }
}

/// One probe: `y = x + delta`, and the image gap `f(y) - f(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probe {
    pub x: HyperSeries,
    pub delta: HyperSeries,
    pub y: HyperSeries,
    pub fx: HyperSeries,
    pub fy: HyperSeries,
    /// `None` when only an infinitesimal truncation tail survived.
    pub gap: Option<HyperSeries>,
    pub class: Classification,
}

impl Probe {
    fn run(f: &UnaryFn, x: &HyperSeries, fx: &HyperSeries, delta: HyperSeries, ctx: &EvalContext) -> Result<Probe> {
        let y = x.add(&delta)?;
        let fy = eval_at(f, &y, ctx)?;
        let (gap, class) = match fy.sub(fx) {
            Ok(g) => {
                let c = g.classify();
                (Some(g), c)
            }
            Err(Error::WindowCollapse { order }) if order > 0 => (None, Classification::Infinitesimal),
            Err(e) => return Err(e),
        };
        Ok(Probe { x: x.clone(), delta, y, fx: fx.clone(), fy, gap, class })
    }

    pub fn passes(&self) -> bool {
        self.class.is_infinitesimal()
    }

    /// Re-checks a failing probe from scratch: the increment is
    /// infinitesimal and the image gap is not.
    pub fn revalidate(&self, f: &UnaryFn, ctx: &EvalContext) -> bool {
        let delta_ok = self.y.sub(&self.x).map(|d| d.classify().is_infinitesimal()).unwrap_or(false);
        let gap = eval_at(f, &self.y, ctx).and_then(|fy| Ok(fy.sub(&eval_at(f, &self.x, ctx)?)?.classify()));
        delta_ok && matches!(gap, Ok(c) if !c.is_infinitesimal())
    }
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gap = self.gap.as_ref().map_or_else(|| "O(eps)".to_string(), |g| g.to_string());
        write!(f, "x = {}, y = {}, f(y) - f(x) = {} ({})", self.x, self.y, gap, self.class)
    }
}

#[derive(Clone, Debug)]
pub struct ContinuityReport {
    pub outcome: Outcome<Property>,
    pub probes: Vec<Probe>,
    pub witness: Option<Probe>,
    /// Increments at which `f` could not be evaluated.
    pub skipped: Vec<(HyperSeries, Error)>,
}

fn probe_battery(
    f: &UnaryFn,
    x: &HyperSeries,
    fx: &HyperSeries,
    deltas: Vec<HyperSeries>,
    ctx: &EvalContext,
) -> (Vec<Probe>, Vec<(HyperSeries, Error)>, bool) {
    let mut probes = Vec::new();
    let mut skipped = Vec::new();
    let mut unsure = false;
    for d in deltas {
        match Probe::run(f, x, fx, d.clone(), ctx) {
            Ok(p) => {
                // keep probing past an unlimited gap for an appreciable one
                let decisive = !p.passes() && p.class != Classification::Unlimited;
                probes.push(p);
                if decisive {
                    break;
                }
            }
            Err(e @ Error::Domain(_)) => skipped.push((d, e)),
            Err(e) => {
                unsure = true;
                skipped.push((d, e));
            }
        }
    }
    (probes, skipped, unsure)
}

/// Cauchy continuity: every infinitesimal increment of `x` gives an
/// infinitesimal increment of `f(x)`, checked on the increments
/// `eps, -eps, eps^2, 3 eps`.
pub fn continuous_at(f: &UnaryFn, a: &Q, ctx: &EvalContext) -> Result<ContinuityReport> {
    let w = ctx.window;
    let x = HyperSeries::from_rational(a.clone(), w);
    let fx = eval_at(f, &x, ctx)?;
    let eps = HyperSeries::eps(w);
    let deltas = vec![eps.clone(), eps.neg(), eps.mul(&eps)?, eps.scale(&Coefficient::exact(q(3)))?];
    let (probes, skipped, unsure) = probe_battery(f, &x, &fx, deltas, ctx);
    let witness = probes.iter().find(|p| !p.passes()).cloned();
    let outcome = if witness.is_some() {
        Outcome::Decided(Property::Fails)
    } else if unsure || probes.is_empty() {
        Outcome::UndecidedHorizon
    } else {
        Outcome::Decided(Property::Holds)
    };
    Ok(ContinuityReport { outcome, probes, witness, skipped })
}

#[derive(Clone, Debug)]
pub struct MicroReport {
    pub x: HyperSeries,
    pub outcome: Outcome<Property>,
    pub probes: Vec<Probe>,
    pub witness: Option<Probe>,
    /// `|st f'(x)|` when the difference quotient at `x` is limited.
    pub certificate: Option<Coefficient>,
    pub skipped: Vec<(HyperSeries, Error)>,
}

/// Microcontinuity at a possibly nonstandard point: `f(y) ≈ f(x)` for the
/// probes `y = x + eps, x - eps, x + eps^2` (and `x + 1/x` when `x` is
/// unlimited). Holding also needs a limited difference quotient at `x`.
/// The witness is the first failing probe with an appreciable gap, or the
/// first failing probe when every gap is unlimited.
pub fn microcontinuous_at(f: &UnaryFn, x: &HyperSeries, ctx: &EvalContext) -> Result<MicroReport> {
    let w = ctx.window;
    let fx = eval_at(f, x, ctx)?;
    let eps = HyperSeries::eps(w);
    let mut deltas = vec![eps.clone(), eps.neg(), eps.mul(&eps)?];
    if x.classify() == Classification::Unlimited {
        deltas.push(x.inverse()?);
    }
    let (probes, skipped, unsure) = probe_battery(f, x, &fx, deltas, ctx);
    // an appreciable gap is the sharper witness; else the first failure
    let failing = || probes.iter().filter(|p| !p.passes());
    let witness = failing().find(|p| p.class == Classification::Appreciable).or_else(|| failing().next()).cloned();
    let certificate = difference_quotient(f, x, &eps, ctx)
        .ok()
        .filter(|q| q.classify().is_limited())
        .and_then(|q| q.standard_part().ok())
        .map(|c| c.abs());
    let outcome = if witness.is_some() {
        Outcome::Decided(Property::Fails)
    } else if !unsure && !probes.is_empty() && certificate.is_some() {
        Outcome::Decided(Property::Holds)
    } else {
        Outcome::UndecidedHorizon
    };
    Ok(MicroReport { x: x.clone(), outcome, probes, witness, certificate, skipped })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UcVerdict {
    Uc,
    NotUc,
    Undecided,
}

impl UcVerdict {
    pub fn name(self) -> &'static str {
        match self {
            UcVerdict::Uc => "UC",
            UcVerdict::NotUc => "NOT_UC",
            UcVerdict::Undecided => "Undecided",
        }
    }
}

#[derive(Clone, Debug)]
pub struct UCReport {
    pub verdict: UcVerdict,
    pub witness: Option<Probe>,
    /// Largest `|st f'|` over the battery, when every point holds.
    pub certificate: Option<Coefficient>,
    pub points: Vec<MicroReport>,
    /// Battery points where `f` could not be evaluated.
    pub errors: Vec<(HyperSeries, Error)>,
}

/// Uniform continuity as microcontinuity at every point of the probe
/// battery of `d`. Failing witnesses are re-validated before being reported.
pub fn uniformly_continuous(f: &UnaryFn, d: &Domain, ctx: &EvalContext) -> Result<UCReport> {
    let mut points = Vec::new();
    let mut errors = Vec::new();
    let mut witness = None;
    for x in d.battery(ctx.window) {
        let standard = x.classify() != Classification::Unlimited && x.infinitesimal_part()?.is_zero();
        match microcontinuous_at(f, &x, ctx) {
            Ok(r) => {
                let fails = r.outcome == Outcome::Decided(Property::Fails);
                if fails {
                    if let Some(p) = r.witness.as_ref().filter(|p| p.revalidate(f, ctx)) {
                        witness = Some(p.clone());
                    }
                }
                points.push(r);
                if witness.is_some() {
                    break;
                }
            }
            Err(e) if standard => return Err(e),
            Err(e) => errors.push((x, e)),
        }
    }
    if witness.is_some() {
        return Ok(UCReport { verdict: UcVerdict::NotUc, witness, certificate: None, points, errors });
    }
    let all_hold = errors.is_empty() && points.iter().all(|p| p.outcome == Outcome::Decided(Property::Holds));
    let certificate = if all_hold {
        points.iter().filter_map(|p| p.certificate.clone()).max_by(|a, b| a.upper().cmp(&b.upper()))
    } else {
        None
    };
    let verdict = if certificate.is_some() { UcVerdict::Uc } else { UcVerdict::Undecided };
    Ok(UCReport { verdict, witness: None, certificate, points, errors })
}

#[derive(Clone, Debug)]
pub struct UConvReport {
    pub outcome: Outcome<Property>,
    /// The remainder sequence `r_n = f(x_n) - s(n, x_n)`.
    pub remainder: Expr,
    pub limit: LimitReport,
}

/// Checks that the remainder `f(x) - s(n, x)` is infinitesimal at the
/// infinitesimal generated by `x_n = rule(n)`: the condition holds iff the
/// remainder sequence has limit 0.
pub fn uniform_convergence_probe(s: &Expr, f: &Expr, rule: &Expr, cfg: &Config) -> Result<UConvReport> {
    let mut vars = s.free_vars();
    vars.extend(f.free_vars());
    vars.remove("n");
    let x = match vars.len() {
        0 => "x".to_string(),
        1 => vars.into_iter().next().unwrap_or_default(),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "expected s(n, x) and f(x) in one variable besides n, found {}",
                vars.into_iter().collect::<Vec<_>>().join(", ")
            )))
        }
    };
    if let Some(v) = rule.free_vars().into_iter().find(|v| v != "n") {
        return Err(Error::InvalidArgument(format!("the rule must be a sequence in n, found {v}")));
    }
    let remainder = Expr::Sub(Box::new(f.substitute(&x, rule)), Box::new(s.substitute(&x, rule)));
    let stream = HyperStream::from_expr(&remainder, &cfg.eval_context())?;
    let report = limit(&stream, cfg);
    let outcome = match report.verdict.decided() {
        Some(est) if est.value.abs() <= &cfg.tol * q(2) => Outcome::Decided(Property::Holds),
        Some(_) => Outcome::Decided(Property::Fails),
        None => Outcome::UndecidedHorizon,
    };
    Ok(UConvReport { outcome, remainder, limit: report })
}
