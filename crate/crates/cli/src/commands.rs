//! One function per subcommand, each producing a [`Report`].

use num_bigint::BigUint;
use serde_json::{json, Value};

use ie_core::calculus::{
    continuous_at, derivative, limit, uniform_convergence_probe, uniformly_continuous, Domain, UcVerdict,
};
use ie_core::delta::delta_probe;
use ie_core::expr::{eval_series, eval_stream, parse, symbolic_derivative};
use ie_core::rational::{parse_rational, Q};
use ie_core::roots::{cauchy_ivt, stevin_digits, Bracket};
use ie_core::stream_value::s_compare;
use ie_core::{Config, Error, EvalContext, HyperSeries, HyperStream, Outcome, Property, Result, UnaryFn};

use crate::render::{self, exact};

/// The result of one subcommand: plain lines plus the JSON payload.
pub struct Report {
    pub lines: Vec<String>,
    pub payload: Value,
    /// Set when any verdict in the payload is undecided.
    pub undecided: bool,
}

impl Report {
    fn new(lines: Vec<String>, payload: Value) -> Self {
        Report { lines, payload, undecided: false }
    }
}

fn value(src: &str, cfg: &Config) -> Result<HyperSeries> {
    eval_series(&parse(src)?, &cfg.eval_context())
}

fn split_binding(b: &str) -> Result<(&str, &str)> {
    b.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| Error::InvalidArgument(format!("expected NAME=VALUE, got {b:?}")))
}

pub fn eval(expr: &str, at: &[String], cfg: &Config) -> Result<Report> {
    let e = parse(expr)?;
    let mut ctx = cfg.eval_context();
    let mut bindings = Vec::new();
    for b in at {
        let (name, src) = split_binding(b)?;
        let v = value(src, cfg)?;
        bindings.push(json!({ "name": name, "value": render::series_json(&v) }));
        ctx.bind_series(name, v);
    }
    let v = eval_series(&e, &ctx)?;
    Ok(Report::new(
        vec![v.to_string()],
        json!({ "expr": e.to_string(), "bindings": bindings, "value": render::series_json(&v) }),
    ))
}

pub fn st(src: &str, cfg: &Config) -> Result<Report> {
    let v = value(src, cfg)?;
    let s = v.standard_part()?;
    Ok(Report::new(
        vec![s.to_string()],
        json!({ "value": render::series_json(&v), "standard_part": render::coefficient_json(&s) }),
    ))
}

pub fn classify(src: &str, cfg: &Config) -> Result<Report> {
    let v = value(src, cfg)?;
    let c = v.classify();
    Ok(Report::new(vec![c.name().to_string()], json!({ "value": render::series_json(&v), "class": c.name() })))
}

pub fn deriv(expr: &str, at: &str, cfg: &Config) -> Result<Report> {
    let f = UnaryFn::parse(expr)?;
    let point = value(at, cfg)?;
    let d = derivative(&f, &point, &cfg.eval_context())?;
    let sym = symbolic_derivative(&f.expr, &f.var);
    Ok(Report::new(
        vec![d.to_string(), format!("d/d{}: {sym}", f.var)],
        json!({ "at": render::series_json(&point), "derivative": render::coefficient_json(&d), "symbolic": sym.to_string(), "var": f.var }),
    ))
}

/// Stream constructors: `const:<q>`, `decimal_sqrt:<q>`, `embed:<value>`,
/// `partial_sum:[<from>:]<term>`, or a closed form in `n` whose other
/// variables are bound by `withs`.
pub fn stream(src: &str, withs: &[(String, HyperStream)], cfg: &Config) -> Result<HyperStream> {
    let ctx = cfg.eval_context();
    let src = src.trim();
    if let Some(rest) = src.strip_prefix("const:") {
        return Ok(HyperStream::constant(parse_rational(rest)?));
    }
    if let Some(rest) = src.strip_prefix("decimal_sqrt:") {
        return HyperStream::decimal_sqrt(parse_rational(rest)?);
    }
    if let Some(rest) = src.strip_prefix("embed:") {
        return HyperStream::embed(&value(rest, cfg)?);
    }
    if let Some(rest) = src.strip_prefix("partial_sum:") {
        let (from, term) = match rest.split_once(':') {
            Some((f, t)) if f.trim().parse::<i64>().is_ok() => (f.trim().parse::<i64>().unwrap_or(1), t),
            _ => (1, rest),
        };
        let term = parse(term)?;
        let mut vars = term.free_vars();
        vars.remove("n");
        let var = match vars.len() {
            0 => "k".to_string(),
            1 => vars.into_iter().next().unwrap_or_default(),
            _ => {
                return Err(Error::InvalidArgument(format!("the summand {term} has more than one summation variable")))
            }
        };
        return HyperStream::partial_sum(&term, &var, from, &ctx);
    }
    let e = parse(src)?;
    let mut ctx = ctx;
    for (name, s) in withs {
        ctx = ctx.with_stream(name, s.clone());
    }
    if let Some(v) = e.free_vars().into_iter().find(|v| v != "n" && !withs.iter().any(|(w, _)| w == v)) {
        return Err(Error::UnboundVariable(v));
    }
    Ok(eval_stream(&e, &ctx))
}

fn with_streams(withs: &[String], cfg: &Config) -> Result<Vec<(String, HyperStream)>> {
    let mut out: Vec<(String, HyperStream)> = Vec::new();
    for w in withs {
        let (name, src) = split_binding(w)?;
        let s = stream(src, &out, cfg)?;
        out.push((name.to_string(), s));
    }
    Ok(out)
}

pub fn limit_cmd(src: &str, withs: &[String], cfg: &Config) -> Result<Report> {
    let r = stream(src, &with_streams(withs, cfg)?, cfg)?;
    let report = limit(&r, cfg);
    let mut lines = vec![render::outcome(&report.verdict.outcome, |e| e.to_string())];
    let mut per = Vec::new();
    for (label, v) in &report.per_index {
        lines.push(format!("  K = {label}: {}", render::outcome(&v.outcome, |e| e.to_string())));
        per.push(json!({ "index": label, "verdict": render::verdict_json(v, render::estimate_json) }));
    }
    if let Some((i, j)) = report.disagreement {
        lines.push(format!("  disagreement between K = {} and K = {}", report.per_index[i].0, report.per_index[j].0));
    }
    let undecided = !report.verdict.is_decided();
    Ok(Report {
        lines,
        payload: json!({
            "stream": r.label(),
            "verdict": render::verdict_json(&report.verdict, render::estimate_json),
            "per_index": per,
            "disagreement": report.disagreement.map(|(i, j)| [report.per_index[i].0.clone(), report.per_index[j].0.clone()]),
        }),
        undecided,
    })
}

fn rational_point(src: &str, cfg: &Config) -> Result<Q> {
    if let Ok(q) = parse_rational(src) {
        return Ok(q);
    }
    let v = value(src, cfg)?;
    if v.is_zero() {
        return Ok(Q::from_integer(0.into()));
    }
    match (v.valuation(), v.exact_coeffs()) {
        (0, Some(cs)) if cs.len() == 1 => Ok(cs[0].clone()),
        _ => Err(Error::InvalidArgument(format!("expected a standard rational point, got {v}"))),
    }
}

fn property(p: &Property, holds: &str, fails: &str) -> String {
    match p {
        Property::Holds => holds.to_string(),
        Property::Fails => fails.to_string(),
    }
}

pub fn cont(expr: &str, at: &str, cfg: &Config) -> Result<Report> {
    let f = UnaryFn::parse(expr)?;
    let a = rational_point(at, cfg)?;
    let r = continuous_at(&f, &a, &cfg.eval_context())?;
    let mut lines = vec![render::outcome(&r.outcome, |p| property(p, "continuous", "discontinuous"))];
    if let Some(w) = &r.witness {
        lines.push(format!("witness: {w}"));
    }
    for (d, e) in &r.skipped {
        lines.push(format!("skipped increment {d}: {e}"));
    }
    Ok(Report {
        lines,
        payload: json!({
            "at": exact(&a),
            "outcome": r.outcome.name(),
            "continuous": match r.outcome { Outcome::Decided(p) => Some(p == Property::Holds), _ => None },
            "probes": r.probes.iter().map(render::probe_json).collect::<Vec<_>>(),
            "witness": r.witness.as_ref().map(render::probe_json),
            "skipped": r.skipped.iter().map(|(d, e)| json!({ "delta": d.to_string(), "error": e.name() })).collect::<Vec<_>>(),
        }),
        undecided: !matches!(r.outcome, Outcome::Decided(_)),
    })
}

pub fn ucont(expr: &str, domain: &str, cfg: &Config) -> Result<Report> {
    let f = UnaryFn::parse(expr)?;
    let d: Domain = domain.parse()?;
    let r = uniformly_continuous(&f, &d, &cfg.eval_context())?;
    let mut lines = vec![r.verdict.name().to_string()];
    if let Some(w) = &r.witness {
        lines.push(format!("witness: {w}"));
    }
    if let Some(c) = &r.certificate {
        lines.push(format!("certificate: |f'| <= {c} on the battery"));
    }
    for (x, e) in &r.errors {
        lines.push(format!("no verdict at {x}: {e}"));
    }
    Ok(Report {
        lines,
        payload: json!({
            "domain": d.to_string(),
            "verdict": r.verdict.name(),
            "witness": r.witness.as_ref().map(render::probe_json),
            "certificate": r.certificate.as_ref().map(render::coefficient_json),
            "points": r.points.iter().map(|p| json!({ "x": p.x.to_string(), "outcome": p.outcome.name() })).collect::<Vec<_>>(),
            "errors": r.errors.iter().map(|(x, e)| json!({ "x": x.to_string(), "error": e.name(), "message": e.to_string() })).collect::<Vec<_>>(),
        }),
        undecided: r.verdict == UcVerdict::Undecided,
    })
}

pub fn uconv(sum: &str, lim: &str, rule: &str, cfg: &Config) -> Result<Report> {
    let r = uniform_convergence_probe(&parse(sum)?, &parse(lim)?, &parse(rule)?, cfg)?;
    let lines = vec![
        render::outcome(&r.outcome, |p| p.name().to_string()),
        format!("remainder: {}", r.remainder),
        format!("limit: {}", render::outcome(&r.limit.verdict.outcome, |e| e.to_string())),
    ];
    Ok(Report {
        lines,
        payload: json!({
            "outcome": r.outcome.name(),
            "condition": match r.outcome { Outcome::Decided(p) => Some(p.name()), _ => None },
            "remainder": r.remainder.to_string(),
            "rule": rule,
            "limit": render::verdict_json(&r.limit.verdict, render::estimate_json),
        }),
        undecided: !matches!(r.outcome, Outcome::Decided(_)),
    })
}

fn bracket_arg(f: &UnaryFn, src: &str, cfg: &Config) -> Result<Bracket> {
    let (lo, hi) = src.split_once(',').ok_or_else(|| Error::InvalidArgument(format!("expected LO,HI, got {src:?}")))?;
    Bracket::new(f, parse_rational(lo)?, parse_rational(hi)?, cfg.precision)
}

pub fn stevin(expr: &str, bracket: &str, digits: usize, cfg: &Config) -> Result<Report> {
    let f = UnaryFn::parse(expr)?;
    let b = bracket_arg(&f, bracket, cfg)?;
    let d = stevin_digits(&f, &b, digits, cfg.precision)?;
    let head = match &d.exact_hit {
        Some(x) => format!("{} (exact)", exact(x)),
        None => d.render(),
    };
    let mut lines = vec![head, format!("digits: {}", d.digits.iter().map(u8::to_string).collect::<Vec<_>>().join(" "))];
    lines.extend(d.brackets.iter().enumerate().map(|(k, b)| format!("  {k}: {}", render::bracket(b))));
    Ok(Report::new(
        lines,
        json!({
            "value": d.render(),
            "exact_hit": d.exact_hit.as_ref().map(exact),
            "sign": d.sign,
            "integer_part": d.integer_part.to_string(),
            "digits": d.digits,
            "brackets": d.brackets.iter().map(render::bracket_json).collect::<Vec<_>>(),
        }),
    ))
}

pub fn ivt(expr: &str, bracket: &str, m: u32, iters: usize, cfg: &Config) -> Result<Report> {
    let f = UnaryFn::parse(expr)?;
    let b = bracket_arg(&f, bracket, cfg)?;
    let r = cauchy_ivt(&f, &b, m, iters, cfg.precision)?;
    let head = match &r.exact_hit {
        Some(x) => format!("{} (exact)", exact(x)),
        None => render::bracket(r.last()),
    };
    let mut lines = vec![head];
    lines.extend(r.brackets.iter().enumerate().map(|(k, b)| format!("  {k}: {}", render::bracket(b))));
    Ok(Report::new(
        lines,
        json!({
            "m": m,
            "exact_hit": r.exact_hit.as_ref().map(exact),
            "cells": r.cells,
            "brackets": r.brackets.iter().map(render::bracket_json).collect::<Vec<_>>(),
        }),
    ))
}

pub fn delta(expr: &str, at: &str, alpha: &str, eps: &str, ns: &[u64], cfg: &Config) -> Result<Report> {
    let f = UnaryFn::parse(expr)?;
    let a = rational_point(at, cfg)?;
    let ctx: EvalContext = cfg.eval_context();
    let r = delta_probe(&f, &a, &parse(alpha)?, &parse(eps)?, ns, &ctx)?;
    let (symbolic, st) = match &r.symbolic {
        Ok(s) => (s.to_string(), s.standard_part()?.to_string()),
        // Only an infinitesimal tail is known: every kept term cancelled.
        Err(Error::WindowCollapse { order }) if *order > 0 => (format!("O(eps^{order})"), "0".to_string()),
        Err(e) => return Err(e.clone()),
    };
    let mut lines = vec![
        format!("target: {}", r.target),
        format!("symbolic: {symbolic}"),
        format!("st(symbolic): {st}"),
        format!("{:>12}  {:>22}  {:>12}", "n", "I_n", "error"),
    ];
    for row in &r.probe_table {
        lines.push(format!("{:>12}  {:>22.15}  {:>12.6e}", row.n, row.value, row.error));
    }
    lines.push(render::outcome(&r.verdict, |_| "converges".to_string()));
    Ok(Report {
        lines,
        payload: json!({
            "at": exact(&a),
            "alpha": alpha,
            "eps": eps,
            "target": render::coefficient_json(&r.target),
            "symbolic": symbolic,
            "standard_part": st,
            "probe_table": r.probe_table.iter().map(|row| json!({ "n": row.n, "value": row.value, "error": row.error })).collect::<Vec<_>>(),
            "tol_delta": r.tol_delta,
            "outcome": r.verdict.name(),
        }),
        undecided: !matches!(r.verdict, Outcome::Decided(_)),
    })
}

pub fn compare(left: &str, right: &str, withs: &[String], cfg: &Config) -> Result<Report> {
    let ws = with_streams(withs, cfg)?;
    let (x, y) = (stream(left, &ws, cfg)?, stream(right, &ws, cfg)?);
    let v = s_compare(&x, &y, &BigUint::from(cfg.horizon));
    let mut lines = vec![render::outcome(&v.outcome, |o| render::ordering(*o).to_string())];
    if let Some(s) = &v.evidence.stable_from {
        lines.push(format!("stable from n = {s}"));
    }
    if !v.evidence.witnesses.is_empty() {
        let w: Vec<String> = v.evidence.witnesses.iter().map(BigUint::to_string).collect();
        lines.push(format!("witnesses: {}", w.join(", ")));
    }
    Ok(Report {
        lines,
        payload: json!({
            "left": x.label(),
            "right": y.label(),
            "verdict": render::verdict_json(&v, |o| json!(render::ordering(*o))),
        }),
        undecided: !v.is_decided(),
    })
}
