//! Plain and JSON renderings of engine values.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use ie_core::calculus::Probe;
use ie_core::rational::{render_decimal, render_exact, Q};
use ie_core::roots::Bracket;
use ie_core::{Coefficient, Config, Estimate, Evidence, HyperSeries, Outcome, Verdict};

/// Exact text for a rational: a terminating decimal when the denominator
/// allows one, `p/q` otherwise.
pub fn exact(v: &Q) -> String {
    let mut d = v.denom().clone();
    let mut counts = [0usize; 2];
    for (i, p) in [2u32, 5].into_iter().enumerate() {
        let p = num_bigint::BigInt::from(p);
        while (&d % &p).is_zero() {
            d /= &p;
            counts[i] += 1;
        }
    }
    if !d.is_one() {
        return render_exact(v);
    }
    render_decimal(v, counts[0].max(counts[1]))
}

pub fn ordering(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    }
}

pub fn outcome<T>(o: &Outcome<T>, show: impl Fn(&T) -> String) -> String {
    match o {
        Outcome::Decided(v) => format!("Decided({})", show(v)),
        other => other.name().to_string(),
    }
}

pub fn config_json(c: &Config) -> Value {
    json!({
        "window": c.window,
        "precision": c.precision,
        "horizon": c.horizon,
        "limit_horizon": c.limit_horizon,
        "tol": exact(&c.tol),
    })
}

pub fn coefficient_json(c: &Coefficient) -> Value {
    match c.as_exact() {
        Some(v) => json!({ "value": render_exact(v), "exact": true }),
        None => json!({
            "value": c.to_string(),
            "midpoint": render_exact(c.value()),
            "err": render_exact(c.err()),
            "exact": false,
        }),
    }
}

pub fn series_json(s: &HyperSeries) -> Value {
    let terms: Vec<Value> = s
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| json!({ "power": s.valuation() + i as i32, "coefficient": coefficient_json(c) }))
        .collect();
    json!({
        "text": s.to_string(),
        "class": s.classify().name(),
        "terms": terms,
        "order": s.order(),
    })
}

pub fn estimate_json(e: &Estimate) -> Value {
    json!({ "value": exact(&e.value), "radius": exact(&e.radius), "text": e.to_string() })
}

fn indices(v: &[BigUint]) -> Vec<String> {
    v.iter().map(BigUint::to_string).collect()
}

pub fn evidence_json(e: &Evidence) -> Value {
    json!({
        "stable_from": e.stable_from.as_ref().map(BigUint::to_string),
        "witnesses": indices(&e.witnesses),
        "samples": e.samples,
    })
}

pub fn verdict_json<T>(v: &Verdict<T>, value: impl Fn(&T) -> Value) -> Value {
    json!({
        "outcome": v.outcome.name(),
        "value": v.decided().map(value),
        "evidence": evidence_json(&v.evidence),
        "horizon": v.horizon.to_string(),
    })
}

pub fn probe_json(p: &Probe) -> Value {
    json!({
        "x": p.x.to_string(),
        "delta": p.delta.to_string(),
        "y": p.y.to_string(),
        "fx": p.fx.to_string(),
        "fy": p.fy.to_string(),
        "gap": p.gap.as_ref().map(HyperSeries::to_string),
        "class": p.class.name(),
    })
}

pub fn bracket(b: &Bracket) -> String {
    format!("[{}, {}]", exact(&b.lo), exact(&b.hi))
}

pub fn bracket_json(b: &Bracket) -> Value {
    json!({ "lo": exact(&b.lo), "hi": exact(&b.hi), "sign_lo": b.sign_lo, "sign_hi": b.sign_hi })
}
