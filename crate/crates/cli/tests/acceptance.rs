//! Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are pinned below.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ie_core::calculus::{derivative, limit, uniform_convergence_probe, uniformly_continuous, Domain, UcVerdict};
use ie_core::delta::{delta_probe, delta_symbolic};
use ie_core::expr::{eval_point, eval_series, eval_stream, parse, symbolic_derivative};
use ie_core::rational::{pow10, q, q2, to_f64, Q};
use ie_core::roots::{cauchy_ivt, stevin_digits, Bracket};
use ie_core::stream_value::{extend_at, s_compare, s_standard_part, schedule};
use ie_core::{
    Classification, Coefficient, Config, Error, EvalContext, HyperNat, HyperSeries, HyperStream, Outcome, Property,
    UnaryFn,
};

const CLI_BUDGET: Duration = Duration::from_secs(1);
const LIMIT_TOL: f64 = 2e-8;
const ATAN_TOL: f64 = 1e-10;
const EXP_FINAL_ERR: f64 = 2e-3;
const REMAINDER_TOL: f64 = 1e-6;
const DERIV_GAP_EXP: u32 = 25;
const CASES: usize = 1000;
const W: usize = 8;
const P: u32 = 50;

type Check = std::result::Result<String, String>;
type Suite = fn(&mut ChaCha8Rng) -> std::result::Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Run {
    code: i32,
    stdout: String,
    elapsed: Duration,
}

fn ie(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_ie")).args(args).output().expect("spawn ie");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        elapsed: start.elapsed(),
    }
}

fn series(src: &str) -> HyperSeries {
    eval_series(&parse(src).unwrap(), &EvalContext::default()).unwrap()
}

fn f(src: &str) -> UnaryFn {
    UnaryFn::parse(src).unwrap()
}

fn squaring_example() -> Check {
    let run = ie(&["eval", "x^2", "--at", "x=H+eps"]);
    ensure(run.code == 0 && run.stdout == "H^2 + 2 + eps^2\n", || format!("got {:?} (exit {})", run.stdout, run.code))?;
    ensure(run.elapsed < CLI_BUDGET, || format!("took {:?}", run.elapsed))?;
    let r = series(run.stdout.trim());
    ensure(r.adequal(&series("H^2 + 2")), || "result not adequal to H^2 + 2".into())?;
    ensure(!r.adequal(&series("H^2")), || "result adequal to H^2".into())?;
    Ok(format!("H^2 + 2 + eps^2 in {:?}", run.elapsed))
}

fn uniform_continuity() -> Check {
    let ctx = EvalContext::default();
    let mut notes = Vec::new();
    for (src, dom, x) in [("x^2", "R", "H"), ("1/x", "(0,1)", "eps")] {
        let g = f(src);
        let r = uniformly_continuous(&g, &dom.parse::<Domain>().unwrap(), &ctx).map_err(|e| e.to_string())?;
        ensure(r.verdict == UcVerdict::NotUc, || format!("{src} on {dom}: {}", r.verdict.name()))?;
        let w = r.witness.ok_or("missing witness")?;
        ensure(w.x == series(x), || format!("{src}: witness x = {}", w.x))?;
        ensure(w.revalidate(&g, &ctx), || format!("{src}: witness does not revalidate"))?;
        let delta = w.y.sub(&w.x).unwrap();
        ensure(delta.classify() == Classification::Infinitesimal, || format!("{src}: delta = {delta}"))?;
        let gap = w.fy.sub(&w.fx).unwrap();
        ensure(gap.classify() == Classification::Appreciable, || format!("{src}: gap = {gap}"))?;
        if src == "x^2" {
            ensure(w.y == series("H + 1/H"), || format!("x^2: witness y = {}", w.y))?;
        }
        notes.push(format!("{src} on {dom}: ({}, {})", w.x, w.y));
    }
    let r = uniformly_continuous(&f("x^2"), &"[0,1]".parse().unwrap(), &ctx).map_err(|e| e.to_string())?;
    ensure(r.verdict == UcVerdict::Uc, || format!("x^2 on [0,1]: {}", r.verdict.name()))?;
    let run = ie(&["ucont", "x^2", "--domain", "R"]);
    ensure(run.stdout.starts_with("NOT_UC\n") && run.code == 0, || format!("CLI: {:?}", run.stdout))?;
    notes.push("x^2 on [0,1]: UC".into());
    Ok(notes.join("; "))
}

fn near(est: &Q, target: f64, tol: f64) -> bool {
    (to_f64(est) - target).abs() <= tol
}

fn limit_battery() -> Check {
    let cfg = Config::default();
    let r = HyperStream::parse("(n+1)/n", &cfg.eval_context()).unwrap();
    let report = limit(&r, &cfg);
    ensure(report.per_index.len() == 4, || "battery size".into())?;
    for (label, v) in &report.per_index {
        let est = v.decided().ok_or_else(|| format!("K = {label}: {}", v.outcome.name()))?;
        ensure(near(&est.value, 1.0, LIMIT_TOL), || format!("K = {label}: {est}"))?;
    }
    let est = report.verdict.decided().ok_or("limit undecided")?;
    ensure(near(&est.value, 1.0, LIMIT_TOL), || format!("limit {est}"))?;
    let run = ie(&["limit", "(n+1)/n"]);
    ensure(run.code == 0 && run.stdout.starts_with("Decided(1 "), || format!("CLI: {:?}", run.stdout))?;
    Ok(format!("all four indices Decided, limit {est}"))
}

fn euler_peirce() -> Check {
    let cfg = Config::default();
    let ctx = cfg.eval_context();
    let nines = HyperStream::partial_sum(&parse("9*10^(-k)").unwrap(), "k", 0, &ctx).unwrap();
    let est = limit(&nines, &cfg).verdict.decided().cloned().ok_or("9.999... limit undecided")?;
    ensure(near(&est.value, 10.0, LIMIT_TOL), || format!("limit {est}"))?;
    let tail = HyperStream::partial_sum(&parse("9*10^(-k)").unwrap(), "k", 1, &ctx).unwrap();
    let diff = eval_stream(&parse("1 - x").unwrap(), &ctx.clone().with_stream("x", tail));
    let at_h = extend_at(&diff, &HyperNat::identity());
    let h = BigUint::from(cfg.limit_horizon);
    let st = s_standard_part(&at_h, &h, &cfg.tol);
    let zero = st.decided().ok_or("difference has no standard part")?;
    ensure(near(&zero.value, 0.0, LIMIT_TOL), || format!("st = {zero}"))?;
    let sampled = schedule(&h.min(at_h.budget().clone()));
    for n in &sampled {
        let v = at_h.at(n).map_err(|e| e.to_string())?;
        ensure(v.is_positive(), || format!("term {n} = {v} is not positive"))?;
    }
    Ok(format!("limit {est}; 1 - 0.999...: st {zero}, {} sampled terms positive", sampled.len()))
}

/// floor(sqrt(2) * 10^k) by digit-by-digit long division.
fn sqrt2_digits(k: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let (mut rem, mut root) = (BigInt::from(2), BigInt::from(1));
    rem -= 1;
    out.push(root.clone());
    for _ in 0..k {
        rem *= 100;
        let mut d = 9;
        while (&root * 20 + d) * d > rem {
            d -= 1;
        }
        rem -= (&root * 20 + d) * d;
        root = root * 10 + d;
        out.push(root.clone());
    }
    out
}

fn stevin_cubic() -> Check {
    let run = ie(&["stevin", "x^3 - 300*x - 33915024", "--bracket", "0,1000", "--digits", "6"]);
    ensure(run.stdout.lines().next() == Some("324 (exact)"), || format!("got {:?}", run.stdout))?;
    ensure(run.elapsed < CLI_BUDGET, || format!("cubic took {:?}", run.elapsed))?;
    let cubic = f("x^3 - 300*x - 33915024");
    let b = Bracket::new(&cubic, q(0), q(1000), P).map_err(|e| e.to_string())?;
    let d = stevin_digits(&cubic, &b, 6, P).map_err(|e| e.to_string())?;
    let hit = d.exact_hit.ok_or("no exact hit")?;
    ensure(&hit * &hit * &hit - q(300) * &hit - q(33_915_024) == q(0) && hit == q(324), || format!("hit {hit}"))?;

    let run2 = ie(&["stevin", "x^2 - 2", "--bracket", "1,2", "--digits", "8"]);
    ensure(run2.stdout.lines().next() == Some("1.41421356"), || format!("got {:?}", run2.stdout))?;
    ensure(run2.elapsed < CLI_BUDGET, || format!("sqrt 2 took {:?}", run2.elapsed))?;
    let sq = f("x^2 - 2");
    let b = Bracket::new(&sq, q(1), q(2), P).map_err(|e| e.to_string())?;
    let d = stevin_digits(&sq, &b, 8, P).map_err(|e| e.to_string())?;
    let oracle = sqrt2_digits(8);
    for (k, br) in d.brackets.iter().enumerate() {
        let lo = Q::new(oracle[k].clone(), pow10(k as u32));
        let hi = &lo + Q::new(BigInt::from(1), pow10(k as u32));
        ensure(br.lo == lo && br.hi == hi, || format!("step {k}: [{}, {}] vs oracle [{lo}, {hi}]", br.lo, br.hi))?;
        ensure(&br.lo * &br.lo < q(2) && &br.hi * &br.hi > q(2), || format!("step {k} misses sqrt 2"))?;
    }
    Ok(format!("324 exact in {:?}; 1.41421356 in {:?}, 9 brackets match long division", run.elapsed, run2.elapsed))
}

fn horner(cs: &[Q], x: &Q) -> Q {
    cs.iter().fold(q(0), |acc, c| acc * x + c)
}

fn stevin_cauchy() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0006);
    let mut done = 0;
    let mut hits = 0;
    while done < 20 {
        let mut cs: Vec<Q> = (0..4).map(|_| q2(rng.gen_range(-50..=50), rng.gen_range(1..=7))).collect();
        if cs[0].is_zero() {
            cs[0] = q(1);
        }
        let Some(m) = (-40i64..40).find(|&m| horner(&cs, &q(m)).signum() * horner(&cs, &q(m + 1)).signum() < q(0))
        else {
            continue;
        };
        let src = format!("({})*x^3 + ({})*x^2 + ({})*x + ({})", cs[0], cs[1], cs[2], cs[3]);
        let g = f(&src);
        let b = Bracket::new(&g, q(m), q(m + 1), P).map_err(|e| e.to_string())?;
        let k = 12;
        let s = stevin_digits(&g, &b, k, P).map_err(|e| e.to_string())?;
        let c = cauchy_ivt(&g, &b, 10, k, P).map_err(|e| e.to_string())?;
        ensure(s.brackets == c.brackets && s.exact_hit == c.exact_hit, || format!("{src}: sequences differ"))?;
        for (i, br) in s.brackets.iter().enumerate() {
            ensure(br.width() == Q::new(BigInt::from(1), pow10(i as u32)), || format!("{src}: width at step {i}"))?;
            ensure(horner(&cs, &br.lo).signum() * horner(&cs, &br.hi).signum() < q(0), || {
                format!("{src}: step {i} lost the sign change")
            })?;
        }
        hits += usize::from(s.exact_hit.is_some());
        done += 1;
    }
    Ok(format!("20 cubics, 12 digits each, identical bracket sequences ({hits} exact hits)"))
}

fn delta_kernel() -> Check {
    let cfg = Config::default();
    let ctx = cfg.eval_context();
    let (al, ep) = (parse("1/n^2").unwrap(), parse("1/n").unwrap());
    let ns = [10u64, 100, 1000];
    let one = delta_probe(&f("1"), &q(0), &al, &ep, &ns, &ctx).map_err(|e| e.to_string())?;
    for row in &one.probe_table {
        let n = row.n as f64;
        ensure((row.value - n.atan()).abs() <= ATAN_TOL, || format!("F = 1, n = {}: {} vs atan(n)", row.n, row.value))?;
        ensure((row.value - FRAC_PI_2).abs() <= 1.1 / n, || format!("F = 1, n = {}: error {}", row.n, row.error))?;
    }
    let exp = delta_probe(&f("exp(x)"), &q(0), &al, &ep, &ns, &ctx).map_err(|e| e.to_string())?;
    let errs: Vec<f64> = exp.probe_table.iter().map(|r| r.error).collect();
    ensure(errs.windows(2).all(|w| w[1] < w[0]), || format!("exp errors {errs:?}"))?;
    ensure(errs[2] <= EXP_FINAL_ERR, || format!("exp final error {}", errs[2]))?;
    for (name, r) in [("1", &one), ("exp(x)", &exp)] {
        let sym = r.symbolic.as_ref().map_err(|e| format!("F = {name}: {e}"))?;
        let st = sym.standard_part().map_err(|e| e.to_string())?;
        let gap = (to_f64(st.value()) - FRAC_PI_2).abs();
        ensure(gap <= to_f64(st.err()) + 1e-15, || format!("F = {name}: st = {st}"))?;
    }
    let e1 = HyperSeries::eps(W);
    let hv = delta_symbolic(&f("1"), &q(0), &e1, &e1, &ctx);
    ensure(matches!(hv, Err(Error::HypothesisViolation(_))), || format!("alpha = eps gave {hv:?}"))?;
    Ok(format!(
        "atan(n) to 1e-10; exp errors {:.3e} {:.3e} {:.3e}; st = pi/2; alpha = eps rejected",
        errs[0], errs[1], errs[2]
    ))
}

fn uniform_convergence() -> Check {
    let cfg = Config::default();
    let rule = parse("1/n").unwrap();
    let fails = uniform_convergence_probe(&parse("n*x*exp(-n*x)").unwrap(), &parse("0").unwrap(), &rule, &cfg)
        .map_err(|e| e.to_string())?;
    ensure(fails.outcome == Outcome::Decided(Property::Fails), || format!("n x exp(-n x): {}", fails.outcome.name()))?;
    let l = fails.limit.verdict.decided().ok_or("remainder limit undecided")?;
    let target = (-1.0f64).exp();
    ensure((to_f64(&l.value).abs() - target).abs() <= REMAINDER_TOL, || format!("remainder limit {l}"))?;
    let holds = uniform_convergence_probe(&parse("x + x/n").unwrap(), &parse("x").unwrap(), &rule, &cfg)
        .map_err(|e| e.to_string())?;
    ensure(holds.outcome == Outcome::Decided(Property::Holds), || format!("x + x/n: {}", holds.outcome.name()))?;
    Ok(format!("fails with |L| = {:.8}, x + x/n holds", to_f64(&l.value).abs()))
}

fn rational(rng: &mut ChaCha8Rng) -> Q {
    q2(rng.gen_range(-40..=40), rng.gen_range(1..=12))
}

fn nonzero(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let r = rational(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

fn random_series(rng: &mut ChaCha8Rng, vals: std::ops::RangeInclusive<i32>) -> HyperSeries {
    let v = rng.gen_range(vals);
    let (a, b) = (nonzero(rng), rational(rng));
    HyperSeries::from_terms(v, vec![Coefficient::exact(a), Coefficient::exact(b)], W).unwrap()
}

/// Coefficientwise agreement below the smaller truncation order.
fn agree(a: &HyperSeries, b: &HyperSeries) -> bool {
    let upto = match (a.order(), b.order()) {
        (None, None) => return a == b,
        (Some(k), None) | (None, Some(k)) => k,
        (Some(k), Some(l)) => k.min(l),
    };
    let low = |x: &HyperSeries| if x.is_zero() { upto } else { x.valuation() };
    (low(a).min(low(b))..upto).all(|k| a.coeff(k) == b.coeff(k))
}

fn field_axioms(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let one = HyperSeries::from_int(1, W);
    for _ in 0..CASES {
        let (x, y, z) = (random_series(rng, -3..=3), random_series(rng, -3..=3), random_series(rng, -3..=3));
        let ctx = || format!("x = {x}, y = {y}, z = {z}");
        let e = |r: ie_core::Result<HyperSeries>| r.map_err(|e| format!("{e} at {}", ctx()));
        ensure(e(e(x.add(&y))?.add(&z))? == e(x.add(&e(y.add(&z))?))?, || format!("add assoc: {}", ctx()))?;
        ensure(e(x.add(&y))? == e(y.add(&x))?, || format!("add comm: {}", ctx()))?;
        ensure(e(x.add(&x.neg()))?.is_zero(), || format!("add inverse: {}", ctx()))?;
        let (a, b, c) = (random_series(rng, -2..=2), random_series(rng, -2..=2), random_series(rng, -2..=2));
        let assoc = agree(&e(e(a.mul(&b))?.mul(&c))?, &e(a.mul(&e(b.mul(&c))?))?);
        ensure(assoc, || format!("mul assoc: a = {a}, b = {b}, c = {c}"))?;
        ensure(e(x.mul(&y))? == e(y.mul(&x))?, || format!("mul comm: {}", ctx()))?;
        let yz = e(y.add(&z))?;
        ensure(agree(&e(x.mul(&yz))?, &e(e(x.mul(&y))?.add(&e(x.mul(&z))?))?), || format!("distributive: {}", ctx()))?;
        ensure(agree(&e(x.mul(&e(x.inverse())?))?, &one), || format!("mul inverse: {}", ctx()))?;
    }
    Ok(())
}

fn order_axioms(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for _ in 0..CASES {
        let (x, y, z) = (random_series(rng, -3..=3), random_series(rng, -3..=3), random_series(rng, -3..=3));
        let o = x.compare(&y).map_err(|e| e.to_string())?;
        let flags = [o == Ordering::Less, x == y, o == Ordering::Greater];
        ensure(flags.iter().filter(|b| **b).count() == 1, || format!("trichotomy at {x}, {y}"))?;
        let shifted = x.add(&z).unwrap().compare(&y.add(&z).unwrap()).unwrap();
        ensure(shifted == o, || format!("additive compatibility at {x}, {y}, {z}"))?;
        let zp = if z.signum().unwrap() == Ordering::Less { z.neg() } else { z.clone() };
        let scaled = x.mul(&zp).unwrap().compare(&y.mul(&zp).unwrap()).unwrap();
        ensure(scaled == o, || format!("multiplicative compatibility at {x}, {y}, {zp}"))?;
    }
    Ok(())
}

fn non_archimedean(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let (one, eps, h) = (HyperSeries::from_int(1, W), HyperSeries::eps(W), HyperSeries::big_h(W));
    for i in 0..CASES {
        let k = if i == 0 { 1_000_000 } else { rng.gen_range(1..=1_000_000i64) };
        let kk = HyperSeries::from_int(k, W);
        ensure(kk.mul(&eps).unwrap().compare(&one).unwrap() == Ordering::Less, || format!("{k} eps >= 1"))?;
        ensure(kk.compare(&h).unwrap() == Ordering::Less, || format!("{k} >= H"))?;
    }
    Ok(())
}

fn st_morphism(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for _ in 0..CASES {
        let (x, y) = (random_series(rng, 0..=3), random_series(rng, 0..=3));
        let (sx, sy) = (x.standard_part().unwrap(), y.standard_part().unwrap());
        let sum = x.add(&y).unwrap().standard_part().map_err(|e| e.to_string())?;
        let prod = x.mul(&y).unwrap().standard_part().map_err(|e| e.to_string())?;
        ensure(sum == sx.add(&sy), || format!("st(x + y) at {x}, {y}"))?;
        ensure(prod == sx.mul(&sy), || format!("st(x y) at {x}, {y}"))?;
    }
    Ok(())
}

fn linear(rng: &mut ChaCha8Rng) -> String {
    let c = q2(rng.gen_range(-9..=9), rng.gen_range(1..=4));
    let d = q2(rng.gen_range(-9..=9), rng.gen_range(1..=4));
    format!("({c})*x + ({d})")
}

fn level1(rng: &mut ChaCha8Rng) -> String {
    let positive = |rng: &mut ChaCha8Rng| format!("{}*x^2 + {}", rng.gen_range(0..=4), rng.gen_range(1..=6));
    match rng.gen_range(0..6) {
        0 => linear(rng),
        1 => {
            let g = ["sin", "cos", "exp", "atan"][rng.gen_range(0..4)];
            format!("{g}({})", linear(rng))
        }
        2 => {
            let g = ["ln", "sqrt"][rng.gen_range(0..2)];
            format!("{g}({})", positive(rng))
        }
        3 => format!("1/({})", positive(rng)),
        _ => format!("({})^{}", linear(rng), rng.gen_range(1..=3)),
    }
}

fn elementary(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.4) {
        return level1(rng);
    }
    let a = elementary(rng, depth - 1);
    match rng.gen_range(0..4) {
        0 => format!("({a}) + ({})", level1(rng)),
        1 => format!("({a}) - ({})", level1(rng)),
        2 => format!("({a}) * ({})", level1(rng)),
        _ => format!("{}({a})", ["sin", "cos", "atan"][rng.gen_range(0..3)]),
    }
}

fn derivatives(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let ctx = EvalContext::new(W, P);
    let bound = Q::new(BigInt::from(1), pow10(DERIV_GAP_EXP));
    for _ in 0..CASES {
        let src = elementary(rng, 2);
        let a = q2(rng.gen_range(-8..=8), 4);
        let g = f(&src);
        let d = derivative(&g, &HyperSeries::from_rational(a.clone(), W), &ctx)
            .map_err(|e| format!("{src} at {a}: {e}"))?;
        let s = eval_point(&symbolic_derivative(&g.expr, "x"), &[("x", a.clone())], P)
            .map_err(|e| format!("{src}: {e}"))?;
        let gap = d.sub(&s).magnitude();
        ensure(gap <= bound, || format!("{src} at {a}: {d} vs {s}"))?;
    }
    Ok(())
}

fn tier_coherence(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for _ in 0..CASES {
        let x = random_series(rng, -1..=1);
        let cs: Vec<i64> = (0..4).map(|_| rng.gen_range(-9..=9)).collect();
        let e = parse(&format!("{} + {}*x + {}*x^2 + {}*x^3", cs[0], cs[1], cs[2], cs[3])).unwrap();
        let exact = eval_series(&e, &EvalContext::default().with_series("x", x.clone())).map_err(|e| e.to_string())?;
        let lhs = HyperStream::embed(&exact).map_err(|e| e.to_string())?;
        let rhs = eval_stream(&e, &EvalContext::default().with_stream("x", HyperStream::embed(&x).unwrap()));
        for n in [2u64, 3, 7, 64, 1000, 123_457] {
            ensure(lhs.at_u64(n).ok() == rhs.at_u64(n).ok(), || format!("{e} at x = {x}, index {n}"))?;
        }
    }
    Ok(())
}

fn property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0009);
    let suites: [(&str, Suite); 6] = [
        ("field", field_axioms),
        ("order", order_axioms),
        ("non-archimedean", non_archimedean),
        ("st", st_morphism),
        ("derivative", derivatives),
        ("tiers", tier_coherence),
    ];
    for (name, run) in suites {
        run(&mut rng).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("6 suites x {CASES} cases"))
}

fn ultrafilter() -> Check {
    let ctx = EvalContext::default();
    let v = s_compare(
        &HyperStream::parse("(-1)^n/n", &ctx).unwrap(),
        &HyperStream::constant(q(0)),
        &BigUint::from(10_000u32),
    );
    ensure(v.outcome == Outcome::UndecidedUltrafilter, || format!("verdict {}", v.outcome.name()))?;
    let run = ie(&["compare", "(-1)^n/n", "const:0"]);
    ensure(run.code == 2, || format!("CLI exit {}", run.code))?;
    Ok(format!("UndecidedUltrafilter with {} witnesses, CLI exit 2", v.evidence.witnesses.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("squaring example", squaring_example),
        ("uniform continuity verdicts", uniform_continuity),
        ("limit battery", limit_battery),
        ("Euler and Peirce decimals", euler_peirce),
        ("Stevin digits", stevin_cubic),
        ("Stevin and Cauchy coincide", stevin_cauchy),
        ("delta kernel", delta_kernel),
        ("uniform convergence probe", uniform_convergence),
        ("property suites", property_suites),
        ("ultrafilter surfacing", ultrafilter),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
