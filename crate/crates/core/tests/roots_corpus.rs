use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ie_core::rational::{q, q2, Q};
use ie_core::roots::{cauchy_ivt, stevin_digits, Bracket};
use ie_core::UnaryFn;

fn horner(cs: &[Q], x: &Q) -> Q {
    cs.iter().fold(q(0), |acc, c| acc * x + c)
}

fn sign(v: &Q) -> i8 {
    match v.cmp(&q(0)) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}

/// Independent ten-way subdivision over exact polynomial values.
fn oracle_brackets(cs: &[Q], lo: Q, hi: Q, k: usize) -> (Vec<(Q, Q)>, Option<Q>) {
    let mut out = vec![(lo.clone(), hi.clone())];
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..k {
        let w = (&hi - &lo) / q(10);
        let s_lo = sign(&horner(cs, &lo));
        let mut next = None;
        for i in 1..=10 {
            let g = &lo + &w * q(i);
            let s = sign(&horner(cs, &g));
            if s == 0 {
                return (out, Some(g));
            }
            if s != s_lo {
                next = Some((&g - &w, g));
                break;
            }
        }
        let (a, b) = next.expect("bracket keeps a sign change");
        lo = a;
        hi = b;
        out.push((lo.clone(), hi.clone()));
    }
    (out, None)
}

fn render_poly(cs: &[Q]) -> String {
    let deg = cs.len() - 1;
    cs.iter().enumerate().map(|(i, c)| format!("({c})*x^{}", deg - i)).collect::<Vec<_>>().join(" + ")
}

/// Random cubics with an integer-aligned sign-change bracket.
fn cubic_corpus(count: usize) -> Vec<(Vec<Q>, Q, Q)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let mut out = Vec::new();
    while out.len() < count {
        let mut cs: Vec<Q> = (0..4).map(|_| q2(rng.gen_range(-50..=50), rng.gen_range(1..=7))).collect();
        if cs[0] == q(0) {
            cs[0] = q(1);
        }
        let bracket = (-40i64..40).find(|&m| {
            let (a, b) = (horner(&cs, &q(m)), horner(&cs, &q(m + 1)));
            sign(&a) * sign(&b) < 0
        });
        if let Some(m) = bracket {
            out.push((cs, q(m), q(m + 1)));
        }
    }
    out
}

#[test]
fn stevin_and_cauchy_coincide_on_random_cubics() {
    for (cs, lo, hi) in cubic_corpus(20) {
        let f = UnaryFn::parse(&render_poly(&cs)).unwrap();
        let b = Bracket::new(&f, lo.clone(), hi.clone(), 50).unwrap();
        let stevin = stevin_digits(&f, &b, 8, 50).unwrap();
        let cauchy = cauchy_ivt(&f, &b, 10, 8, 50).unwrap();
        assert_eq!(stevin.brackets, cauchy.brackets);
        assert_eq!(stevin.exact_hit, cauchy.exact_hit);
        let (oracle, hit) = oracle_brackets(&cs, lo, hi, 8);
        assert_eq!(hit, stevin.exact_hit);
        let got: Vec<(Q, Q)> = stevin.brackets.iter().map(|b| (b.lo.clone(), b.hi.clone())).collect();
        assert_eq!(got, oracle);
        for (k, br) in stevin.brackets.iter().enumerate() {
            assert_eq!(br.width(), Q::new(1.into(), BigInt::from(10).pow(k as u32)));
            assert!(sign(&horner(&cs, &br.lo)) * sign(&horner(&cs, &br.hi)) < 0);
        }
    }
}

/// √2 by digit-by-digit long division.
fn long_division_sqrt2(digits: usize) -> String {
    let (mut rem, mut root) = (BigInt::from(0), BigInt::from(0));
    let mut out = String::new();
    let pairs = std::iter::once(2u32).chain(std::iter::repeat(0)).take(digits + 1);
    for (i, pair) in pairs.enumerate() {
        rem = rem * 100 + pair;
        let mut d = 9u32;
        while (&root * 20 + d) * d > rem {
            d -= 1;
        }
        rem -= (&root * 20 + d) * d;
        root = root * 10 + d;
        out.push_str(&d.to_string());
        if i == 0 {
            out.push('.');
        }
    }
    out
}

#[test]
fn square_root_of_two_matches_long_division() {
    let f = UnaryFn::parse("x^2 - 2").unwrap();
    let b = Bracket::new(&f, q(1), q(2), 50).unwrap();
    let d = stevin_digits(&f, &b, 8, 50).unwrap();
    assert_eq!(long_division_sqrt2(8), "1.41421356");
    assert_eq!(d.render(), long_division_sqrt2(8));
    for br in &d.brackets {
        assert!(&br.lo * &br.lo < q(2) && q(2) < &br.hi * &br.hi);
    }
}

#[test]
fn known_roots_lie_in_every_bracket() {
    for (src, lo, hi, root) in [
        ("x^3 - 300*x - 33915024", q(0), q(1000), q(324)),
        ("2*x - 1", q(0), q(1), q2(1, 2)),
        ("(x - 1/3)*(x + 5)", q(0), q(1), q2(1, 3)),
    ] {
        let f = UnaryFn::parse(src).unwrap();
        let b = Bracket::new(&f, lo, hi, 50).unwrap();
        for m in [2u32, 3, 7, 10] {
            let r = cauchy_ivt(&f, &b, m, 12, 50).unwrap();
            assert!(r.brackets.iter().all(|b| b.contains(&root)), "{src}, m = {m}");
            assert!(r.brackets.windows(2).all(|w| w[1].nests_in(&w[0])));
            if let Some(hit) = r.exact_hit {
                assert_eq!(hit, root);
            }
        }
    }
}

/// ⌈log_m(width_0 / w)⌉ rounds reach any target width.
#[test]
fn widths_shrink_as_far_as_asked() {
    let f = UnaryFn::parse("x^3 - 2*x - 5").unwrap();
    let b = Bracket::new(&f, q(2), q(3), 50).unwrap();
    for m in [2u32, 5, 10] {
        for exp in [1u32, 4, 9, 15] {
            let target = Q::new(1.into(), BigInt::from(10).pow(exp));
            let mut iters = 0usize;
            let mut width = b.width();
            while width > target {
                width /= q(m as i64);
                iters += 1;
            }
            let r = cauchy_ivt(&f, &b, m, iters, 50).unwrap();
            assert!(r.exact_hit.is_none());
            assert!(r.last().width() <= target);
            assert_eq!(r.last().width(), b.width() / Q::from_integer(BigInt::from(m).pow(iters as u32)));
        }
    }
}
