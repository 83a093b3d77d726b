//! Root extraction over exact rationals: Stevin's ten-way subdivision, one
//! decimal digit per step, and Cauchy's m-way subdivision.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::expr::{eval_point, UnaryFn};
use crate::rational::{floor_nat, log2_floor, pow10, q, render_exact, Q};

/// Number of precision escalations (P, 2P, 4P, 8P) before giving up on a sign.
const ESCALATIONS: u32 = 4;

/// Exact sign of `f(x)`; transcendental values are evaluated as balls,
/// doubling the precision until the ball excludes zero.
pub fn sign_at(f: &UnaryFn, x: &Q, digits: u32) -> Result<i8> {
    let mut p = digits;
    for _ in 0..ESCALATIONS {
        let v = eval_point(&f.expr, &[(f.var.as_str(), x.clone())], p)?;
        match v.sign() {
            Some(Ordering::Less) => return Ok(-1),
            Some(Ordering::Equal) => return Ok(0),
            Some(Ordering::Greater) => return Ok(1),
            None => p *= 2,
        }
    }
    Err(Error::SignUndecidable(format!("{f} at {} (up to {} digits)", render_exact(x), p / 2)))
}

/// `[lo, hi]` with the signs of `f` at both ends, which differ or vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub lo: Q,
    pub hi: Q,
    pub sign_lo: i8,
    pub sign_hi: i8,
}

impl Bracket {
    pub fn new(f: &UnaryFn, lo: Q, hi: Q, digits: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!(
                "bracket [{}, {}] is reversed",
                render_exact(&lo),
                render_exact(&hi)
            )));
        }
        let sign_lo = sign_at(f, &lo, digits)?;
        let sign_hi = sign_at(f, &hi, digits)?;
        if sign_lo * sign_hi > 0 {
            return Err(Error::NoSignChange(format!(
                "{f} has sign {sign_lo} at both {} and {}",
                render_exact(&lo),
                render_exact(&hi)
            )));
        }
        Ok(Bracket { lo, hi, sign_lo, sign_hi })
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn nests_in(&self, outer: &Bracket) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }
}

/// Bracket history of a subdivision run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    /// Initial bracket followed by one bracket per completed step.
    pub brackets: Vec<Bracket>,
    /// Index of the chosen cell at each step (the grid point index for a hit).
    pub cells: Vec<u32>,
    /// A grid point where `f` vanishes exactly.
    pub exact_hit: Option<Q>,
}

impl Subdivision {
    pub fn last(&self) -> &Bracket {
        self.brackets.last().expect("a subdivision always holds its initial bracket")
    }
}

enum Step {
    Hit(u32, Q),
    Cell(u32, Bracket),
}

/// Splits into `m` equal cells and scans the grid left to right for the
/// first sign change.
fn split(f: &UnaryFn, b: &Bracket, m: u32, digits: u32) -> Result<Step> {
    let w = b.width() / q(m as i64);
    for i in 1..m {
        let g = &b.lo + &w * q(i as i64);
        let s = sign_at(f, &g, digits)?;
        if s == 0 {
            return Ok(Step::Hit(i, g));
        }
        if s != b.sign_lo {
            let lo = &g - &w;
            return Ok(Step::Cell(i - 1, Bracket { lo, hi: g, sign_lo: b.sign_lo, sign_hi: s }));
        }
    }
    if b.sign_hi == 0 {
        return Ok(Step::Hit(m, b.hi.clone()));
    }
    if b.sign_hi != b.sign_lo {
        let lo = &b.hi - &w;
        return Ok(Step::Cell(m - 1, Bracket { lo, hi: b.hi.clone(), sign_lo: b.sign_lo, sign_hi: b.sign_hi }));
    }
    Err(Error::NoSignChange(format!(
        "{f} keeps sign {} across [{}, {}]",
        b.sign_lo,
        render_exact(&b.lo),
        render_exact(&b.hi)
    )))
}

/// Cauchy's procedure: `iters` rounds of `m`-way subdivision, keeping the
/// leftmost cell with a sign change.
pub fn cauchy_ivt(f: &UnaryFn, b: &Bracket, m: u32, iters: usize, digits: u32) -> Result<Subdivision> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("m must be at least 2, got {m}")));
    }
    let mut out = Subdivision { brackets: vec![b.clone()], cells: Vec::new(), exact_hit: None };
    if b.sign_lo == 0 {
        out.exact_hit = Some(b.lo.clone());
        return Ok(out);
    }
    for _ in 0..iters {
        match split(f, out.last(), m, digits)? {
            Step::Hit(i, x) => {
                out.cells.push(i);
                out.exact_hit = Some(x);
                break;
            }
            Step::Cell(i, next) => {
                out.cells.push(i);
                out.brackets.push(next);
            }
        }
    }
    Ok(out)
}

/// Stevin's decimal expansion of a root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitExpansion {
    /// Sign of the reported value (the exact hit, or the final lower end).
    pub sign: i8,
    pub integer_part: BigUint,
    /// The digit chosen at each step (index of the cell among ten).
    pub digits: Vec<u8>,
    pub brackets: Vec<Bracket>,
    pub exact_hit: Option<Q>,
}

impl DigitExpansion {
    /// The value as text: the exact hit as a rational, otherwise the lower
    /// end of the final bracket with as many decimals as its width carries.
    pub fn render(&self) -> String {
        if let Some(x) = &self.exact_hit {
            return render_exact(x);
        }
        let last = self.brackets.last().expect("expansions keep their initial bracket");
        let places = decimal_places(&last.width());
        render_fixed(&last.lo, places)
    }
}

/// Smallest `p` with `10^-p ≤ w`.
fn decimal_places(w: &Q) -> usize {
    if w.is_zero() {
        return 0;
    }
    let mut p = 0usize;
    let guess = log2_floor(w).unwrap_or(0);
    if guess < 0 {
        p = ((-guess) as f64 * std::f64::consts::LOG10_2).floor().max(0.0) as usize;
        p = p.saturating_sub(1);
    }
    while Q::new(1.into(), pow10(p as u32)) > *w {
        p += 1;
    }
    p
}

/// Decimal with exactly `places` fractional digits, rounded toward -inf.
fn render_fixed(v: &Q, places: usize) -> String {
    let scaled = (v * Q::from_integer(pow10(places as u32))).floor().to_integer();
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let digits =
        if digits.len() <= places { format!("{}{}", "0".repeat(places + 1 - digits.len()), digits) } else { digits };
    let (ip, fp) = digits.split_at(digits.len() - places);
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{fp}")
    }
}

/// Stevin's procedure: `k` rounds of ten-way subdivision, one digit each,
/// stopping early on an exact grid hit.
pub fn stevin_digits(f: &UnaryFn, b: &Bracket, k: usize, digits: u32) -> Result<DigitExpansion> {
    if k == 0 {
        return Err(Error::InvalidArgument("at least one digit is required".into()));
    }
    let run = cauchy_ivt(f, b, 10, k, digits)?;
    let value = run.exact_hit.clone().unwrap_or_else(|| run.last().lo.clone());
    let sign = match value.cmp(&Q::zero()) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    };
    Ok(DigitExpansion {
        sign,
        integer_part: floor_nat(&value.abs()),
        digits: run.cells.iter().map(|c| *c as u8).collect(),
        brackets: run.brackets,
        exact_hit: run.exact_hit,
    })
}
