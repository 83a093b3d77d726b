use std::cmp::Ordering;

use num_traits::One;

use super::eval::apply_ball;
use super::Func;
use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::rational::{q, q2, Q};

/// Taylor coefficients `f^(k)(s) / k!` for `k < n`, computed from closed-form
/// recurrences in ball arithmetic at `digits` decimal digits.
pub fn taylor_coefficients(f: Func, s: &Coefficient, n: usize, digits: u32) -> Result<Vec<Coefficient>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(n);
    match f {
        Func::Exp => {
            let e = apply_ball(Func::Exp, s, digits)?;
            let mut fact = Q::one();
            for k in 0..n {
                if k > 0 {
                    fact *= q(k as i64);
                }
                out.push(e.scale(&fact.recip()));
            }
        }
        Func::Sin | Func::Cos => {
            let sn = apply_ball(Func::Sin, s, digits)?;
            let cs = apply_ball(Func::Cos, s, digits)?;
            let cycle = match f {
                Func::Sin => [sn.clone(), cs.clone(), neg(&sn), neg(&cs)],
                _ => [cs.clone(), neg(&sn), neg(&cs), sn.clone()],
            };
            let mut fact = Q::one();
            for k in 0..n {
                if k > 0 {
                    fact *= q(k as i64);
                }
                out.push(cycle[k % 4].scale(&fact.recip()));
            }
        }
        Func::Ln => {
            out.push(apply_ball(Func::Ln, s, digits)?);
            let inv = s.recip()?;
            let mut p = Coefficient::one();
            for k in 1..n {
                p = p.mul(&inv);
                let sign = if k % 2 == 1 { 1 } else { -1 };
                out.push(p.scale(&q2(sign, k as i64)));
            }
        }
        Func::Sqrt => {
            let r = apply_ball(Func::Sqrt, s, digits)?;
            let inv = s.recip()?;
            let mut binom = Q::one();
            let mut p = r;
            out.push(p.clone());
            for k in 1..n {
                // C(1/2, k) = C(1/2, k-1) · (1/2 - (k-1)) / k
                binom = binom * (q2(1, 2) - q(k as i64 - 1)) / q(k as i64);
                p = p.mul(&inv);
                out.push(p.scale(&binom));
            }
        }
        Func::Atan => {
            out.push(apply_ball(Func::Atan, s, digits)?);
            // atan' = 1/g with g(t) = 1 + (s+t)^2 = g0 + g1 t + t^2
            let g0 = Coefficient::one().add(&s.mul(s));
            let g1 = s.scale(&q(2));
            let inv_g0 = g0.recip()?;
            let mut h: Vec<Coefficient> = Vec::with_capacity(n);
            for k in 0..n.saturating_sub(1) {
                let hk = if k == 0 {
                    inv_g0.clone()
                } else {
                    let mut acc = g1.mul(&h[k - 1]);
                    if k >= 2 {
                        acc = acc.add(&h[k - 2]);
                    }
                    neg(&acc.mul(&inv_g0))
                };
                h.push(hk);
            }
            for (k, hk) in h.iter().enumerate() {
                out.push(hk.scale(&q2(1, k as i64 + 1)));
            }
        }
        Func::Abs => {
            let sign = match s.sign() {
                Some(Ordering::Greater) => q(1),
                Some(Ordering::Less) => q(-1),
                Some(Ordering::Equal) => return Err(Error::Domain("abs has no Taylor expansion at 0".into())),
                None => return Err(Error::PrecisionUndecided),
            };
            out.push(s.abs());
            if n > 1 {
                out.push(Coefficient::exact(sign));
            }
            out.resize(n, Coefficient::zero());
        }
    }
    out.truncate(n);
    Ok(out)
}

fn neg(c: &Coefficient) -> Coefficient {
    c.scale(&-Q::one())
}
