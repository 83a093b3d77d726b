use num_traits::ToPrimitive;

use super::{Exponent, Expr, Func};
use crate::error::{Error, Result};
use crate::rational::to_f64;

/// Double-precision evaluation, used by quadrature where exact tiers would
/// be far too slow.
pub fn eval_f64(e: &Expr, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64> {
    let rec = |x: &Expr| eval_f64(x, lookup);
    let v = match e {
        Expr::Const(c) => to_f64(c),
        Expr::Var(v) => lookup(v).ok_or_else(|| Error::UnboundVariable(v.clone()))?,
        Expr::Add(a, b) => rec(a)? + rec(b)?,
        Expr::Sub(a, b) => rec(a)? - rec(b)?,
        Expr::Mul(a, b) => rec(a)? * rec(b)?,
        Expr::Div(a, b) => {
            let d = rec(b)?;
            if d == 0.0 {
                return Err(Error::Domain("division by zero".into()));
            }
            rec(a)? / d
        }
        Expr::Neg(a) => -rec(a)?,
        Expr::Pow(b, ex) => {
            let k = match ex {
                Exponent::Int(k) => *k as f64,
                Exponent::Var { name, negate, offset } => {
                    let v = lookup(name).ok_or_else(|| Error::UnboundVariable(name.clone()))?;
                    (if *negate { -v } else { v }) + *offset as f64
                }
            };
            let base = rec(b)?;
            match k.to_i32() {
                Some(k) => base.powi(k),
                None => base.powf(k),
            }
        }
        Expr::Call(f, a) => {
            let x = rec(a)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Ln if x > 0.0 => x.ln(),
                Func::Sqrt if x >= 0.0 => x.sqrt(),
                Func::Ln | Func::Sqrt => {
                    return Err(Error::Domain(format!("{}({x}) is undefined", f.name())));
                }
                Func::Abs => x.abs(),
                Func::Atan => x.atan(),
            }
        }
    };
    Ok(v)
}
