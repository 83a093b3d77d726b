use num_traits::{One, Zero};

use super::{Exponent, Expr, Func};

fn as_const(e: &Expr) -> Option<&crate::rational::Q> {
    match e {
        Expr::Const(c) => Some(c),
        _ => None,
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => Expr::Const(x + y),
        (Some(x), _) if x.is_zero() => b,
        (_, Some(y)) if y.is_zero() => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => Expr::Const(x - y),
        (Some(x), _) if x.is_zero() => neg(b),
        (_, Some(y)) if y.is_zero() => a,
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => Expr::Const(x * y),
        (Some(x), _) | (_, Some(x)) if x.is_zero() => Expr::int(0),
        (Some(x), _) if x.is_one() => b,
        (_, Some(y)) if y.is_one() => a,
        (_, Some(_)) => Expr::Mul(Box::new(b), Box::new(a)),
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) if !y.is_zero() => Expr::Const(x / y),
        (Some(x), _) if x.is_zero() => Expr::int(0),
        (_, Some(y)) if y.is_one() => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

fn pow(b: Expr, e: Exponent) -> Expr {
    match e {
        Exponent::Int(0) => Expr::int(1),
        Exponent::Int(1) => b,
        e => Expr::Pow(Box::new(b), e),
    }
}

/// d e / d var by the usual rewrite rules, with light constant folding.
pub fn symbolic_derivative(e: &Expr, var: &str) -> Expr {
    let d = |x: &Expr| symbolic_derivative(x, var);
    match e {
        Expr::Const(_) => Expr::int(0),
        Expr::Var(v) => Expr::int(if v == var { 1 } else { 0 }),
        Expr::Add(a, b) => add(d(a), d(b)),
        Expr::Sub(a, b) => sub(d(a), d(b)),
        Expr::Mul(a, b) => add(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
        Expr::Div(a, b) => {
            let (a, b) = (&**a, &**b);
            let da = d(a);
            let db = d(b);
            if matches!(as_const(&db), Some(c) if c.is_zero()) {
                return div(da, b.clone());
            }
            div(sub(mul(da, b.clone()), mul(a.clone(), db)), pow(b.clone(), Exponent::Int(2)))
        }
        Expr::Neg(a) => neg(d(a)),
        Expr::Pow(b, ex) => {
            let base = &**b;
            let depends = matches!(ex, Exponent::Var { name, .. } if name == var);
            if depends {
                // b^g · (g' ln b + g b' / b)
                let g = ex.to_expr();
                let dg = d(&g);
                let ln_b = Expr::call(Func::Ln, base.clone());
                let inner = add(mul(dg, ln_b), div(mul(g, d(base)), base.clone()));
                return mul(e.clone(), inner);
            }
            // Powers of sqrt and abs differentiate without nesting quotients.
            if let (Expr::Call(f @ (Func::Sqrt | Func::Abs), u), Exponent::Int(k)) = (base, ex) {
                let lowered = pow(base.clone(), Exponent::Int(k - 2));
                return match f {
                    Func::Sqrt => mul(mul(Expr::Const(crate::rational::q2(*k, 2)), lowered), d(u)),
                    _ => mul(mul(mul(Expr::int(*k), lowered), (**u).clone()), d(u)),
                };
            }
            let k = ex.to_expr();
            mul(mul(k, pow(base.clone(), ex.shifted(-1))), d(base))
        }
        Expr::Call(f, a) => {
            let arg = (**a).clone();
            let outer = match f {
                Func::Sin => Expr::call(Func::Cos, arg),
                Func::Cos => neg(Expr::call(Func::Sin, arg)),
                Func::Exp => Expr::call(Func::Exp, arg),
                Func::Ln => return div(d(a), arg),
                Func::Sqrt => {
                    mul(Expr::Const(crate::rational::q2(1, 2)), pow(Expr::call(Func::Sqrt, arg), Exponent::Int(-1)))
                }
                Func::Atan => return div(d(a), add(Expr::int(1), pow(arg, Exponent::Int(2)))),
                Func::Abs => mul(arg.clone(), pow(Expr::call(Func::Abs, arg), Exponent::Int(-1))),
            };
            mul(outer, d(a))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn d(src: &str) -> String {
        symbolic_derivative(&parse(src).unwrap(), "x").to_string()
    }

    #[test]
    fn textbook_rules() {
        assert_eq!(symbolic_derivative(&parse("x^2").unwrap(), "x"), parse("2*x").unwrap());
        assert_eq!(symbolic_derivative(&parse("sin(x)").unwrap(), "x"), parse("cos(x)").unwrap());
        assert_eq!(symbolic_derivative(&parse("ln(x)").unwrap(), "x"), parse("1 / x").unwrap());
        assert_eq!(d("5"), "0");
        assert_eq!(d("x^3 - 300*x - 33915024"), "3 * x^2 - 300");
        assert_eq!(d("exp(2*x)"), "2 * exp(2 * x)");
        assert_eq!(d("atan(x)"), "1 / (1 + x^2)");
        assert_eq!(d("sqrt(x)"), "1/2 * sqrt(x)^-1");
        assert_eq!(d("sqrt(x)^3"), "3/2 * sqrt(x)");
        assert_eq!(d("abs(x)"), "x * abs(x)^-1");
    }

    #[test]
    fn other_variables_are_constants() {
        assert_eq!(d("n*x"), "n");
        assert_eq!(d("x^n"), "n * x^(n-1)");
    }
}
