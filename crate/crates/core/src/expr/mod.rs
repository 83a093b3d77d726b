//! A small arithmetic language over rationals, variables and the elementary
//! functions, evaluated on both tiers: exact series via Taylor jets and
//! streams pointwise.
//!
//! Grammar:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := base ('^' exponent)?
//! base     := number | ident | ident '(' expr ')' | '(' expr ')' | '-' base
//! exponent := '-'? (integer | ident) ('^' exponent)?
//!           | '(' '-'? ident (('+' | '-') integer)? ')'
//! number   := digits ('.' digits)? | digits '/' digits
//! ```
//!
//! Unary minus binds tighter than `^`, so `-x^2` is `(-x)^2`. A literal
//! `p/q` written without spaces and not followed by `^` is a single rational
//! constant. Exponents are integers, or an integer-valued variable such as
//! the stream index `n` (`2^n`, `10^-k`).

mod diff;
mod eval;
mod float;
mod jet;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::rational::{render_exact, Q};

pub use diff::symbolic_derivative;
pub use eval::{eval_point, eval_scalar, eval_series, eval_stream, EvalContext};
pub use float::eval_f64;
pub use jet::taylor_coefficients;
pub use parse::parse;

/// Names with a fixed meaning: `eps` and `H` are the canonical
/// infinitesimal and its reciprocal; `n` is the stream index.
pub const RESERVED: [&str; 3] = ["eps", "H", "n"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Atan,
}

impl Func {
    pub const ALL: [Func; 7] = [Func::Sin, Func::Cos, Func::Exp, Func::Ln, Func::Sqrt, Func::Abs, Func::Atan];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Atan => "atan",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// An integer exponent, literal or `±var + offset` for a variable that must
/// hold an integer when evaluated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Int(i64),
    Var { name: String, negate: bool, offset: i64 },
}

impl Exponent {
    pub fn var(name: &str) -> Self {
        Exponent::Var { name: name.into(), negate: false, offset: 0 }
    }

    /// The exponent as an expression (used by differentiation).
    pub fn to_expr(&self) -> Expr {
        match self {
            Exponent::Int(k) => Expr::int(*k),
            Exponent::Var { name, negate, offset } => {
                let v = Expr::Var(name.clone());
                let v = if *negate { Expr::Neg(Box::new(v)) } else { v };
                match offset {
                    0 => v,
                    k if *k > 0 => Expr::Add(Box::new(v), Box::new(Expr::int(*k))),
                    k => Expr::Sub(Box::new(v), Box::new(Expr::int(-k))),
                }
            }
        }
    }

    pub fn shifted(&self, by: i64) -> Self {
        match self {
            Exponent::Int(k) => Exponent::Int(k + by),
            Exponent::Var { name, negate, offset } => {
                Exponent::Var { name: name.clone(), negate: *negate, offset: offset + by }
            }
        }
    }

    pub fn resolve(&self, lookup: impl Fn(&str) -> Result<Q>) -> Result<num_bigint::BigInt> {
        match self {
            Exponent::Int(k) => Ok((*k).into()),
            Exponent::Var { name, negate, offset } => {
                let v = lookup(name)?;
                if !v.is_integer() {
                    return Err(Error::Domain(format!("exponent {name} = {} is not an integer", render_exact(&v))));
                }
                let i = v.to_integer();
                let i = if *negate { -i } else { i };
                Ok(i + offset)
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Int(k) => write!(f, "{k}"),
            Exponent::Var { name, negate, offset } => {
                let sign = if *negate { "-" } else { "" };
                match offset {
                    0 => write!(f, "{sign}{name}"),
                    k if *k > 0 => write!(f, "({sign}{name}+{k})"),
                    k => write!(f, "({sign}{name}-{})", -k),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Q),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn int(k: i64) -> Expr {
        Expr::Const(crate::rational::q(k))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.into())
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// Variables other than `eps` and `H`, including those used as exponents.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                if v != "eps" && v != "H" {
                    out.insert(v.clone());
                }
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Pow(b, e) => {
                b.collect_vars(out);
                if let Exponent::Var { name, .. } = e {
                    out.insert(name.clone());
                }
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
        }
    }

    /// Uses an elementary function other than `abs`.
    pub fn is_transcendental(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_transcendental() || b.is_transcendental()
            }
            Expr::Pow(b, _) => b.is_transcendental(),
            Expr::Neg(a) => a.is_transcendental(),
            Expr::Call(Func::Abs, a) => a.is_transcendental(),
            Expr::Call(_, _) => true,
        }
    }

    /// Some subexpression grows exponentially in `var` (a power with `var`
    /// in the exponent, or `exp` of something depending on it).
    pub fn grows_exponentially_in(&self, var: &str) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.grows_exponentially_in(var) || b.grows_exponentially_in(var)
            }
            Expr::Pow(b, e) => {
                let unit_base = matches!(&**b, Expr::Const(c) if c.abs().is_one())
                    || matches!(&**b, Expr::Neg(inner) if matches!(&**inner, Expr::Const(c) if c.is_one()));
                let var_exp = matches!(e, Exponent::Var { name, .. } if name == var);
                (var_exp && !unit_base) || b.grows_exponentially_in(var)
            }
            Expr::Neg(a) => a.grows_exponentially_in(var),
            Expr::Call(Func::Exp, a) => a.free_vars().contains(var) || a.grows_exponentially_in(var),
            Expr::Call(_, a) => a.grows_exponentially_in(var),
        }
    }

    /// Replaces every occurrence of variable `name` by `with`.
    pub fn substitute(&self, name: &str, with: &Expr) -> Expr {
        let s = |e: &Expr| Box::new(e.substitute(name, with));
        match self {
            Expr::Var(v) if v == name => with.clone(),
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Add(a, b) => Expr::Add(s(a), s(b)),
            Expr::Sub(a, b) => Expr::Sub(s(a), s(b)),
            Expr::Mul(a, b) => Expr::Mul(s(a), s(b)),
            Expr::Div(a, b) => Expr::Div(s(a), s(b)),
            Expr::Pow(b, e) => Expr::Pow(s(b), e.clone()),
            Expr::Neg(a) => Expr::Neg(s(a)),
            Expr::Call(f, a) => Expr::Call(*f, s(a)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Const(c) if !c.is_integer() && !c.is_negative() => 2,
            _ => 3,
        }
    }

    /// Can appear as `base` in the grammar without parentheses.
    fn is_base(&self) -> bool {
        match self {
            Expr::Const(c) => c.is_integer() || c.is_negative(),
            Expr::Var(_) | Expr::Call(..) => true,
            _ => false,
        }
    }
}

fn fmt_base(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if e.is_base() {
        write!(f, "{e}")
    } else {
        write!(f, "({e})")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, level: u8| -> fmt::Result {
            if a.precedence() < level {
                write!(f, "({a})")?;
            } else {
                write!(f, "{a}")?;
            }
            write!(f, " {op} ")?;
            // left associative: equal precedence on the right needs parentheses
            if b.precedence() <= level {
                write!(f, "({b})")
            } else {
                write!(f, "{b}")
            }
        };
        match self {
            Expr::Const(c) if c.is_negative() => write!(f, "({})", render_exact(c)),
            Expr::Const(c) => f.write_str(&render_exact(c)),
            Expr::Var(v) => f.write_str(v),
            Expr::Add(a, b) => binary(f, a, "+", b, 1),
            Expr::Sub(a, b) => binary(f, a, "-", b, 1),
            Expr::Mul(a, b) => binary(f, a, "*", b, 2),
            Expr::Div(a, b) => binary(f, a, "/", b, 2),
            Expr::Pow(b, e) => {
                fmt_base(b, f)?;
                write!(f, "^{e}")
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                fmt_base(a, f)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A one-variable function `f(var)` for the calculus and root finders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryFn {
    pub expr: Expr,
    pub var: String,
}

impl UnaryFn {
    /// Infers the variable: the single free variable, or `x` for constants.
    pub fn new(expr: Expr) -> Result<Self> {
        let vars = expr.free_vars();
        let var = match vars.len() {
            0 => "x".to_string(),
            1 => vars.into_iter().next().unwrap_or_default(),
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "expected a function of one variable, found {}",
                    vars.into_iter().collect::<Vec<_>>().join(", ")
                )))
            }
        };
        Ok(UnaryFn { expr, var })
    }

    pub fn parse(src: &str) -> Result<Self> {
        UnaryFn::new(parse(src)?)
    }
}

impl fmt::Display for UnaryFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}
