use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{Exponent, Expr, Func};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Q};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
    /// Whitespace separates this token from the previous one.
    spaced: bool,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut spaced = false;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            spaced = true;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let text = &src[start..i];
            if text.matches('.').count() > 1 {
                return Err(Error::Syntax { pos: start, msg: format!("malformed number {text:?}") });
            }
            Tok::Num(text.to_string())
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(src[start..i].to_string())
        } else if "+-*/^()".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(Error::Syntax { pos: start, msg: format!("unexpected character {c:?}") });
        };
        out.push(Token { tok, pos: start, spaced });
        spaced = false;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    len: usize,
}

/// Parses an expression in the grammar documented on the module.
pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, len: src.len() };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(Error::Syntax { pos: t.pos, msg: format!("unexpected {:?}", t.tok) });
    }
    Ok(e)
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.at)
    }

    fn peek_at(&self, k: usize) -> Option<&Token> {
        self.toks.get(self.at + k)
    }

    fn pos(&self) -> usize {
        self.peek().map_or(self.len, |t| t.pos)
    }

    fn is_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Syntax { pos: self.pos(), msg: format!("expected '{c}'") })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.eat('^') {
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64> {
        let pos = self.pos();
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Num(text)) if !text.contains('.') => {
                self.at += 1;
                text.parse::<i64>().map_err(|_| Error::Syntax { pos, msg: "exponent out of range".into() })
            }
            _ => Err(Error::Syntax { pos, msg: "expected an integer exponent".into() }),
        }
    }

    fn exponent(&mut self) -> Result<Exponent> {
        let pos = self.pos();
        if self.eat('(') {
            let negate = self.eat('-');
            let e = match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Ident(name)) => {
                    self.at += 1;
                    let offset = if self.eat('+') {
                        self.integer()?
                    } else if self.eat('-') {
                        -self.integer()?
                    } else {
                        0
                    };
                    Exponent::Var { name, negate, offset }
                }
                Some(Tok::Num(_)) => {
                    let k = self.integer()?;
                    Exponent::Int(if negate { -k } else { k })
                }
                _ => return Err(Error::Syntax { pos, msg: "expected an exponent".into() }),
            };
            self.expect(')')?;
            return self.exponent_tail(e, pos);
        }
        let negate = self.eat('-');
        let e = match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Ident(name)) if Func::from_name(&name).is_none() => {
                self.at += 1;
                Exponent::Var { name, negate, offset: 0 }
            }
            _ => {
                let k = self.integer()?;
                Exponent::Int(if negate { -k } else { k })
            }
        };
        self.exponent_tail(e, pos)
    }

    /// Right-associative chains of literal exponents fold: `x^2^3 = x^8`.
    fn exponent_tail(&mut self, e: Exponent, pos: usize) -> Result<Exponent> {
        if !self.eat('^') {
            return Ok(e);
        }
        let rhs = self.exponent()?;
        match (e, rhs) {
            (Exponent::Int(a), Exponent::Int(b)) if b >= 0 => {
                let v = BigInt::from(a).pow(b.to_u32().unwrap_or(u32::MAX));
                v.to_i64().map(Exponent::Int).ok_or(Error::Syntax { pos, msg: "exponent out of range".into() })
            }
            _ => Err(Error::Syntax { pos, msg: "only literal integer exponents can be chained".into() }),
        }
    }

    fn number(&mut self, text: &str, pos: usize) -> Result<Q> {
        parse_rational(text).map_err(|_| Error::Syntax { pos, msg: format!("malformed number {text:?}") })
    }

    fn base(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::Syntax { pos, msg: "unexpected end of input".into() });
        };
        match tok.tok {
            Tok::Num(text) => {
                self.at += 1;
                let mut v = self.number(&text, pos)?;
                // p/q written tightly is one literal, unless a power follows
                if !text.contains('.') {
                    if let (Some(slash), Some(den)) = (self.peek(), self.peek_at(1)) {
                        let tight = !slash.spaced && !den.spaced;
                        let after_is_pow = matches!(self.peek_at(2), Some(Token { tok: Tok::Sym('^'), .. }));
                        if slash.tok == Tok::Sym('/') && tight && !after_is_pow {
                            if let Tok::Num(d) = &den.tok {
                                if !d.contains('.') {
                                    let dpos = den.pos;
                                    let d = self.number(&d.clone(), dpos)?;
                                    if d.is_zero() {
                                        return Err(Error::Syntax { pos: dpos, msg: "zero denominator".into() });
                                    }
                                    self.at += 2;
                                    v /= d;
                                }
                            }
                        }
                    }
                }
                Ok(Expr::Const(v))
            }
            Tok::Ident(name) => {
                self.at += 1;
                if self.is_sym('(') {
                    let Some(f) = Func::from_name(&name) else {
                        return Err(Error::UnknownFunction(name));
                    };
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                if Func::from_name(&name).is_some() {
                    return Err(Error::Syntax { pos, msg: format!("function {name} needs an argument") });
                }
                Ok(Expr::Var(name))
            }
            Tok::Sym('(') => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym('-') => {
                self.at += 1;
                Ok(Expr::Neg(Box::new(self.base()?)))
            }
            Tok::Sym(c) => Err(Error::Syntax { pos, msg: format!("unexpected '{c}'") }),
        }
    }
}
