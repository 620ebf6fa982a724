//! A small expression parser for polynomials and rational functions given as
//! strings in named variables (geometry configs, golden tests, CLI input).
//!
//! Grammar: `+ - * / ^` with the usual precedence, parentheses, integer
//! literals, identifiers.  No implicit multiplication.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut out = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Token::Slash));
                i += 1;
            }
            '^' => {
                out.push((i, Token::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let text = &input[start..i];
                let v = text.parse().map_err(|_| ParseError {
                    pos: start,
                    message: format!("integer literal too large: {text}"),
                })?;
                out.push((start, Token::Int(v)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Token::Ident(input[start..i].to_string())));
            }
            other => {
                return Err(ParseError { pos: i, message: format!("unexpected character {other:?}") })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(usize::MAX)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Token) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError { pos: self.here(), message: format!("expected {t:?}") })
        }
    }

    // sum := product (('+'|'-') product)*
    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    let rhs = self.product()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    let rhs = self.product()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // product := unary (('*'|'/') unary)*
    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            let e = self.unary()?;
            return Ok(Expr::Neg(Box::new(e)));
        }
        self.power()
    }

    // power := atom ('^' ['-'] int)?
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            let mut sign = 1i64;
            if self.peek() == Some(&Token::Minus) {
                self.pos += 1;
                sign = -1;
            }
            match self.bump() {
                Some(Token::Int(e)) => Ok(Expr::Pow(Box::new(base), sign * e)),
                _ => Err(ParseError { pos: self.here(), message: "expected integer exponent".into() }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.bump() {
            Some(Token::Int(v)) => Ok(Expr::Int(v)),
            Some(Token::Ident(n)) => Ok(Expr::Var(n)),
            Some(Token::LParen) => {
                let e = self.sum()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            other => Err(ParseError {
                pos: self.here(),
                message: format!("expected atom, found {other:?}"),
            }),
        }
    }
}

pub fn parse(input: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(input)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.sum()?;
    if p.pos != p.tokens.len() {
        return Err(ParseError { pos: p.here(), message: "trailing input".into() });
    }
    Ok(e)
}

/// Evaluate an expression in any algebra with the needed operations.
pub trait ExprAlgebra: Sized {
    fn from_int(n: i64) -> Self;
    fn var(name: &str) -> Result<Self, String>;
    fn add(a: Self, b: Self) -> Self;
    fn sub(a: Self, b: Self) -> Self;
    fn mul(a: Self, b: Self) -> Self;
    fn div(a: Self, b: Self) -> Result<Self, String>;
    fn neg(a: Self) -> Self;
    fn pow(a: Self, e: i64) -> Result<Self, String>;
}

pub fn eval<A: ExprAlgebra>(expr: &Expr) -> Result<A, String> {
    match expr {
        Expr::Int(v) => Ok(A::from_int(*v)),
        Expr::Var(n) => A::var(n),
        Expr::Neg(a) => Ok(A::neg(eval(a)?)),
        Expr::Add(a, b) => Ok(A::add(eval(a)?, eval(b)?)),
        Expr::Sub(a, b) => Ok(A::sub(eval(a)?, eval(b)?)),
        Expr::Mul(a, b) => Ok(A::mul(eval(a)?, eval(b)?)),
        Expr::Div(a, b) => A::div(eval(a)?, eval(b)?),
        Expr::Pow(a, e) => A::pow(eval(a)?, *e),
    }
}

impl<T: crate::scalar::Scalar> ExprAlgebra for crate::ratfun::RationalFunction<T> {
    fn from_int(n: i64) -> Self {
        Self::int(n)
    }
    fn var(name: &str) -> Result<Self, String> {
        Ok(Self::var(name))
    }
    fn add(a: Self, b: Self) -> Self {
        a.add(&b)
    }
    fn sub(a: Self, b: Self) -> Self {
        a.sub(&b)
    }
    fn mul(a: Self, b: Self) -> Self {
        a.mul(&b)
    }
    fn div(a: Self, b: Self) -> Result<Self, String> {
        a.div(&b).map_err(|e| e.to_string())
    }
    fn neg(a: Self) -> Self {
        a.neg()
    }
    fn pow(a: Self, e: i64) -> Result<Self, String> {
        a.pow(e).map_err(|e| e.to_string())
    }
}

/// Parse a rational function from a string.
pub fn parse_ratfun<T: crate::scalar::Scalar>(
    input: &str,
) -> Result<crate::ratfun::RationalFunction<T>, String> {
    let ast = parse(input).map_err(|e| e.to_string())?;
    eval(&ast)
}

/// Parse a polynomial (a rational function with constant denominator 1).
pub fn parse_poly<T: crate::scalar::Scalar>(
    input: &str,
) -> Result<crate::poly::Polynomial<T>, String> {
    let f: crate::ratfun::RationalFunction<T> = parse_ratfun(input)?;
    if !f.den().is_one() {
        if let Some(c) = f.den().constant_value() {
            return Ok(f.num().mul_scalar(&c.inv()));
        }
        return Err(format!("expected a polynomial, got denominator {}", f.den()));
    }
    Ok(f.num().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Poly, RatFun};

    #[test]
    fn parses_pf_style_expressions() {
        let f: RatFun = parse_ratfun("-1/(3*(1-27*z))").unwrap();
        let z = Poly::var("z");
        let expect = RatFun::new(
            Poly::int(-1),
            Poly::int(3).mul(&Poly::one().sub(&z.mul_scalar(&crate::Coeff::int(27)))),
        )
        .unwrap();
        assert_eq!(f, expect);
    }

    #[test]
    fn negative_exponent() {
        let f: RatFun = parse_ratfun("z^-2").unwrap();
        assert_eq!(f, RatFun::var("z").pow(-2).unwrap());
    }

    #[test]
    fn rejects_trailing_garbage() {
        assert!(parse("1 + )").is_err());
        assert!(parse("z z").is_err());
    }
}
