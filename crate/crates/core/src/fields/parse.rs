//! A small recursive-descent parser for polynomial expressions.
//!
//! Grammar: sums and differences of products, where a product is a
//! sequence of factors joined by `*` or by juxtaposition (`2x`, `x0^2 x1`),
//! and a factor is a number, an identifier, a parenthesised expression, or
//! any of these raised to a nonnegative integer power with `^`.

use super::{Fe, FiniteField, Ring, UniPolyRing};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(i64),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u64),
}

impl Expr {
    /// Evaluate in `ring`, resolving identifiers through `var`. Integer
    /// literals map to the prime subfield.
    pub fn eval<R: Ring>(
        &self,
        ring: &R,
        var: &dyn Fn(&str) -> Option<R::Elem>,
    ) -> Result<R::Elem> {
        Ok(match self {
            Expr::Num(v) => ring.embed(ring.base_field().from_int(*v)),
            Expr::Var(name) => {
                var(name).ok_or_else(|| Error::parse(1, 1, format!("unknown identifier `{name}`")))?
            }
            Expr::Add(a, b) => ring.add(&a.eval(ring, var)?, &b.eval(ring, var)?),
            Expr::Sub(a, b) => ring.sub(&a.eval(ring, var)?, &b.eval(ring, var)?),
            Expr::Mul(a, b) => ring.mul(&a.eval(ring, var)?, &b.eval(ring, var)?),
            Expr::Neg(a) => ring.neg(&a.eval(ring, var)?),
            Expr::Pow(a, k) => ring.pow(&a.eval(ring, var)?, *k),
        })
    }

    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.variables(out);
                b.variables(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.variables(out),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col_offset: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col_offset + self.pos + 1, msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && (self.src[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Expr::Neg(Box::new(self.term()?))
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                Some(c) if c.is_ascii_alphanumeric() || c == b'(' || c == b'_' => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected a nonnegative integer exponent"));
            }
            let k: u64 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let v: i64 = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| self.err("integer literal too large"))?;
                Ok(Expr::Num(v))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Ok(Expr::Var(
                    std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string(),
                ))
            }
            Some(c) => Err(self.err(format!("unexpected `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parse a complete expression. `line` and `col_offset` locate `src`
/// inside a larger document for error messages.
pub fn parse_expr_at(src: &str, line: usize, col_offset: usize) -> Result<Expr> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        line,
        col_offset,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    parse_expr_at(src, 1, 0)
}

/// Element of `field`, written as an integer or a polynomial in `g`.
pub fn parse_field_element(field: &FiniteField, s: &str) -> Result<Fe> {
    let e = parse_expr(s)?;
    let g = field.generator();
    let has_g = !field.is_prime_field();
    e.eval(field, &|name| (has_g && name == "g").then_some(g))
}

/// Coefficients (low to high, reduced mod `p`) of a univariate polynomial
/// in any single variable name.
pub fn parse_univariate_coeffs(s: &str, p: u32) -> Result<Vec<u32>> {
    let e = parse_expr(s)?;
    let mut vars = Vec::new();
    e.variables(&mut vars);
    if vars.len() > 1 {
        return Err(Error::parse(1, 1, format!("expected one variable, found {vars:?}")));
    }
    let field = FiniteField::prime(p)?;
    let ring = UniPolyRing::new(field, vars.first().map(String::as_str).unwrap_or("x"));
    let x = ring.variable();
    let f = e.eval(&ring, &|_| Some(x.clone()))?;
    Ok(f.coeffs().iter().map(|c| c.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_juxtaposition_and_powers() {
        let e = parse_expr("2x^2 y + -3").unwrap_err();
        // `+ -3` is not accepted: unary minus only at the start of a sum
        assert!(matches!(e, Error::Parse { .. }));
        let e = parse_expr("c * x0^2 x1").unwrap();
        let mut v = Vec::new();
        e.variables(&mut v);
        assert_eq!(v, vec!["c", "x0", "x1"]);
    }

    #[test]
    fn reports_column() {
        match parse_expr("x + (y") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(column, 7);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn univariate_coefficients() {
        assert_eq!(parse_univariate_coeffs("x^2+2x+2", 3).unwrap(), vec![2, 2, 1]);
        assert_eq!(parse_univariate_coeffs("(x+1)^2", 2).unwrap(), vec![1, 0, 1]);
    }
}
