//! Expression parsing and printing for the textual interfaces: field
//! elements (`3` or `[1,2]` coefficient lists), Laurent-series expressions
//! in the variables u, t, and rational-function expressions in the surface
//! coordinates x, y. One grammar serves both:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' int)*
//! atom   := int | '[' int (',' int)* ']' | var | '(' expr ')' | '-' atom
//! ```
//!
//! The series printer emits sums of monomials `c*u^i*t^j`; printing is
//! defined for exact series and round-trips through the parser.

use crate::error::{Error, Result};
use crate::gfield::{FieldElement, Fq};
use crate::laurent::{two_local_const, two_local_t, two_local_u, TSeries};
use crate::surface::poly::Poly2;
use crate::surface::RationalFunction;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Coeffs(Vec<u64>),
    Var(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let b: Vec<char> = s.chars().collect();
    let mut i = 0usize;
    while i < b.len() {
        let c = b[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '[' => {
                let mut j = i + 1;
                let mut cur = String::new();
                let mut coeffs = Vec::new();
                loop {
                    if j >= b.len() {
                        return Err(Error::Parse("unterminated coefficient list".into()));
                    }
                    match b[j] {
                        ']' => {
                            if !cur.is_empty() {
                                coeffs.push(parse_u64(&cur)?);
                            }
                            j += 1;
                            break;
                        }
                        ',' => {
                            coeffs.push(parse_u64(&cur)?);
                            cur.clear();
                            j += 1;
                        }
                        d if d.is_ascii_digit() => {
                            cur.push(d);
                            j += 1;
                        }
                        ' ' => j += 1,
                        other => {
                            return Err(Error::Parse(format!(
                                "unexpected '{other}' in coefficient list"
                            )))
                        }
                    }
                }
                out.push(Tok::Coeffs(coeffs));
                i = j;
            }
            d if d.is_ascii_digit() => {
                let mut j = i;
                let mut cur = String::new();
                while j < b.len() && b[j].is_ascii_digit() {
                    cur.push(b[j]);
                    j += 1;
                }
                out.push(Tok::Int(
                    cur.parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad integer '{cur}'")))?,
                ));
                i = j;
            }
            a if a.is_ascii_alphabetic() => {
                let mut j = i;
                let mut cur = String::new();
                while j < b.len() && b[j].is_ascii_alphanumeric() {
                    cur.push(b[j]);
                    j += 1;
                }
                out.push(Tok::Var(cur));
                i = j;
            }
            other => return Err(Error::Parse(format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

fn parse_u64(s: &str) -> Result<u64> {
    s.parse::<u64>()
        .map_err(|_| Error::Parse(format!("bad integer '{s}'")))
}

/// Values an expression can evaluate into.
trait ExprValue: Sized + Clone {
    fn from_int(fq: &Fq, n: i64) -> Self;
    fn from_coeffs(fq: &Fq, c: &[u64]) -> Result<Self>;
    fn var(fq: &Fq, name: &str) -> Result<Self>;
    fn add(&self, o: &Self) -> Result<Self>;
    fn sub(&self, o: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Result<Self>;
    fn div(&self, o: &Self) -> Result<Self>;
    fn pow(&self, e: i64) -> Result<Self>;
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    fq: Fq,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr<V: ExprValue>(&mut self) -> Result<V> {
        let mut acc = self.term::<V>()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    acc = acc.add(&self.term::<V>()?)?;
                }
                Some(Tok::Minus) => {
                    self.next();
                    acc = acc.sub(&self.term::<V>()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<V: ExprValue>(&mut self) -> Result<V> {
        let mut acc = self.factor::<V>()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    acc = acc.mul(&self.factor::<V>()?)?;
                }
                Some(Tok::Slash) => {
                    self.next();
                    acc = acc.div(&self.factor::<V>()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor<V: ExprValue>(&mut self) -> Result<V> {
        let mut acc = self.atom::<V>()?;
        while self.peek() == Some(&Tok::Caret) {
            self.next();
            let e = match self.next() {
                Some(Tok::Int(n)) => n,
                Some(Tok::Minus) => match self.next() {
                    Some(Tok::Int(n)) => -n,
                    _ => return Err(Error::Parse("expected integer exponent".into())),
                },
                Some(Tok::LParen) => {
                    let sign = if self.peek() == Some(&Tok::Minus) {
                        self.next();
                        -1
                    } else {
                        1
                    };
                    let n = match self.next() {
                        Some(Tok::Int(n)) => n,
                        _ => return Err(Error::Parse("expected integer exponent".into())),
                    };
                    if self.next() != Some(Tok::RParen) {
                        return Err(Error::Parse("expected ')' after exponent".into()));
                    }
                    sign * n
                }
                _ => return Err(Error::Parse("expected integer exponent".into())),
            };
            acc = acc.pow(e)?;
        }
        Ok(acc)
    }

    fn atom<V: ExprValue>(&mut self) -> Result<V> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(V::from_int(&self.fq, n)),
            Some(Tok::Coeffs(c)) => V::from_coeffs(&self.fq, &c),
            Some(Tok::Var(name)) => V::var(&self.fq, &name),
            Some(Tok::Minus) => Ok(self.atom::<V>()?.neg()),
            Some(Tok::LParen) => {
                let v = self.expr::<V>()?;
                if self.next() != Some(Tok::RParen) {
                    return Err(Error::Parse("expected ')'".into()));
                }
                Ok(v)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

fn run_parser<V: ExprValue>(fq: &Fq, text: &str) -> Result<V> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        fq: fq.clone(),
    };
    let v = p.expr::<V>()?;
    if p.pos != toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(v)
}

impl ExprValue for TSeries {
    fn from_int(fq: &Fq, n: i64) -> Self {
        two_local_const(fq.from_int(n))
    }
    fn from_coeffs(fq: &Fq, c: &[u64]) -> Result<Self> {
        Ok(two_local_const(fq.from_coeffs(c)?))
    }
    fn var(fq: &Fq, name: &str) -> Result<Self> {
        match name {
            "u" => Ok(two_local_u(fq)),
            "t" => Ok(two_local_t(fq)),
            other => Err(Error::Parse(format!(
                "unknown series variable '{other}' (expected u or t)"
            ))),
        }
    }
    fn add(&self, o: &Self) -> Result<Self> {
        TSeries::add(self, o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        TSeries::sub(self, o)
    }
    fn neg(&self) -> Self {
        TSeries::neg(self)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        TSeries::mul(self, o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        TSeries::mul(self, &o.invert()?)
    }
    fn pow(&self, e: i64) -> Result<Self> {
        TSeries::pow(self, e)
    }
}

impl ExprValue for RationalFunction {
    fn from_int(fq: &Fq, n: i64) -> Self {
        RationalFunction::constant(fq.from_int(n))
    }
    fn from_coeffs(fq: &Fq, c: &[u64]) -> Result<Self> {
        Ok(RationalFunction::constant(fq.from_coeffs(c)?))
    }
    fn var(fq: &Fq, name: &str) -> Result<Self> {
        match name {
            "x" => Ok(RationalFunction::from_poly(Poly2::var_x(fq))),
            "y" => Ok(RationalFunction::from_poly(Poly2::var_y(fq))),
            other => Err(Error::Parse(format!(
                "unknown coordinate '{other}' (expected x or y)"
            ))),
        }
    }
    fn add(&self, o: &Self) -> Result<Self> {
        RationalFunction::add(self, o)
    }
    fn sub(&self, o: &Self) -> Result<Self> {
        RationalFunction::sub(self, o)
    }
    fn neg(&self) -> Self {
        RationalFunction::neg(self)
    }
    fn mul(&self, o: &Self) -> Result<Self> {
        RationalFunction::mul(self, o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        RationalFunction::div(self, o)
    }
    fn pow(&self, e: i64) -> Result<Self> {
        RationalFunction::pow(self, e)
    }
}

/// Parse a Laurent-series expression in u, t over the given residue field.
pub fn parse_series(fq: &Fq, text: &str) -> Result<TSeries> {
    run_parser::<TSeries>(fq, text)
}

/// Parse a rational-function expression in x, y over the base field.
pub fn parse_rational(fq: &Fq, text: &str) -> Result<RationalFunction> {
    run_parser::<RationalFunction>(fq, text)
}

/// Parse a field element: a decimal integer or a `[c0,c1,...]` coefficient
/// list, little-endian in the field generator.
pub fn parse_field_element(fq: &Fq, text: &str) -> Result<FieldElement> {
    let toks = tokenize(text)?;
    match toks.as_slice() {
        [Tok::Int(n)] => Ok(fq.from_int(*n)),
        [Tok::Minus, Tok::Int(n)] => Ok(fq.from_int(-n)),
        [Tok::Coeffs(c)] => fq.from_coeffs(c),
        _ => Err(Error::Parse(format!("bad field element '{text}'"))),
    }
}

/// Print an exact two-dimensional series as a sum of monomials c*u^i*t^j.
/// Errors on inexact series (their tails are not known).
pub fn series_to_text(s: &TSeries) -> Result<String> {
    if !s.is_exact() {
        return Err(Error::Unsupported(
            "only exact series have a faithful textual form".into(),
        ));
    }
    if s.is_exact_zero() {
        return Ok("0".into());
    }
    let (tval, tcoeffs) = s.window();
    let mut parts = Vec::new();
    for (k, c) in tcoeffs.iter().enumerate() {
        if c.c_is_exact_zero() {
            continue;
        }
        if !c.is_exact() {
            return Err(Error::Unsupported(
                "only exact series have a faithful textual form".into(),
            ));
        }
        let j = tval + k as i64;
        let (uval, ucoeffs) = c.window();
        for (m, a) in ucoeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let i = uval + m as i64;
            parts.push(format!("{a}*u^{i}*t^{j}"));
        }
    }
    Ok(parts.join(" + "))
}

use crate::laurent::Coeff;
