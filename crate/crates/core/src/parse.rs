//! Recursive-descent parser for the polynomial text grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | integer '/' integer | 'x' index | '(' expr ')'
//! ```
//! Positions in errors are byte offsets into the input.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::poly::{Monomial, PolyError, Polynomial, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(text[start..i].parse().unwrap()), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Var(text[start..i].to_string()), start));
                continue;
            }
            other => {
                return Err(PolyError::Syntax { pos: start, msg: format!("unexpected character `{other}`") })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax { pos: self.here(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc.add_assign_ref(&t);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            let f = self.unary()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, PolyError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Int(n)) => {
                    let e: u32 = match u32::try_from(n) {
                        Ok(e) => e,
                        Err(_) => return self.err("exponent too large"),
                    };
                    self.pos += 1;
                    if let Some(Tok::Caret) = self.peek() {
                        return self.err("chained exponent; use parentheses");
                    }
                    Ok(base.pow(e))
                }
                _ => self.err("expected non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        let at = self.here();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                if let Some(Tok::Slash) = self.peek() {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) => {
                            if d.is_zero() {
                                return self.err("zero denominator");
                            }
                            self.pos += 1;
                            Ok(Polynomial::constant(self.nvars, Rational::new(n, d)))
                        }
                        _ => self.err("expected integer denominator"),
                    }
                } else {
                    Ok(Polynomial::constant(self.nvars, Rational::from_integer(n)))
                }
            }
            Some(Tok::Var(name)) => {
                self.pos += 1;
                let idx = name
                    .strip_prefix('x')
                    .and_then(|s| if s.starts_with('0') { None } else { s.parse::<usize>().ok() });
                match idx {
                    Some(k) if k >= 1 && k <= self.nvars => {
                        Ok(Polynomial::monomial(self.nvars, Monomial::var(self.nvars, k - 1), Rational::from_integer(1.into())))
                    }
                    _ => Err(PolyError::UnknownVariable { name, pos: at }),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => self.err("expected `)`"),
                }
            }
            Some(_) => self.err("expected number, variable or `(`"),
            None => self.err("unexpected end of input"),
        }
    }
}

pub fn parse_polynomial(text: &str, nvars: usize) -> Result<Polynomial, PolyError> {
    parse_polynomial_at(text, nvars, 0)
}

/// Parse a fragment of a larger input; reported positions are shifted by `offset`.
pub fn parse_polynomial_at(text: &str, nvars: usize, offset: usize) -> Result<Polynomial, PolyError> {
    let shift = |e: PolyError| match e {
        PolyError::Syntax { pos, msg } => PolyError::Syntax { pos: pos + offset, msg },
        PolyError::UnknownVariable { name, pos } => PolyError::UnknownVariable { name, pos: pos + offset },
        other => other,
    };
    let toks = tokenize(text).map_err(shift)?;
    let mut p = Parser { toks: &toks, pos: 0, end: text.len(), nvars };
    if toks.is_empty() {
        return Err(shift(PolyError::Syntax { pos: 0, msg: "empty polynomial".into() }));
    }
    let out = p.expr().map_err(shift)?;
    if p.pos != toks.len() {
        return Err(shift(PolyError::Syntax { pos: p.here(), msg: "trailing input".into() }));
    }
    Ok(out)
}
