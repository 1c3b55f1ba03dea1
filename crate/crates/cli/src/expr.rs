//! Scalar symbol expressions such as `zbar + 2*z^2` or `(1+2i)*z - 0.5i*zbar^3`.
//!
//! Grammar:
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/')? unary)*    juxtaposition multiplies
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' int)?
//! atom   := number 'i'? | 'i' | 'z' | 'zbar' | 'z̄' | 'pi'
//!         | 'sqrt' '(' expr ')' | 'exp' '(' expr ')' | '(' expr ')'
//! ```
//! `sqrt`, `exp` and division only accept constant arguments. Negative powers are
//! allowed for monomials, so `z^-2` is the same as `zbar^2`.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Result};
use blocktoeplitz::symalg::MatrixLaurentSymbol;
use blocktoeplitz::Complex64;

const MAX_POWER: i64 = 64;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

type Laurent = BTreeMap<i32, Complex64>;

fn lex(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' | '−' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' | '·' => {
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
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent part, e.g. 1e-3
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v: f64 = s.parse().map_err(|_| anyhow!("bad number '{s}'"))?;
                out.push(Tok::Num(v));
            }
            c if c.is_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '\u{304}') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => bail!("unexpected character '{other}'"),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

fn constant(c: Complex64) -> Laurent {
    let mut m = Laurent::new();
    m.insert(0, c);
    m
}

fn add(a: &Laurent, b: &Laurent, sign: f64) -> Laurent {
    let mut out = a.clone();
    for (&d, &c) in b {
        *out.entry(d).or_default() += c * sign;
    }
    out
}

fn mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (&da, &ca) in a {
        for (&db, &cb) in b {
            *out.entry(da + db).or_default() += ca * cb;
        }
    }
    out
}

fn as_constant(a: &Laurent) -> Option<Complex64> {
    if a.iter().all(|(&d, c)| d == 0 || *c == Complex64::new(0.0, 0.0)) {
        Some(a.get(&0).copied().unwrap_or_default())
    } else {
        None
    }
}

fn pow(a: &Laurent, e: i64) -> Result<Laurent> {
    if e.abs() > MAX_POWER {
        bail!("power {e} is too large");
    }
    if e >= 0 {
        let mut out = constant(Complex64::new(1.0, 0.0));
        for _ in 0..e {
            out = mul(&out, a);
        }
        return Ok(out);
    }
    let nonzero: Vec<_> = a.iter().filter(|(_, c)| **c != Complex64::new(0.0, 0.0)).collect();
    match nonzero.as_slice() {
        [(&d, &c)] => {
            let mut m = Laurent::new();
            m.insert(d * e as i32, c.powi(e as i32));
            Ok(m)
        }
        _ => bail!("negative powers need a single-term base"),
    }
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => bail!("expected {t:?}, found {got:?}"),
        }
    }

    fn expr(&mut self) -> Result<Laurent> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = add(&acc, &self.term()?, 1.0);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = add(&acc, &self.term()?, -1.0);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Laurent> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = mul(&acc, &self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = as_constant(&self.unary()?).ok_or_else(|| anyhow!("can only divide by a constant"))?;
                    if d == Complex64::new(0.0, 0.0) {
                        bail!("division by zero");
                    }
                    acc = mul(&acc, &constant(d.inv()));
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = mul(&acc, &self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Laurent> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(add(&Laurent::new(), &self.unary()?, -1.0))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Laurent> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let mut sign = 1i64;
        loop {
            match self.next() {
                Some(Tok::Minus) => sign = -sign,
                Some(Tok::Plus) => {}
                Some(Tok::Num(v)) if v.fract() == 0.0 => return pow(&base, sign * v as i64),
                Some(Tok::LParen) => {
                    let e = self.expr()?;
                    self.expect(Tok::RParen)?;
                    let c = as_constant(&e).ok_or_else(|| anyhow!("exponent must be an integer"))?;
                    if c.im != 0.0 || c.re.fract() != 0.0 {
                        bail!("exponent must be an integer");
                    }
                    return pow(&base, sign * c.re as i64);
                }
                other => bail!("exponent must be an integer, found {other:?}"),
            }
        }
    }

    fn atom(&mut self) -> Result<Laurent> {
        match self.next() {
            Some(Tok::Num(v)) => {
                if let Some(Tok::Ident(s)) = self.peek() {
                    if s == "i" {
                        self.pos += 1;
                        return Ok(constant(Complex64::new(0.0, v)));
                    }
                }
                Ok(constant(Complex64::new(v, 0.0)))
            }
            Some(Tok::Ident(s)) => match s.as_str() {
                "i" => Ok(constant(Complex64::new(0.0, 1.0))),
                "pi" => Ok(constant(Complex64::new(std::f64::consts::PI, 0.0))),
                "z" => Ok(Laurent::from([(1, Complex64::new(1.0, 0.0))])),
                "zbar" | "z\u{304}" => Ok(Laurent::from([(-1, Complex64::new(1.0, 0.0))])),
                "sqrt" | "exp" => {
                    self.expect(Tok::LParen)?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen)?;
                    let c = as_constant(&e).ok_or_else(|| anyhow!("{s} needs a constant argument"))?;
                    Ok(constant(if s == "sqrt" { c.sqrt() } else { c.exp() }))
                }
                other => bail!("unknown identifier '{other}'"),
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => bail!("unexpected token {other:?}"),
        }
    }
}

/// Parses a scalar symbol expression.
pub fn parse_scalar(src: &str) -> Result<MatrixLaurentSymbol> {
    let toks = lex(src)?;
    if toks.is_empty() {
        bail!("empty expression");
    }
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        bail!("trailing input after position {}", p.pos);
    }
    Ok(MatrixLaurentSymbol::scalar(e.into_iter().filter(|(_, c)| *c != Complex64::new(0.0, 0.0))))
}
