//! Recursive descent parser for formulas.
//!
//! ```text
//! expr   := term { ("+" | "-") term }
//! term   := factor { "*" factor }
//! factor := "-" factor | "inv" "(" expr ")" | "(" expr ")" | var | rational
//! var    := "x" digits
//! ```

use num_bigint::BigInt;

use super::formula::Formula;
use crate::error::{Error, Result};
use crate::exact_linalg::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Ident(String),
    Number(Rational),
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax { position, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' | '\u{2212}' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            c if c.is_ascii_digit() => {
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let num: String = chars[start..=i].iter().collect();
                let mut value = Rational::from_integer(num.parse::<BigInt>().expect("digits"));
                if i + 1 < chars.len() && chars[i + 1] == '/' {
                    let d0 = i + 2;
                    let mut j = d0;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == d0 {
                        return Err(syntax(i + 1, "expected a denominator after '/'"));
                    }
                    let den: BigInt = chars[d0..j].iter().collect::<String>().parse().expect("digits");
                    if den == BigInt::from(0) {
                        return Err(syntax(d0, "zero denominator"));
                    }
                    value /= Rational::from_integer(den);
                    i = j - 1;
                }
                out.push((start, Tok::Number(value)));
            }
            c if c.is_alphabetic() || c == '_' => {
                while i + 1 < chars.len() && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..=i].iter().collect())));
            }
            other => return Err(syntax(start, format!("unexpected character {other:?}"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(syntax(self.here(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Formula> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Formula::add(lhs, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Formula::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Formula> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            lhs = Formula::mul(lhs, self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Formula> {
        let at = self.here();
        let Some((_, tok)) = self.toks.get(self.pos).cloned() else {
            return Err(syntax(at, "unexpected end of input"));
        };
        self.pos += 1;
        match tok {
            Tok::Minus => Ok(match self.factor()? {
                Formula::Const(c) => Formula::Const(-c),
                other => Formula::mul(Formula::int(-1), other),
            }),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Number(c) => Ok(Formula::Const(c)),
            Tok::Ident(name) if name == "inv" => {
                self.expect(Tok::LParen, "'(' after inv")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Formula::inv(inner))
            }
            Tok::Ident(name) => match name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                Some(i) if i >= 1 && name[1..].chars().all(|c| c.is_ascii_digit()) => Ok(Formula::Var(i)),
                _ => Err(Error::UnknownIdentifier(name)),
            },
            other => Err(syntax(at, format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses a formula. Precedence is `inv` over `*` over `+`/`-`; both binary levels associate left.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.chars().count() };
    let f = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(syntax(p.here(), "trailing input"));
    }
    Ok(f)
}
