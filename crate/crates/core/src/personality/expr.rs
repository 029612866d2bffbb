//! Arithmetic expressions over feature-vector fields.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-' | '−') term)*
//! term   := unary (('*' | '×' | '/' | '÷') unary)*
//! unary  := ('-' | '−') unary | atom
//! atom   := number | variable | 'recip' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Variables: `s`, `alpha`, `isolation`, `socialization`, `collectivity`,
//! `x`, `y` (mean position). `recip(e)` is `1 / max(e, ε)`; division by a
//! value smaller than ε in magnitude divides by ±ε instead.

use std::fmt;

use thiserror::Error;

use crate::features::FeatureVector;

pub const RECIPROCAL_EPS: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("unexpected character {ch:?} at offset {pos}")]
    UnexpectedChar { pos: usize, ch: char },
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("invalid number {0:?}")]
    BadNumber(String),
    #[error("expected {expected} at offset {pos}")]
    Expected { pos: usize, expected: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    Speed,
    Alpha,
    Isolation,
    Socialization,
    Collectivity,
    X,
    Y,
}

impl Variable {
    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "s" => Variable::Speed,
            "alpha" => Variable::Alpha,
            "isolation" => Variable::Isolation,
            "socialization" => Variable::Socialization,
            "collectivity" => Variable::Collectivity,
            "x" => Variable::X,
            "y" => Variable::Y,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Variable::Speed => "s",
            Variable::Alpha => "alpha",
            Variable::Isolation => "isolation",
            Variable::Socialization => "socialization",
            Variable::Collectivity => "collectivity",
            Variable::X => "x",
            Variable::Y => "y",
        }
    }

    fn value(self, v: &FeatureVector) -> f64 {
        match self {
            Variable::Speed => v.s,
            Variable::Alpha => v.alpha,
            Variable::Isolation => v.isolation,
            Variable::Socialization => v.socialization,
            Variable::Collectivity => v.collectivity,
            Variable::X => v.x.x,
            Variable::Y => v.x.y,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Variable),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Recip(Box<Expr>),
}

fn guarded_divisor(d: f64) -> f64 {
    if d.abs() < RECIPROCAL_EPS {
        RECIPROCAL_EPS.copysign(d)
    } else {
        d
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some((pos, _)) => Err(ExprError::Expected {
                pos,
                expected: "end of expression",
            }),
        }
    }

    pub fn eval(&self, v: &FeatureVector) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(var) => var.value(v),
            Expr::Neg(e) => -e.eval(v),
            Expr::Add(a, b) => a.eval(v) + b.eval(v),
            Expr::Sub(a, b) => a.eval(v) - b.eval(v),
            Expr::Mul(a, b) => a.eval(v) * b.eval(v),
            Expr::Div(a, b) => a.eval(v) / guarded_divisor(b.eval(v)),
            Expr::Recip(e) => 1.0 / e.eval(v).max(RECIPROCAL_EPS),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Recip(e) => write!(f, "recip({e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(pos, ch)) = chars.peek() {
        let tok = match ch {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '+' => Tok::Plus,
            '-' | '−' => Tok::Minus,
            '*' | '×' => Tok::Star,
            '/' | '÷' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if c.is_ascii_digit() || c == '.' => {
                let mut end = pos;
                while let Some(&(i, c)) = chars.peek() {
                    let exp_sign = (c == '-' || c == '+')
                        && matches!(src[..i].chars().last(), Some('e' | 'E'));
                    if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                        end = i + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let text = &src[pos..end];
                out.push((
                    pos,
                    Tok::Num(
                        text.parse()
                            .map_err(|_| ExprError::BadNumber(text.to_string()))?,
                    ),
                ));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = pos;
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        end = i + 1;
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((pos, Tok::Ident(src[pos..end].to_string())));
                continue;
            }
            other => return Err(ExprError::UnexpectedChar { pos, ch: other }),
        };
        chars.next();
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, &Tok)> {
        self.tokens.get(self.pos).map(|(p, t)| (*p, t))
    }

    fn next(&mut self) -> Option<(usize, Tok)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<(), ExprError> {
        match self.next() {
            Some((_, t)) if t == want => Ok(()),
            Some((pos, _)) => Err(ExprError::Expected { pos, expected }),
            None => Err(ExprError::UnexpectedEnd),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some((_, Tok::Plus)) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some((_, Tok::Minus)) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some((_, Tok::Star)) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some((_, Tok::Slash)) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if let Some((_, Tok::Minus)) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.next() {
            None => Err(ExprError::UnexpectedEnd),
            Some((_, Tok::Num(n))) => Ok(Expr::Const(n)),
            Some((_, Tok::LParen)) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some((_, Tok::Ident(name))) if name == "recip" => {
                self.expect(Tok::LParen, "'(' after recip")?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::Recip(Box::new(e)))
            }
            Some((_, Tok::Ident(name))) => Variable::lookup(&name)
                .map(Expr::Var)
                .ok_or(ExprError::UnknownIdentifier(name)),
            Some((pos, _)) => Err(ExprError::Expected {
                pos,
                expected: "number, variable or '('",
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::Point2;

    fn fv(s: f64, alpha: f64) -> FeatureVector {
        FeatureVector {
            x: Point2::new(1.0, 2.0),
            s,
            alpha,
            isolation: 0.25,
            socialization: 0.75,
            collectivity: 0.5,
        }
    }

    fn eval(src: &str, v: &FeatureVector) -> f64 {
        Expr::parse(src).unwrap().eval(v)
    }

    #[test]
    fn precedence_and_unicode_ops() {
        let v = fv(0.0, 0.0);
        assert_eq!(eval("1 + 2 * 3", &v), 7.0);
        assert_eq!(eval("(1 + 2) × 3", &v), 9.0);
        assert_eq!(eval("8 ÷ 4 − 1", &v), 1.0);
        assert_eq!(eval("--2", &v), 2.0);
        assert_eq!(eval("1.5e1 - 5", &v), 10.0);
        assert_eq!(eval("2e-1 * 10", &v), 2.0);
    }

    #[test]
    fn variables() {
        let v = fv(0.04, 2.0);
        assert_eq!(eval("isolation + socialization", &v), 1.0);
        assert_eq!(eval("x * y", &v), 2.0);
        assert_eq!(eval("collectivity", &v), 0.5);
    }

    #[test]
    fn reciprocal_guard() {
        assert!((eval("s + recip(alpha)", &fv(0.04, 2.0)) - 0.54).abs() < 1e-12);
        assert!((eval("s + recip(alpha)", &fv(0.04, 0.0)) - 1000.04).abs() < 1e-9);
        assert_eq!(eval("s + recip(alpha)", &fv(0.0, 1.0)), 1.0);
        assert_eq!(eval("1 / 0", &fv(0.0, 0.0)), 1000.0);
        assert_eq!(eval("1 / (0 - 0.0001)", &fv(0.0, 0.0)), -1000.0);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            Expr::parse("foo"),
            Err(ExprError::UnknownIdentifier("foo".into()))
        );
        assert_eq!(Expr::parse("1 +"), Err(ExprError::UnexpectedEnd));
        assert!(matches!(Expr::parse("(1"), Err(ExprError::UnexpectedEnd)));
        assert!(matches!(
            Expr::parse("1 2"),
            Err(ExprError::Expected { .. })
        ));
        assert!(matches!(
            Expr::parse("1 $ 2"),
            Err(ExprError::UnexpectedChar { ch: '$', .. })
        ));
        assert!(matches!(Expr::parse("1..2"), Err(ExprError::BadNumber(_))));
        assert!(matches!(
            Expr::parse("recip 2"),
            Err(ExprError::Expected { .. })
        ));
    }

    #[test]
    fn display_reparses_to_same_value() {
        let v = fv(0.07, 13.0);
        for src in [
            "s + recip(alpha)",
            "(isolation + (1 - collectivity)) / 2",
            "-x * 3 ÷ y",
        ] {
            let e = Expr::parse(src).unwrap();
            let again = Expr::parse(&e.to_string()).unwrap();
            assert_eq!(e.eval(&v), again.eval(&v));
        }
    }
}
