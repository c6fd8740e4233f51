//! Expression DSL for custom log-weights.
//!
//! A weight expression denotes `log a_n(i)` directly as a function of the
//! variables `i` and `n`. Grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := unary ('^' factor)?          // '^' right-associative
//! unary  := '-' unary | atom
//! atom   := number | 'i' | 'n' | fn '(' expr ')' | '(' expr ')'
//! fn     := 'exp' | 'log' | 'sqrt'
//! ```
//!
//! Unary minus binds tighter than `^`, so `-i^2` is `(-i)^2`. Evaluation is
//! carried out on [`XReal`] values, so `exp(i/n)` stays finite far beyond the
//! `f64` exponent range.

use crate::xreal::XReal;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Byte range of a node in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    I,
    N,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Exp,
    Log,
    Sqrt,
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Number(f64),
    Var(Var),
    Unary(UnOp, Box<WeightExpr>),
    Binary(BinOp, Box<WeightExpr>, Box<WeightExpr>),
}

/// Parsed weight expression; every node carries its source span.
#[derive(Clone, Debug)]
pub struct WeightExpr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: found {found}, expected {}", expected.join(" | "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("unexpected character `{ch}` at offset {offset}")]
    UnexpectedChar { offset: usize, ch: char },
    #[error("malformed number at offset {offset}")]
    MalformedNumber { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::UnexpectedChar { offset, .. }
            | ParseError::MalformedNumber { offset } => *offset,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero at offset {}", span.start)]
    DivisionByZero { span: Span },
    #[error("log of a non-positive value at offset {}", span.start)]
    LogNonPositive { span: Span },
    #[error("sqrt of a negative value at offset {}", span.start)]
    SqrtNegative { span: Span },
    #[error("power with negative base at offset {}", span.start)]
    PowNegativeBase { span: Span },
    #[error("zero raised to a negative power at offset {}", span.start)]
    PowZeroNegative { span: Span },
    #[error("non-finite value at offset {}", span.start)]
    NonFinite { span: Span },
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Number(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Span)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            let start = self.pos;
            if self.pos >= self.src.len() {
                out.push((Tok::Eof, Span { start, end: start }));
                return Ok(out);
            }
            let c = self.src[self.pos];
            let tok = match c {
                b'+' => { self.pos += 1; Tok::Plus }
                b'-' => { self.pos += 1; Tok::Minus }
                b'*' => { self.pos += 1; Tok::Star }
                b'/' => { self.pos += 1; Tok::Slash }
                b'^' => { self.pos += 1; Tok::Caret }
                b'(' => { self.pos += 1; Tok::LParen }
                b')' => { self.pos += 1; Tok::RParen }
                b'0'..=b'9' => self.number(start)?,
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => self.ident(start),
                _ => {
                    let ch = std::str::from_utf8(&self.src[start..])
                        .ok()
                        .and_then(|s| s.chars().next())
                        .unwrap_or('?');
                    return Err(ParseError::UnexpectedChar { offset: start, ch });
                }
            };
            out.push((tok, Span { start, end: self.pos }));
        }
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            if self.pos >= self.src.len() || !self.src[self.pos].is_ascii_digit() {
                return Err(ParseError::MalformedNumber { offset: start });
            }
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        // Exponent part only when it is unambiguously numeric.
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let mut look = self.pos + 1;
            if look < self.src.len() && (self.src[look] == b'+' || self.src[look] == b'-') {
                look += 1;
            }
            if look < self.src.len() && self.src[look].is_ascii_digit() {
                self.pos = look;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Tok::Number)
            .map_err(|_| ParseError::MalformedNumber { offset: start })
    }

    fn ident(&mut self, start: usize) -> Tok {
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        Tok::Ident(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_owned())
    }
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

const ATOM_EXPECTED: &[&str] = &["number", "`i`", "`n`", "`exp`", "`log`", "`sqrt`", "`(`", "`-`"];

impl Parser {
    fn peek(&self) -> &(Tok, Span) {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax_err(&self, expected: &[&str]) -> ParseError {
        let (tok, span) = self.peek();
        ParseError::Syntax {
            offset: span.start,
            found: tok.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expr(&mut self) -> Result<WeightExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().0 {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let span = Span { start: lhs.span.start, end: rhs.span.end };
            lhs = WeightExpr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn term(&mut self) -> Result<WeightExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().0 {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            let span = Span { start: lhs.span.start, end: rhs.span.end };
            lhs = WeightExpr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span };
        }
    }

    fn factor(&mut self) -> Result<WeightExpr, ParseError> {
        let base = self.unary()?;
        if matches!(self.peek().0, Tok::Caret) {
            self.bump();
            let exponent = self.factor()?; // right-associative
            let span = Span { start: base.span.start, end: exponent.span.end };
            return Ok(WeightExpr {
                kind: ExprKind::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)),
                span,
            });
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<WeightExpr, ParseError> {
        if matches!(self.peek().0, Tok::Minus) {
            let (_, minus_span) = self.bump();
            let inner = self.unary()?;
            let span = Span { start: minus_span.start, end: inner.span.end };
            return Ok(WeightExpr { kind: ExprKind::Unary(UnOp::Neg, Box::new(inner)), span });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<WeightExpr, ParseError> {
        let (tok, span) = self.peek().clone();
        match tok {
            Tok::Number(v) => {
                self.bump();
                Ok(WeightExpr { kind: ExprKind::Number(v), span })
            }
            Tok::Ident(name) => match name.as_str() {
                "i" => {
                    self.bump();
                    Ok(WeightExpr { kind: ExprKind::Var(Var::I), span })
                }
                "n" => {
                    self.bump();
                    Ok(WeightExpr { kind: ExprKind::Var(Var::N), span })
                }
                "exp" | "log" | "sqrt" => {
                    let op = match name.as_str() {
                        "exp" => UnOp::Exp,
                        "log" => UnOp::Log,
                        _ => UnOp::Sqrt,
                    };
                    self.bump();
                    if !matches!(self.peek().0, Tok::LParen) {
                        return Err(self.syntax_err(&["`(`"]));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    if !matches!(self.peek().0, Tok::RParen) {
                        return Err(self.syntax_err(&["`)`"]));
                    }
                    let (_, rp) = self.bump();
                    let span = Span { start: span.start, end: rp.end };
                    Ok(WeightExpr { kind: ExprKind::Unary(op, Box::new(arg)), span })
                }
                _ => Err(ParseError::UnknownIdentifier { offset: span.start, name }),
            },
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if !matches!(self.peek().0, Tok::RParen) {
                    return Err(self.syntax_err(&["`)`"]));
                }
                let (_, rp) = self.bump();
                Ok(WeightExpr { kind: inner.kind, span: Span { start: span.start, end: rp.end } })
            }
            _ => Err(self.syntax_err(ATOM_EXPECTED)),
        }
    }
}

/// Parses a weight expression denoting `log a_n(i)`.
pub fn parse_weight_expr(text: &str) -> Result<WeightExpr, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if !matches!(p.peek().0, Tok::Eof) {
        return Err(p.syntax_err(&["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"]));
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Evaluation and printing

fn prec(kind: &ExprKind) -> u8 {
    match kind {
        ExprKind::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        ExprKind::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
        ExprKind::Binary(BinOp::Pow, ..) => 3,
        ExprKind::Unary(UnOp::Neg, _) => 4,
        _ => 5,
    }
}

impl WeightExpr {
    /// Evaluates at positive integers `(i, n)`.
    pub fn eval(&self, i: usize, n: u32) -> Result<XReal, EvalError> {
        let v = self.eval_inner(i, n)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { span: self.span })
        }
    }

    fn eval_inner(&self, i: usize, n: u32) -> Result<XReal, EvalError> {
        let checked = |v: XReal, span: Span| {
            if v.is_nan() || !v.is_finite() {
                Err(EvalError::NonFinite { span })
            } else {
                Ok(v)
            }
        };
        match &self.kind {
            ExprKind::Number(v) => Ok(XReal::from_f64(*v)),
            ExprKind::Var(Var::I) => Ok(XReal::from_f64(i as f64)),
            ExprKind::Var(Var::N) => Ok(XReal::from_f64(n as f64)),
            ExprKind::Unary(op, a) => {
                let v = a.eval_inner(i, n)?;
                match op {
                    UnOp::Neg => Ok(v.neg()),
                    UnOp::Exp => {
                        let x = v.to_f64();
                        if x == f64::INFINITY {
                            return Err(EvalError::NonFinite { span: self.span });
                        }
                        Ok(XReal::exp_of(x))
                    }
                    UnOp::Log => {
                        if v.is_zero() || v.is_sign_negative() {
                            return Err(EvalError::LogNonPositive { span: self.span });
                        }
                        Ok(XReal::from_f64(v.ln_abs()))
                    }
                    UnOp::Sqrt => {
                        if v.is_sign_negative() {
                            return Err(EvalError::SqrtNegative { span: self.span });
                        }
                        // sqrt(x) = exp(ln(x)/2); exact enough at f64 precision.
                        if v.is_zero() {
                            Ok(XReal::ZERO)
                        } else {
                            Ok(XReal::exp_of(0.5 * v.ln_abs()))
                        }
                    }
                }
            }
            ExprKind::Binary(op, a, b) => {
                let va = a.eval_inner(i, n)?;
                let vb = b.eval_inner(i, n)?;
                match op {
                    BinOp::Add => checked(va.add(&vb), self.span),
                    BinOp::Sub => checked(va.sub(&vb), self.span),
                    BinOp::Mul => checked(va.mul(&vb), self.span),
                    BinOp::Div => {
                        if vb.is_zero() {
                            return Err(EvalError::DivisionByZero { span: self.span });
                        }
                        // a/b = a * exp(-ln|b|) with the sign of b.
                        let mag = va.mul(&XReal::exp_of(-vb.ln_abs()));
                        checked(if vb.is_sign_negative() { mag.neg() } else { mag }, self.span)
                    }
                    BinOp::Pow => {
                        if va.is_zero() {
                            return if vb.is_zero() {
                                Ok(XReal::from_f64(1.0))
                            } else if vb.is_sign_negative() {
                                Err(EvalError::PowZeroNegative { span: self.span })
                            } else {
                                Ok(XReal::ZERO)
                            };
                        }
                        if va.is_sign_negative() {
                            // Negative base is defined for integer exponents only.
                            let b = vb.to_f64();
                            if !(b.is_finite() && b.fract() == 0.0 && b.abs() < 9.0e15) {
                                return Err(EvalError::PowNegativeBase { span: self.span });
                            }
                            let mag = XReal::exp_of(b * va.ln_abs());
                            let v = if (b as i64) % 2 == 0 { mag } else { mag.neg() };
                            return checked(v, self.span);
                        }
                        checked(XReal::exp_of(vb.to_f64() * va.ln_abs()), self.span)
                    }
                }
            }
        }
    }

    /// Structural equality, ignoring spans.
    pub fn structural_eq(&self, other: &WeightExpr) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Number(a), ExprKind::Number(b)) => a.to_bits() == b.to_bits(),
            (ExprKind::Var(a), ExprKind::Var(b)) => a == b,
            (ExprKind::Unary(oa, a), ExprKind::Unary(ob, b)) => oa == ob && a.structural_eq(b),
            (ExprKind::Binary(oa, la, ra), ExprKind::Binary(ob, lb, rb)) => {
                oa == ob && la.structural_eq(lb) && ra.structural_eq(rb)
            }
            _ => false,
        }
    }

    /// Pretty-prints with minimal parentheses; reparsing yields a
    /// structurally identical tree.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s
    }

    fn write(&self, out: &mut String) {
        match &self.kind {
            ExprKind::Number(v) => {
                out.push_str(&format!("{v}"));
            }
            ExprKind::Var(Var::I) => out.push('i'),
            ExprKind::Var(Var::N) => out.push('n'),
            ExprKind::Unary(UnOp::Neg, a) => {
                out.push('-');
                self.write_child(a, prec(&self.kind), true, out);
            }
            ExprKind::Unary(op, a) => {
                out.push_str(match op {
                    UnOp::Exp => "exp(",
                    UnOp::Log => "log(",
                    UnOp::Sqrt => "sqrt(",
                    UnOp::Neg => unreachable!(),
                });
                a.write(out);
                out.push(')');
            }
            ExprKind::Binary(op, l, r) => {
                let p = prec(&self.kind);
                // Left-associative operators need parens around an
                // equal-precedence right child to keep the tree shape;
                // `^` is right-associative, so the left child needs them.
                let (lsym, left_strict, right_strict) = match op {
                    BinOp::Add => ("+", false, true),
                    BinOp::Sub => ("-", false, true),
                    BinOp::Mul => ("*", false, true),
                    BinOp::Div => ("/", false, true),
                    BinOp::Pow => ("^", true, false),
                };
                self.write_child(l, p, left_strict, out);
                out.push_str(lsym);
                self.write_child(r, p, right_strict, out);
            }
        }
    }

    fn write_child(&self, child: &WeightExpr, parent_prec: u8, strict: bool, out: &mut String) {
        let cp = prec(&child.kind);
        let needs = if strict { cp <= parent_prec } else { cp < parent_prec };
        if needs {
            out.push('(');
            child.write(out);
            out.push(')');
        } else {
            child.write(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> WeightExpr {
        parse_weight_expr(s).unwrap_or_else(|e| panic!("parse `{s}`: {e}"))
    }

    #[test]
    fn neg_div_shape() {
        // Per the grammar, `-` binds at the factor level: (-i)/n.
        let e = p("-i/n");
        match &e.kind {
            ExprKind::Binary(BinOp::Div, l, r) => {
                assert!(matches!(l.kind, ExprKind::Unary(UnOp::Neg, _)));
                assert!(matches!(r.kind, ExprKind::Var(Var::N)));
            }
            k => panic!("unexpected shape {k:?}"),
        }
        // Same value as -(i/n) at all sample points.
        let alt = p("-(i/n)");
        for (i, n) in [(1, 1), (7, 3), (100, 5)] {
            assert_eq!(e.eval(i, n).unwrap().to_f64(), alt.eval(i, n).unwrap().to_f64());
        }
    }

    #[test]
    fn nuclear_g1_encoding() {
        let e = p("-n*exp(i/n)");
        let v = e.eval(1, 1).unwrap().to_f64();
        assert!((v - (-std::f64::consts::E)).abs() < 1e-14);
        // Stays finite far beyond the f64 exponent range.
        let big = e.eval(10_000, 1).unwrap();
        assert!(big.is_finite());
        assert!((big.neg().ln_abs() - 10_000.0).abs() < 1e-9);
    }

    #[test]
    fn incomplete_pow_offset() {
        let err = parse_weight_expr("i^").unwrap_err();
        assert_eq!(err.offset(), 2);
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn pow_right_assoc_and_unary_binding() {
        // i^n^2 = i^(n^2)
        let e = p("i^n^2");
        match &e.kind {
            ExprKind::Binary(BinOp::Pow, l, r) => {
                assert!(matches!(l.kind, ExprKind::Var(Var::I)));
                assert!(matches!(r.kind, ExprKind::Binary(BinOp::Pow, ..)));
            }
            k => panic!("unexpected {k:?}"),
        }
        // -2^2 = (-2)^2 = 4
        assert_eq!(p("-2^2").eval(1, 1).unwrap().to_f64(), 4.0);
    }

    #[test]
    fn eval_errors() {
        assert!(matches!(p("i/(n-n)").eval(3, 2), Err(EvalError::DivisionByZero { .. })));
        assert!(matches!(p("log(n-n)").eval(1, 1), Err(EvalError::LogNonPositive { .. })));
        assert!(matches!(p("sqrt(n-i)").eval(5, 1), Err(EvalError::SqrtNegative { .. })));
        assert!(matches!(p("exp(exp(i))").eval(1000, 1), Err(EvalError::NonFinite { .. })));
    }

    #[test]
    fn unknown_identifier() {
        let err = parse_weight_expr("2*foo").unwrap_err();
        assert_eq!(err, ParseError::UnknownIdentifier { offset: 2, name: "foo".into() });
    }

    #[test]
    fn pretty_roundtrip_examples() {
        for src in [
            "-i/n",
            "-n*exp(i/n)",
            "i^n^2",
            "(i+n)*2",
            "i-(n-1)",
            "i/(n/2)",
            "-(i^2)",
            "sqrt(i+1)-log(n)",
            "2.5e-2*i",
        ] {
            let ast = p(src);
            let printed = ast.pretty();
            let re = p(&printed);
            assert!(ast.structural_eq(&re), "roundtrip failed: `{src}` -> `{printed}`");
        }
    }
}
