//! LL(1) parser for infix expressions.
//!
//! ```text
//! list    := expr (',' expr)*
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= '-'? (INT | '(' '-'? INT ')') ('^' exponent)?
//! primary := NUMBER | 'pi' | VAR | FUNC '(' expr ')' | '(' expr ')'
//! ```
//!
//! Variables are `x1 .. xn`; functions are `exp log sin cos sqrt`. `^` binds
//! tighter than unary minus and is right-associative.

use thiserror::Error;

use super::graph::{ExprGraph, GraphBuilder, Unary};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("parse error at position {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

impl Lexer {
    fn new(text: &str) -> Result<Self, ParseError> {
        let bytes = text.as_bytes();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s = &text[start..i];
                let v = s
                    .parse::<f64>()
                    .map_err(|_| ParseError { pos: start, msg: format!("malformed number `{s}`") })?;
                toks.push((Tok::Num(v), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            } else if "+-*/^(),<>".contains(c) {
                toks.push((Tok::Sym(c), i));
                i += 1;
            } else {
                return Err(ParseError { pos: i, msg: format!("unexpected character `{c}`") });
            }
        }
        toks.push((Tok::End, text.len()));
        Ok(Lexer { toks })
    }
}

struct Parser<'a, T> {
    toks: &'a [(Tok, usize)],
    at: usize,
    b: GraphBuilder<T>,
    max_var: usize,
    arity: Option<usize>,
}

impl<'a, T: Scalar> Parser<'a, T> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<R>(&self, msg: impl Into<String>) -> Result<R, ParseError> {
        Err(ParseError { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<usize, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    let r = self.term()?;
                    acc = self.b.add(acc, r);
                }
                Tok::Sym('-') => {
                    self.bump();
                    let r = self.term()?;
                    acc = self.b.sub(acc, r);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<usize, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    let r = self.unary()?;
                    acc = self.b.mul(acc, r);
                }
                Tok::Sym('/') => {
                    self.bump();
                    let r = self.unary()?;
                    acc = self.b.div(acc, r);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<usize, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            let a = self.unary()?;
            Ok(self.b.neg(a))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<usize, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            let k = self.exponent()?;
            Ok(self.b.powi(base, k))
        } else {
            Ok(base)
        }
    }

    fn int_atom(&mut self) -> Result<i64, ParseError> {
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => {
                Ok(if neg { -(v as i64) } else { v as i64 })
            }
            Tok::Num(v) => Err(ParseError { pos, msg: format!("exponent `{v}` is not an integer") }),
            _ => Err(ParseError { pos, msg: "exponent must be an integer literal".into() }),
        }
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let start = self.pos();
        let base = if *self.peek() == Tok::Sym('(') {
            self.bump();
            let k = self.int_atom()?;
            self.expect(')')?;
            k
        } else {
            self.int_atom()?
        };
        let value = if *self.peek() == Tok::Sym('^') {
            self.bump();
            let e = self.exponent()?;
            if e < 0 {
                return Err(ParseError { pos: start, msg: "integer exponent tower has a negative exponent".into() });
            }
            base.checked_pow(e as u32)
        } else {
            Some(base)
        };
        value
            .and_then(|v| i32::try_from(v).ok())
            .ok_or(ParseError { pos: start, msg: "exponent out of range".into() })
    }

    fn primary(&mut self) -> Result<usize, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v) => Ok(self.b.constant(T::lit(v))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "exp" => Some(Unary::Exp),
                    "log" => Some(Unary::Log),
                    "sin" => Some(Unary::Sin),
                    "cos" => Some(Unary::Cos),
                    "sqrt" => Some(Unary::Sqrt),
                    _ => None,
                };
                if let Some(op) = func {
                    self.expect('(')?;
                    let a = self.expr()?;
                    self.expect(')')?;
                    return Ok(self.b.unary(op, a));
                }
                if name == "pi" {
                    return Ok(self.b.constant(T::PI()));
                }
                if let Some(idx) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    if idx == 0 {
                        return Err(ParseError { pos, msg: "variables are numbered from x1".into() });
                    }
                    if let Some(n) = self.arity {
                        if idx > n {
                            return Err(ParseError {
                                pos,
                                msg: format!("variable `{name}` exceeds arity {n}"),
                            });
                        }
                    }
                    self.max_var = self.max_var.max(idx);
                    return Ok(self.b.input(idx - 1));
                }
                Err(ParseError { pos, msg: format!("unknown identifier `{name}`") })
            }
            Tok::End => Err(ParseError { pos, msg: "unexpected end of input".into() }),
            Tok::Sym(c) => Err(ParseError { pos, msg: format!("unexpected `{c}`") }),
        }
    }
}

fn run<T: Scalar, R>(
    text: &str,
    arity: Option<usize>,
    body: impl FnOnce(&mut Parser<'_, T>) -> Result<R, ParseError>,
) -> Result<(R, GraphBuilder<T>, usize), ParseError> {
    let lex = Lexer::new(text)?;
    let mut p = Parser { toks: &lex.toks, at: 0, b: GraphBuilder::new(0), max_var: 0, arity };
    let r = body(&mut p)?;
    if *p.peek() != Tok::End {
        return p.err("unexpected trailing input");
    }
    Ok((r, p.b, p.max_var))
}

fn finish<T: Scalar>(b: GraphBuilder<T>, arity: usize, outputs: Vec<usize>) -> ExprGraph<T> {
    ExprGraph::new(arity, b.into_nodes(), outputs).expect("parser emits ordered nodes within arity")
}

/// Parses a comma-separated list of expressions into one multi-output graph.
/// With `arity = None` the arity is the largest variable index used.
pub fn parse_exprs<T: Scalar>(text: &str, arity: Option<usize>) -> Result<ExprGraph<T>, ParseError> {
    let (outs, b, max_var) = run::<T, _>(text, arity, |p| {
        let mut outs = vec![p.expr()?];
        while *p.peek() == Tok::Sym(',') {
            p.bump();
            outs.push(p.expr()?);
        }
        Ok(outs)
    })?;
    Ok(finish(b, arity.unwrap_or(max_var), outs))
}

/// Parses a single expression.
pub fn parse_expr<T: Scalar>(text: &str, arity: Option<usize>) -> Result<ExprGraph<T>, ParseError> {
    let g = parse_exprs(text, arity)?;
    if g.output_len() != 1 {
        return Err(ParseError { pos: 0, msg: "expected a single expression".into() });
    }
    Ok(g)
}

/// Parses a strict inequality `lhs < rhs` or `lhs > rhs` into the graph of
/// `rhs − lhs` (resp. `lhs − rhs`), which is positive exactly on the set.
pub fn parse_inequality<T: Scalar>(text: &str, arity: usize) -> Result<ExprGraph<T>, ParseError> {
    let (out, b, _) = run::<T, _>(text, Some(arity), |p| {
        let lhs = p.expr()?;
        let op = match p.peek() {
            Tok::Sym(c @ ('<' | '>')) => *c,
            _ => return p.err("expected `<` or `>`"),
        };
        p.bump();
        let rhs = p.expr()?;
        Ok(if op == '<' { p.b.sub(rhs, lhs) } else { p.b.sub(lhs, rhs) })
    })?;
    Ok(finish(b, arity, vec![out]))
}
