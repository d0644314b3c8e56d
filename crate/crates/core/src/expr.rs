//! A small arithmetic expression language for curve and offset definitions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | ident | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right associative and binds tighter than unary minus, so `-2^2`
//! is `-4`. There is no implicit multiplication. `pi` and `e` are
//! predefined constants; any other bare identifier is a variable.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("math domain error: {0}")]
    MathDomain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, x: f64) -> Result<f64, ExprError> {
        let y = match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Exp => x.exp(),
            Func::Log => {
                if x <= 0.0 {
                    return Err(ExprError::MathDomain(format!("log({x})")));
                }
                x.ln()
            }
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(ExprError::MathDomain(format!("sqrt({x})")));
                }
                x.sqrt()
            }
            Func::Abs => x.abs(),
        };
        finite(y, || format!("{}({x})", self.name()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

const PREC_NEG: u8 = 3;
const PREC_ATOM: u8 = 5;

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(String),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        parse(text)
    }

    pub fn eval(&self, bindings: &HashMap<String, f64>) -> Result<f64, ExprError> {
        eval(self, bindings)
    }

    /// Evaluates with `s` bound on top of `params`.
    pub fn eval_at(&self, s: f64, params: &HashMap<String, f64>) -> Result<f64, ExprError> {
        self.eval_with(&|name| {
            if name == "s" {
                Some(s)
            } else {
                params.get(name).copied()
            }
        })
    }

    pub fn eval_with(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64, ExprError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(name) => lookup(name).ok_or_else(|| ExprError::UnboundVariable(name.clone())),
            Expr::Neg(e) => Ok(-e.eval_with(lookup)?),
            Expr::Call(f, e) => f.apply(e.eval_with(lookup)?),
            Expr::Bin(op, l, r) => {
                let a = l.eval_with(lookup)?;
                let b = r.eval_with(lookup)?;
                binary(*op, a, b)
            }
        }
    }

    /// Names of all variables referenced by the expression.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(n) => out.push(n.clone()),
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_vars(out),
            Expr::Bin(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Const(c) if c.is_sign_negative() => PREC_NEG,
            Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => PREC_ATOM,
            Expr::Neg(_) => PREC_NEG,
            Expr::Bin(op, ..) => op.precedence(),
        }
    }
}

fn finite(y: f64, what: impl FnOnce() -> String) -> Result<f64, ExprError> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(ExprError::MathDomain(what()))
    }
}

fn binary(op: BinOp, a: f64, b: f64) -> Result<f64, ExprError> {
    let y = match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => {
            if b == 0.0 {
                return Err(ExprError::MathDomain(format!("{a} / 0")));
            }
            a / b
        }
        BinOp::Pow => {
            if a == 0.0 && b < 0.0 {
                return Err(ExprError::MathDomain(format!("0^{b}")));
            }
            a.powf(b)
        }
    };
    finite(y, || format!("{a} {} {b}", op.symbol()))
}

pub fn eval(e: &Expr, bindings: &HashMap<String, f64>) -> Result<f64, ExprError> {
    e.eval_with(&|name| bindings.get(name).copied())
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "-{}", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var(n) => f.write_str(n),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_operand(f, e, e.precedence() < PREC_NEG)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                let (lp, rp) = if *op == BinOp::Pow {
                    (l.precedence() <= p, r.precedence() < PREC_NEG)
                } else {
                    (l.precedence() < p, r.precedence() <= p)
                };
                write_operand(f, l, lp)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, r, rp)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, ExprError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        while let Some(t) = lx.next_token()? {
            out.push(t);
        }
        Ok(out)
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn next_token(&mut self) -> Result<Option<(usize, Tok)>, ExprError> {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let tok = match c {
            b'0'..=b'9' | b'.' => self.number()?,
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(c as char)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(ExprError::SyntaxError {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        Ok(Some((start, tok)))
    }

    fn digits(&mut self) -> usize {
        let from = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        self.pos - from
    }

    fn number(&mut self) -> Result<Tok, ExprError> {
        let start = self.pos;
        let mut n = self.digits();
        if self.peek() == Some(b'.') {
            self.pos += 1;
            n += self.digits();
        }
        if n == 0 {
            return Err(ExprError::SyntaxError {
                offset: start,
                message: "malformed number".into(),
            });
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                // not an exponent; leave `e` for the next token
                self.pos = save;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| ExprError::SyntaxError {
                offset: start,
                message: format!("malformed number `{text}`"),
            })
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(o, _)| *o)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::SyntaxError {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Tok::Op(c)) if ops.contains(c) => {
                let c = *c;
                self.idx += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return self.error("unexpected end of input");
        };
        self.idx += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.close()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let call = self.peek() == Some(&Tok::LParen);
                match (Func::from_name(&name), call) {
                    (Some(f), true) => {
                        self.idx += 1;
                        let arg = self.expr()?;
                        self.close()?;
                        Ok(Expr::Call(f, Box::new(arg)))
                    }
                    (Some(_), false) => Err(ExprError::SyntaxError {
                        offset,
                        message: format!("function `{name}` requires parentheses"),
                    }),
                    (None, true) => Err(ExprError::UnknownIdentifier { offset, name }),
                    (None, false) => Ok(match name.as_str() {
                        "pi" => Expr::Const(std::f64::consts::PI),
                        "e" => Expr::Const(std::f64::consts::E),
                        _ => Expr::Var(name),
                    }),
                }
            }
            Tok::Op(c) => Err(ExprError::SyntaxError {
                offset,
                message: format!("unexpected operator `{c}`"),
            }),
            Tok::RParen => Err(ExprError::SyntaxError {
                offset,
                message: "unexpected `)`".into(),
            }),
        }
    }

    fn close(&mut self) -> Result<(), ExprError> {
        if self.peek() == Some(&Tok::RParen) {
            self.idx += 1;
            Ok(())
        } else {
            self.error("expected `)`")
        }
    }
}

/// Parses `text` into an expression tree.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    let toks = Lexer::tokens(text)?;
    if toks.is_empty() {
        return Err(ExprError::SyntaxError {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.idx < p.toks.len() {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}
