//! Closed-form coefficient functions of `t`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term { ("+"|"-") term }
//! term   := factor { ("*"|"/") factor }
//! factor := "-" factor | power
//! power  := atom [ "^" factor ]
//! atom   := NUMBER | "t" | "pi" | FUNC "(" expr ")" | "(" expr ")"
//! FUNC   := sin | cos | tan | exp | ln | abs | arctan | sign
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so
//! `-2^2` is `-4` and `2^-1` is `0.5`. There is no implicit multiplication.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Abs,
    Arctan,
    Sign,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Abs => "abs",
            Func::Arctan => "arctan",
            Func::Sign => "sign",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "abs" => Func::Abs,
            "arctan" => Func::Arctan,
            "sign" => Func::Sign,
            _ => return None,
        })
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
}

/// Parsed expression tree. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    T,
    Pi,
    Neg(Box<Expr>),
    Func(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    DivisionByZero,
    LogOfNonPositive,
    NegativeBaseFractionalPower,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::LogOfNonPositive => "logarithm of a non-positive number",
            DomainKind::NegativeBaseFractionalPower => "fractional power of a negative number",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} in `{subexpr}` at t = {t}")]
pub struct EvalError {
    pub kind: DomainKind,
    pub subexpr: String,
    pub t: f64,
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    /// `Some(c)` when the expression does not depend on `t`.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Pi => Some(std::f64::consts::PI),
            Expr::T => None,
            Expr::Neg(a) => a.as_constant().map(|v| -v),
            Expr::Func(f, a) => {
                let v = a.as_constant()?;
                apply_func(*f, v).ok()
            }
            Expr::Bin(op, a, b) => {
                let x = a.as_constant()?;
                let y = b.as_constant()?;
                apply_bin(*op, x, y).ok()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    /// Replace every occurrence of `t` by `with`.
    pub fn substitute_t(&self, with: &Expr) -> Expr {
        match self {
            Expr::T => with.clone(),
            Expr::Const(_) | Expr::Pi => self.clone(),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute_t(with))),
            Expr::Func(f, a) => Expr::Func(*f, Box::new(a.substitute_t(with))),
            Expr::Bin(op, a, b) => Expr::Bin(*op, Box::new(a.substitute_t(with)), Box::new(b.substitute_t(with))),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::T => Ok(t),
            Expr::Pi => Ok(std::f64::consts::PI),
            Expr::Neg(a) => Ok(-a.eval(t)?),
            Expr::Func(f, a) => {
                let x = a.eval(t)?;
                apply_func(*f, x).map_err(|kind| EvalError {
                    kind,
                    subexpr: self.to_string(),
                    t,
                })
            }
            Expr::Bin(op, a, b) => {
                let x = a.eval(t)?;
                let y = b.eval(t)?;
                apply_bin(*op, x, y).map_err(|kind| EvalError {
                    kind,
                    subexpr: self.to_string(),
                    t,
                })
            }
        }
    }
}

fn apply_func(f: Func, x: f64) -> Result<f64, DomainKind> {
    Ok(match f {
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Tan => x.tan(),
        Func::Exp => x.exp(),
        Func::Ln => {
            if x <= 0.0 {
                return Err(DomainKind::LogOfNonPositive);
            }
            x.ln()
        }
        Func::Abs => x.abs(),
        Func::Arctan => x.atan(),
        Func::Sign => {
            if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                0.0
            }
        }
    })
}

fn apply_bin(op: BinOp, x: f64, y: f64) -> Result<f64, DomainKind> {
    Ok(match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        BinOp::Mul => x * y,
        BinOp::Div => {
            if y == 0.0 {
                return Err(DomainKind::DivisionByZero);
            }
            x / y
        }
        BinOp::Pow => power(x, y)?,
    })
}

fn power(x: f64, y: f64) -> Result<f64, DomainKind> {
    if x == 0.0 && y < 0.0 {
        return Err(DomainKind::DivisionByZero);
    }
    if y.fract() == 0.0 && y.abs() <= i32::MAX as f64 {
        return Ok(x.powi(y as i32));
    }
    if x < 0.0 {
        return Err(DomainKind::NegativeBaseFractionalPower);
    }
    Ok(x.powf(y))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "(-{})", -c)
                } else {
                    write!(f, "{}", c)
                }
            }
            Expr::T => f.write_str("t"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(a) => write!(f, "(-{})", a),
            Expr::Func(func, a) => write!(f, "{}({})", func.name(), a),
            Expr::Bin(op, a, b) => write!(f, "({} {} {})", a, op.symbol(), b),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
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
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            self.pos += 1;
            return Ok((tok, start));
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self
                .src
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
            {
                self.pos += 1;
            }
            let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
            return Ok((Tok::Ident(name), start));
        }
        Err(ParseError::Syntax {
            offset: start,
            message: format!("unexpected character `{}`", char::from(c)),
        })
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize), ParseError> {
        let digits = |lx: &mut Lexer| {
            let s = lx.pos;
            while lx.src.get(lx.pos).is_some_and(u8::is_ascii_digit) {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(ParseError::Syntax {
                offset: start,
                message: "malformed number".into(),
            });
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                // "2e" or "2exp(t)" is not an exponent; leave it for the parser to reject
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        Ok((Tok::Num(v), start))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lex.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            offset: self.at,
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            let exp = self.factor()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                match name.as_str() {
                    "t" => Ok(Expr::T),
                    "pi" => Ok(Expr::Pi),
                    _ => {
                        let Some(func) = Func::from_name(&name) else {
                            return Err(ParseError::UnknownIdentifier { offset: at, name });
                        };
                        if self.tok != Tok::LParen {
                            return self.syntax(format!("expected `(` after `{name}`"));
                        }
                        self.bump()?;
                        let arg = self.expr()?;
                        self.expect_rparen()?;
                        Ok(Expr::Func(func, Box::new(arg)))
                    }
                }
            }
            Tok::End => self.syntax("unexpected end of input"),
            other => self.syntax(format!("unexpected token {other:?}")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if self.tok != Tok::RParen {
            return self.syntax("expected `)`");
        }
        self.bump()
    }
}

/// Parse a coefficient expression.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        lex: Lexer {
            src: text.as_bytes(),
            pos: 0,
        },
        tok: Tok::End,
        at: 0,
    };
    p.bump()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return p.syntax("trailing input");
    }
    Ok(e)
}
